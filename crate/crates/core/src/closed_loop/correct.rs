use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;
use crate::spectral::LineAverages;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectedLine {
    pub bin: usize,
    pub y: Complex64,
    pub u: Complex64,
    pub interpolated_g: Complex64,
    /// Excited bins the FRF was interpolated between.
    pub neighbors: (usize, usize),
    pub y_corr: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub lines: Vec<CorrectedLine>,
    /// Detection bins without an excited neighbor on both sides.
    pub uncorrected: Vec<usize>,
    /// Mean `|R|^2 / |Y_corr|^2` over the excited-bin neighbors, in dB. Advisory only.
    pub reference_snr_db: Option<f64>,
}

impl CorrectionResult {
    /// `y` with the corrected values written at the detection bins only.
    pub fn apply(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = y.to_vec();
        for l in &self.lines {
            out[l.bin] = l.y_corr;
        }
        out
    }
}

/// Removes the interpolated linear feed-through `G U` at the detection
/// bins, `Y_corr = Y - G U`. `G = Y / U` at the excited bins is interpolated
/// linearly in its complex value between the nearest excited bins.
pub fn correct_feedback(averages: &LineAverages, grid: &FrequencyGrid) -> Result<CorrectionResult> {
    if averages.mean_u.len() != grid.n_bins() {
        return Err(Error::InvalidArgument("line averages do not match the grid".into()));
    }
    let ex = &grid.excited_bins;
    let g = |k: usize| averages.mean_y[k] / averages.mean_u[k];
    let mut lines = Vec::new();
    let mut uncorrected = Vec::new();
    for k in grid.all_detection_bins() {
        let i = ex.partition_point(|&e| e < k);
        if i == 0 || i == ex.len() {
            uncorrected.push(k);
            continue;
        }
        let (lo, hi) = (ex[i - 1], ex[i]);
        let t = (k - lo) as f64 / (hi - lo) as f64;
        let gi = g(lo) * (1.0 - t) + g(hi) * t;
        let (y, u) = (averages.mean_y[k], averages.mean_u[k]);
        lines.push(CorrectedLine {
            bin: k,
            y,
            u,
            interpolated_g: gi,
            neighbors: (lo, hi),
            y_corr: y - gi * u,
        });
    }
    let reference_snr_db = averages.mean_r.as_ref().and_then(|r| {
        let num: f64 = ex.iter().map(|&k| r[k].norm_sqr()).sum();
        let den: f64 = lines.iter().map(|l| l.y_corr.norm_sqr()).sum();
        (den > 0.0 && !lines.is_empty())
            .then(|| 10.0 * ((num / ex.len() as f64) / (den / lines.len() as f64)).log10())
    });
    Ok(CorrectionResult {
        lines,
        uncorrected,
        reference_snr_db,
    })
}

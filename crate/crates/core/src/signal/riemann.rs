//! Band-power comparison between a multisine realization and a target PSD.

use serde::{Deserialize, Serialize};

use super::multisine::MultisineRealization;
use crate::error::{Error, Result};

/// One-sided power spectral density tabulated at increasing frequencies and
/// linearly interpolated in between. Outside the table the end values are held.
///
/// Units: signal power per Hz, so that the signal variance is
/// `integral_0^{fs/2} S(f) df`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPsd {
    points: Vec<(f64, f64)>,
}

impl TabulatedPsd {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty PSD table".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument(
                "PSD table frequencies must be strictly increasing".into(),
            ));
        }
        if points.iter().any(|p| !(p.1 >= 0.0)) {
            return Err(Error::InvalidArgument("PSD values must be non-negative".into()));
        }
        Ok(TabulatedPsd { points })
    }

    pub fn flat(level: f64, f_max: f64) -> Self {
        TabulatedPsd {
            points: vec![(0.0, level), (f_max, level)],
        }
    }

    pub fn eval(&self, f: f64) -> f64 {
        let p = &self.points;
        if f <= p[0].0 {
            return p[0].1;
        }
        if f >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|q| q.0 <= f) - 1;
        let (f0, s0) = p[i];
        let (f1, s1) = p[i + 1];
        s0 + (s1 - s0) * (f - f0) / (f1 - f0)
    }

    /// Exact integral of the interpolant over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let mut knots = vec![a];
        knots.extend(self.points.iter().map(|p| p.0).filter(|&f| f > a && f < b));
        knots.push(b);
        knots
            .windows(2)
            .map(|w| 0.5 * (self.eval(w[0]) + self.eval(w[1])) * (w[1] - w[0]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandDeviation {
    pub f_lo: f64,
    pub f_hi: f64,
    pub n_lines: usize,
    pub realization_power: f64,
    pub target_power: f64,
    /// `None` when the band holds no excited line ("no lines" flag).
    pub deviation: Option<f64>,
}

impl BandDeviation {
    pub fn no_lines(&self) -> bool {
        self.deviation.is_none()
    }
}

/// Compares, per band `(f_lo, f_hi]`, the summed power of the realization's
/// excited lines with the integral of `target` over the band.
pub fn verify_band_power(
    realization: &MultisineRealization,
    target: &TabulatedPsd,
    bands: &[(f64, f64)],
) -> Result<Vec<BandDeviation>> {
    let grid = &realization.grid;
    let n = grid.n_samples as f64;
    let mut out = Vec::with_capacity(bands.len());
    for &(f_lo, f_hi) in bands {
        if !(f_hi > f_lo) {
            return Err(Error::InvalidArgument(format!(
                "band ({f_lo}, {f_hi}] is empty"
            )));
        }
        let mut n_lines = 0;
        let mut power = 0.0;
        for l in &realization.lines {
            let f = grid.frequency(l.bin);
            if f > f_lo && f <= f_hi {
                n_lines += 1;
                power += 2.0 * l.amplitude * l.amplitude / n;
            }
        }
        let target_power = target.integrate(f_lo, f_hi);
        let deviation = (n_lines > 0 && target_power > 0.0)
            .then(|| (power - target_power).abs() / target_power);
        out.push(BandDeviation {
            f_lo,
            f_hi,
            n_lines,
            realization_power: power,
            target_power,
            deviation,
        });
    }
    Ok(out)
}

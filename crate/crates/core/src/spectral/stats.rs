use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectra::SpectralSet;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// One set of statistics per realization, over its periods.
    PerRealization,
    /// All periods of all realizations treated as one population.
    Pooled,
}

/// Sample means and (co)variances over periods at every bin `0..=N/2`.
///
/// Variances use the `1/(n-1)` normalization and are `None` when only one
/// spectrum is available (no noise estimate possible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineAverages {
    pub n_averages: usize,
    pub mean_u: Vec<Complex64>,
    pub mean_y: Vec<Complex64>,
    pub mean_r: Option<Vec<Complex64>>,
    pub var_u: Option<Vec<f64>>,
    pub var_y: Option<Vec<f64>>,
    /// `1/(n-1) sum (Y - mean_Y) conj(U - mean_U)`
    pub covar_yu: Option<Vec<Complex64>>,
}

impl LineAverages {
    /// From explicit lists of period spectra (same length each).
    pub fn from_blocks(
        u: &[Vec<Complex64>],
        y: &[Vec<Complex64>],
        r: Option<&[Vec<Complex64>]>,
    ) -> Self {
        let n = u.len();
        let mean_u = mean(u);
        let mean_y = mean(y);
        let mean_r = r.map(mean);
        let (var_u, var_y, covar_yu) = if n >= 2 {
            let bins = mean_u.len();
            let mut vu = vec![0.0; bins];
            let mut vy = vec![0.0; bins];
            let mut cyu = vec![Complex64::new(0.0, 0.0); bins];
            for (ub, yb) in u.iter().zip(y) {
                for k in 0..bins {
                    let du = ub[k] - mean_u[k];
                    let dy = yb[k] - mean_y[k];
                    vu[k] += du.norm_sqr();
                    vy[k] += dy.norm_sqr();
                    cyu[k] += dy * du.conj();
                }
            }
            let s = 1.0 / (n - 1) as f64;
            (
                Some(vu.into_iter().map(|v| v * s).collect()),
                Some(vy.into_iter().map(|v| v * s).collect()),
                Some(cyu.into_iter().map(|v| v * s).collect()),
            )
        } else {
            (None, None, None)
        };
        LineAverages {
            n_averages: n,
            mean_u,
            mean_y,
            mean_r,
            var_u,
            var_y,
            covar_yu,
        }
    }

    pub fn has_noise_estimate(&self) -> bool {
        self.var_y.is_some()
    }

    /// Variance of the mean output `var_Y / n`.
    pub fn var_mean_y(&self, bin: usize) -> Option<f64> {
        self.var_y.as_ref().map(|v| v[bin] / self.n_averages as f64)
    }
}

fn mean(blocks: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); blocks[0].len()];
    for b in blocks {
        for (a, x) in acc.iter_mut().zip(b) {
            *a += x;
        }
    }
    let s = 1.0 / blocks.len() as f64;
    acc.into_iter().map(|a| a * s).collect()
}

/// Line statistics of the `u`, `y` (and `r` when present) channels.
pub fn line_statistics(spectra: &SpectralSet, scope: Scope) -> Result<Vec<LineAverages>> {
    let has_r = spectra.has("r");
    match scope {
        Scope::PerRealization => (0..spectra.n_realizations)
            .map(|m| {
                let r = if has_r { Some(spectra.periods("r", m)?) } else { None };
                Ok(LineAverages::from_blocks(
                    spectra.periods("u", m)?,
                    spectra.periods("y", m)?,
                    r,
                ))
            })
            .collect(),
        Scope::Pooled => {
            let r = if has_r { Some(spectra.all_blocks("r")?) } else { None };
            Ok(vec![LineAverages::from_blocks(
                spectra.all_blocks("u")?,
                spectra.all_blocks("y")?,
                r,
            )])
        }
    }
}

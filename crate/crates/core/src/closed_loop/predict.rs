use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopPoint {
    pub g: Complex64,
    pub c: Complex64,
    pub s_rr: f64,
    pub s_vv: f64,
    /// `None` where the mixture is undefined (no power, or `S_RR = 0` with `C = 0`).
    pub g_tilde: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopPrediction {
    pub points: Vec<LoopPoint>,
}

/// `G~ = (G S_RR - conj(C) S_VV) / (S_RR + |C|^2 S_VV)`: what `S_YU / S_UU`
/// converges to in a loop driven by both reference and output noise.
pub fn mixture(g: Complex64, c: Complex64, s_rr: f64, s_vv: f64) -> Option<Complex64> {
    let den = s_rr + c.norm_sqr() * s_vv;
    (den > 0.0).then(|| (g * s_rr - c.conj() * s_vv) / den)
}

pub fn predict_closed_loop_frf(
    g: &[Complex64],
    c: &[Complex64],
    s_rr: &[f64],
    s_vv: &[f64],
) -> Result<LoopPrediction> {
    let n = g.len();
    if c.len() != n || s_rr.len() != n || s_vv.len() != n {
        return Err(Error::InvalidArgument("per-bin inputs differ in length".into()));
    }
    if s_rr.iter().chain(s_vv).any(|p| !(*p >= 0.0)) {
        return Err(Error::InvalidArgument("power spectra must be non-negative".into()));
    }
    Ok(LoopPrediction {
        points: (0..n)
            .map(|k| LoopPoint {
                g: g[k],
                c: c[k],
                s_rr: s_rr[k],
                s_vv: s_vv[k],
                g_tilde: mixture(g[k], c[k], s_rr[k], s_vv[k]),
            })
            .collect(),
    })
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;
use crate::spectral::{FlagReason, FlaggedBin, SpectralSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndirectLine {
    pub bin: usize,
    pub frequency: f64,
    pub g_ur: Complex64,
    pub g_yr: Complex64,
    /// `S_YR / S_UR`
    pub g_bla_r: Complex64,
    pub var_bla_r: Option<f64>,
    /// `S_YU / S_UU` over the same realizations.
    pub g_direct: Complex64,
    /// `S_{Y_S U} / S_UU`, the difference between the direct and indirect estimates.
    pub bias: Complex64,
    /// `|mean(Y_S conj U)|` in units of its standard error (`M >= 2`).
    pub bias_z: Option<f64>,
}

/// Reference-based BLA over `M` realizations of period-averaged spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndirectEstimate {
    pub n_realizations: usize,
    pub lines: Vec<IndirectLine>,
    /// Residual spectra `[m][line]`: `U - G_ur R`.
    pub u_tilde_s: Vec<Vec<Complex64>>,
    /// `Y - G_yr R`
    pub y_tilde_s: Vec<Vec<Complex64>>,
    /// `Y~_S - G_bla_r U~_S`
    pub y_s: Vec<Vec<Complex64>>,
    pub flagged: Vec<FlaggedBin>,
}

impl IndirectEstimate {
    /// Lines whose bias statistic exceeds `threshold` standard errors.
    pub fn biased_fraction(&self, threshold: f64) -> f64 {
        let n = self.lines.iter().filter(|l| l.bias_z.is_some_and(|z| z > threshold)).count();
        n as f64 / self.lines.len().max(1) as f64
    }
}

pub fn indirect_frf(spectra: &SpectralSet, grid: &FrequencyGrid, floor: f64) -> Result<IndirectEstimate> {
    if !spectra.has("r") {
        return Err(Error::InvalidArgument("indirect estimation needs an `r` channel".into()));
    }
    let m_count = spectra.n_realizations;
    let mut u = Vec::with_capacity(m_count);
    let mut y = Vec::with_capacity(m_count);
    let mut r = Vec::with_capacity(m_count);
    for m in 0..m_count {
        u.push(spectra.period_mean("u", m)?);
        y.push(spectra.period_mean("y", m)?);
        r.push(spectra.period_mean("r", m)?);
    }
    let mf = m_count as f64;
    let avg = |f: &dyn Fn(usize) -> Complex64| (0..m_count).map(f).sum::<Complex64>() / mf;

    let s_ur_all: Vec<(usize, Complex64)> = grid
        .excited_bins
        .iter()
        .map(|&k| (k, avg(&|m| u[m][k] * r[m][k].conj())))
        .collect();
    let mut mags: Vec<f64> = s_ur_all.iter().map(|(_, s)| s.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let limit = floor * mags.get(mags.len() / 2).copied().unwrap_or(0.0);

    let mut lines = Vec::new();
    let mut flagged = Vec::new();
    let mut u_tilde_s = vec![Vec::new(); m_count];
    let mut y_tilde_s = vec![Vec::new(); m_count];
    let mut y_s = vec![Vec::new(); m_count];
    for (k, s_ur) in s_ur_all {
        if !(s_ur.norm() > limit) {
            flagged.push(FlaggedBin {
                bin: k,
                reason: FlagReason::IllConditioned,
            });
            continue;
        }
        let s_rr = avg(&|m| Complex64::new(r[m][k].norm_sqr(), 0.0)).re;
        let s_yr = avg(&|m| y[m][k] * r[m][k].conj());
        let s_uu = avg(&|m| Complex64::new(u[m][k].norm_sqr(), 0.0)).re;
        let s_yu = avg(&|m| y[m][k] * u[m][k].conj());
        let g_ur = s_ur / s_rr;
        let g_yr = s_yr / s_rr;
        let g_bla_r = s_yr / s_ur;
        let mut z = Vec::with_capacity(m_count);
        let mut var_sum = 0.0;
        for m in 0..m_count {
            let ut = u[m][k] - g_ur * r[m][k];
            let yt = y[m][k] - g_yr * r[m][k];
            let ys = yt - g_bla_r * ut;
            var_sum += ys.norm_sqr() * r[m][k].norm_sqr();
            z.push(ys * u[m][k].conj());
            u_tilde_s[m].push(ut);
            y_tilde_s[m].push(yt);
            y_s[m].push(ys);
        }
        let z_mean = z.iter().sum::<Complex64>() / mf;
        let (var_bla_r, bias_z) = if m_count >= 2 {
            let var_z = z.iter().map(|v| (v - z_mean).norm_sqr()).sum::<f64>() / (mf - 1.0);
            let se = (var_z / mf).sqrt();
            (
                Some(var_sum / (mf * (mf - 1.0) * s_ur.norm_sqr())),
                Some(if se > 0.0 { z_mean.norm() / se } else { 0.0 }),
            )
        } else {
            (None, None)
        };
        lines.push(IndirectLine {
            bin: k,
            frequency: grid.frequency(k),
            g_ur,
            g_yr,
            g_bla_r,
            var_bla_r,
            g_direct: s_yu / s_uu,
            bias: z_mean / s_uu,
            bias_z,
        });
    }
    Ok(IndirectEstimate {
        n_realizations: m_count,
        lines,
        u_tilde_s,
        y_tilde_s,
        y_s,
        flagged,
    })
}

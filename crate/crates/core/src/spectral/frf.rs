use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectra::SpectralSet;
use super::stats::LineAverages;
use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;

/// Dip guard: bins with `S_UU` below this fraction of the band median are flagged.
pub const DEFAULT_DIP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrfMode {
    /// `Y / U` of period-averaged spectra (periodic excitation).
    Division,
    /// `S_YU / S_UU` over all blocks (any excitation).
    CrossSpectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrfLine {
    pub bin: usize,
    pub frequency: f64,
    pub g: Complex64,
    /// Variance of `g` due to disturbing noise.
    pub var_noise: Option<f64>,
    /// Variance of `g` due to noise plus stochastic nonlinear distortions.
    pub var_total: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagReason {
    InputDip,
    IllConditioned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedBin {
    pub bin: usize,
    pub reason: FlagReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrfEstimate {
    pub n_samples: usize,
    pub sample_rate: f64,
    pub n_realizations: usize,
    pub n_periods: usize,
    /// Transient/leakage variance: `Some(0)` for periodic steady-state
    /// estimates, `None` when it is lumped into `var_noise`.
    pub var_leakage: Option<f64>,
    pub lines: Vec<FrfLine>,
    pub flagged: Vec<FlaggedBin>,
}

impl FrfEstimate {
    pub fn line(&self, bin: usize) -> Option<&FrfLine> {
        self.lines
            .binary_search_by_key(&bin, |l| l.bin)
            .ok()
            .map(|i| &self.lines[i])
    }

    pub fn bins(&self) -> Vec<usize> {
        self.lines.iter().map(|l| l.bin).collect()
    }

    /// Bin of the largest `|G|`.
    pub fn peak_bin(&self) -> Option<usize> {
        self.lines
            .iter()
            .max_by(|a, b| a.g.norm().total_cmp(&b.g.norm()))
            .map(|l| l.bin)
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        0.0
    } else {
        v[v.len() / 2]
    }
}

/// Splits bins into accepted and flagged by the input-power dip guard.
fn dip_guard(grid: &FrequencyGrid, s_uu: impl Fn(usize) -> f64, floor: f64) -> (Vec<usize>, Vec<FlaggedBin>) {
    let powers: Vec<f64> = grid.excited_bins.iter().map(|&k| s_uu(k)).collect();
    let limit = floor * median(&powers);
    let mut keep = Vec::new();
    let mut flagged = Vec::new();
    for (&k, &p) in grid.excited_bins.iter().zip(&powers) {
        if p > limit && p > 0.0 {
            keep.push(k);
        } else {
            flagged.push(FlaggedBin {
                bin: k,
                reason: FlagReason::InputDip,
            });
        }
    }
    (keep, flagged)
}

/// First-order variance of the ratio `Y / U` of period means.
pub(crate) fn ratio_variance(a: &LineAverages, k: usize) -> Option<f64> {
    let (vu, vy, cyu) = (a.var_u.as_ref()?, a.var_y.as_ref()?, a.covar_yu.as_ref()?);
    let u = a.mean_u[k];
    let g = a.mean_y[k] / u;
    let var = (vy[k] + g.norm_sqr() * vu[k] - 2.0 * (g.conj() * cyu[k]).re) / u.norm_sqr();
    Some(var.max(0.0) / a.n_averages as f64)
}

/// FRF of one realization from its period averages.
pub fn frf_division(averages: &LineAverages, grid: &FrequencyGrid, dip_floor: f64) -> Result<FrfEstimate> {
    if averages.mean_u.len() != grid.n_bins() {
        return Err(Error::InvalidArgument("line averages do not match the grid".into()));
    }
    let (keep, flagged) = dip_guard(grid, |k| averages.mean_u[k].norm_sqr(), dip_floor);
    let lines = keep
        .into_iter()
        .map(|k| FrfLine {
            bin: k,
            frequency: grid.frequency(k),
            g: averages.mean_y[k] / averages.mean_u[k],
            var_noise: ratio_variance(averages, k),
            var_total: None,
        })
        .collect();
    Ok(FrfEstimate {
        n_samples: grid.n_samples,
        sample_rate: grid.sample_rate,
        n_realizations: 1,
        n_periods: averages.n_averages,
        var_leakage: Some(0.0),
        lines,
        flagged,
    })
}

/// `S_YU / S_UU` with every block (period of every realization) as one
/// average. The variance lumps noise, nonlinear and leakage contributions.
pub fn frf_cross_spectral(spectra: &SpectralSet, grid: &FrequencyGrid, dip_floor: f64) -> Result<FrfEstimate> {
    let u = spectra.all_blocks("u")?;
    let y = spectra.all_blocks("y")?;
    let b = u.len();
    let bins = grid.n_bins();
    let mut s_uu = vec![0.0; bins];
    let mut s_yy = vec![0.0; bins];
    let mut s_yu = vec![Complex64::new(0.0, 0.0); bins];
    for (ub, yb) in u.iter().zip(y) {
        for k in 0..bins {
            s_uu[k] += ub[k].norm_sqr();
            s_yy[k] += yb[k].norm_sqr();
            s_yu[k] += yb[k] * ub[k].conj();
        }
    }
    let bf = b as f64;
    let (keep, flagged) = dip_guard(grid, |k| s_uu[k] / bf, dip_floor);
    let lines = keep
        .into_iter()
        .map(|k| {
            let (suu, syy, syu) = (s_uu[k] / bf, s_yy[k] / bf, s_yu[k] / bf);
            let g = syu / suu;
            // residual power of y after the linear fit, then var(G) = s_e / (B S_UU)
            let var_noise = (b >= 2).then(|| {
                let s_e = (syy - syu.norm_sqr() / suu).max(0.0) * bf / (bf - 1.0);
                s_e / (bf * suu)
            });
            FrfLine {
                bin: k,
                frequency: grid.frequency(k),
                g,
                var_noise,
                var_total: None,
            }
        })
        .collect();
    Ok(FrfEstimate {
        n_samples: grid.n_samples,
        sample_rate: grid.sample_rate,
        n_realizations: spectra.n_realizations,
        n_periods: spectra.n_periods,
        var_leakage: None,
        lines,
        flagged,
    })
}

/// Input to [`estimate_frf`].
pub enum FrfInput<'a> {
    Averages(&'a LineAverages),
    Spectra(&'a SpectralSet),
}

pub fn estimate_frf(input: FrfInput<'_>, grid: &FrequencyGrid, mode: FrfMode, dip_floor: f64) -> Result<FrfEstimate> {
    match (input, mode) {
        (FrfInput::Averages(a), FrfMode::Division) => frf_division(a, grid, dip_floor),
        (FrfInput::Spectra(s), FrfMode::CrossSpectral) => frf_cross_spectral(s, grid, dip_floor),
        (FrfInput::Spectra(s), FrfMode::Division) => {
            let a = super::stats::line_statistics(s, super::stats::Scope::Pooled)?;
            frf_division(&a[0], grid, dip_floor)
        }
        (FrfInput::Averages(_), FrfMode::CrossSpectral) => Err(Error::InvalidArgument(
            "cross-spectral estimation needs the block spectra, not averages".into(),
        )),
    }
}

/// Two-level averaging over periods and realizations.
///
/// Each realization gives `G_m = Y_m / U_m` of its period means with noise
/// variance `var_m`. The result is the mean of `G_m`, with
/// `var_noise = sum var_m / M^2` and `var_total = sum |G_m - G|^2 / (M (M-1))`,
/// both variances of the averaged FRF. With `P = 1` the noise variance is
/// absent and only realization averaging remains; with `M = 1` the total
/// variance is absent.
pub fn robust_method(spectra: &SpectralSet, grid: &FrequencyGrid, dip_floor: f64) -> Result<FrfEstimate> {
    let per = super::stats::line_statistics(spectra, super::stats::Scope::PerRealization)?;
    let m = per.len();
    let mf = m as f64;
    // guard on the realization-averaged input power
    let (keep, flagged) = dip_guard(
        grid,
        |k| per.iter().map(|a| a.mean_u[k].norm_sqr()).sum::<f64>() / mf,
        dip_floor,
    );
    let lines = keep
        .into_iter()
        .map(|k| {
            let gs: Vec<Complex64> = per.iter().map(|a| a.mean_y[k] / a.mean_u[k]).collect();
            let g = gs.iter().sum::<Complex64>() / mf;
            let var_noise = per
                .iter()
                .map(|a| ratio_variance(a, k))
                .sum::<Option<f64>>()
                .map(|s| s / (mf * mf));
            let var_total = (m >= 2)
                .then(|| gs.iter().map(|gm| (gm - g).norm_sqr()).sum::<f64>() / (mf * (mf - 1.0)));
            FrfLine {
                bin: k,
                frequency: grid.frequency(k),
                g,
                var_noise,
                var_total,
            }
        })
        .collect();
    Ok(FrfEstimate {
        n_samples: grid.n_samples,
        sample_rate: grid.sample_rate,
        n_realizations: m,
        n_periods: spectra.n_periods,
        var_leakage: Some(0.0),
        lines,
        flagged,
    })
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frf::{FlagReason, FlaggedBin};
use super::spectra::{period_dfts, SpectralSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::record::Record;

pub const DEFAULT_CONDITION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoLine {
    pub bin: usize,
    pub frequency: f64,
    /// `g[output][input]`, averaged over realizations.
    pub g: Vec<Vec<Complex64>>,
    /// Largest condition number of the measured input matrix over realizations.
    pub condition_number: f64,
    /// Variance of each averaged entry over realizations (`M >= 2`).
    pub var_total: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoFrf {
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub lines: Vec<MimoLine>,
    pub flagged: Vec<FlaggedBin>,
}

impl MimoFrf {
    pub fn line(&self, bin: usize) -> Option<&MimoLine> {
        self.lines.iter().find(|l| l.bin == bin)
    }
}

fn count_prefixed(record: &Record, prefix: char) -> usize {
    (0..)
        .take_while(|i| record.channel(&format!("{prefix}{i}")).is_some())
        .count()
}

/// Solves `Y = G U` per excited bin across the `n_u` experiments.
///
/// `records[e]` holds experiment `e` with channels `u0..`, `y0..`. The input
/// matrix is built from the measured period-averaged input spectra, so the
/// solution does not rely on the nominal rotation matrix.
pub fn mimo_frf(records: &[Record], condition_limit: f64) -> Result<MimoFrf> {
    let Some(first) = records.first() else {
        return Err(Error::InvalidArgument("no experiments".into()));
    };
    let nu = count_prefixed(first, 'u');
    let ny = count_prefixed(first, 'y');
    if nu == 0 || ny == 0 {
        return Err(Error::InvalidArgument("records need u0.. and y0.. channels".into()));
    }
    if records.len() != nu {
        return Err(Error::InvalidArgument(format!(
            "{nu} inputs need {nu} experiments, got {}",
            records.len()
        )));
    }
    for r in records {
        if r.grid != first.grid || r.n_realizations != first.n_realizations || r.n_periods != first.n_periods {
            return Err(Error::InvalidArgument("experiments differ in grid or shape".into()));
        }
    }
    let spectra: Vec<SpectralSet> = records.iter().map(period_dfts).collect::<Result<_>>()?;
    let m_count = first.n_realizations;
    // means[e][m][channel] -> spectrum
    let mut means = Vec::with_capacity(nu);
    for s in &spectra {
        let mut per_m = Vec::with_capacity(m_count);
        for m in 0..m_count {
            let mut chans = Vec::with_capacity(nu + ny);
            for i in 0..nu {
                chans.push(s.period_mean(&format!("u{i}"), m)?);
            }
            for o in 0..ny {
                chans.push(s.period_mean(&format!("y{o}"), m)?);
            }
            per_m.push(chans);
        }
        means.push(per_m);
    }

    let grid = &first.grid;
    let mut lines = Vec::new();
    let mut flagged = Vec::new();
    for &k in &grid.excited_bins {
        let mut estimates = Vec::with_capacity(m_count);
        let mut cond: f64 = 0.0;
        for m in 0..m_count {
            let u = DMatrix::from_fn(nu, nu, |i, e| means[e][m][i][k]);
            let y = DMatrix::from_fn(ny, nu, |o, e| means[e][m][nu + o][k]);
            cond = cond.max(linalg::condition_number(&u));
            match u.clone().try_inverse() {
                Some(inv) => estimates.push(y * inv),
                None => cond = f64::INFINITY,
            }
        }
        if !(cond <= condition_limit) {
            flagged.push(FlaggedBin {
                bin: k,
                reason: FlagReason::IllConditioned,
            });
            continue;
        }
        let mf = m_count as f64;
        let mean = estimates.iter().fold(DMatrix::zeros(ny, nu), |a, g| a + g) / Complex64::new(mf, 0.0);
        let var_total = (m_count >= 2).then(|| {
            (0..ny)
                .map(|o| {
                    (0..nu)
                        .map(|i| {
                            estimates.iter().map(|g| (g[(o, i)] - mean[(o, i)]).norm_sqr()).sum::<f64>()
                                / (mf * (mf - 1.0))
                        })
                        .collect()
                })
                .collect()
        });
        lines.push(MimoLine {
            bin: k,
            frequency: grid.frequency(k),
            g: (0..ny).map(|o| (0..nu).map(|i| mean[(o, i)]).collect()).collect(),
            condition_number: cond,
            var_total,
        });
    }
    Ok(MimoFrf {
        n_inputs: nu,
        n_outputs: ny,
        lines,
        flagged,
    })
}

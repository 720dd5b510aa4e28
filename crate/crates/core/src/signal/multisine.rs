use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::FrequencyGrid;
use crate::dft;
use crate::error::{Error, Result};
use crate::seed;

/// One excited line of a multisine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub bin: usize,
    /// `U_k` in `u(t) = (2/sqrt(N)) sum_k U_k cos(2 pi k t / N + phi_k)`.
    pub amplitude: f64,
    /// `phi_k` in `[0, 2 pi)`.
    pub phase: f64,
}

/// A single random-phase multisine period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultisineRealization {
    pub grid: FrequencyGrid,
    pub lines: Vec<Line>,
    pub seed: u64,
    pub samples: Vec<f64>,
}

/// Unit amplitude on every excited bin.
pub fn flat_profile(grid: &FrequencyGrid) -> BTreeMap<usize, f64> {
    grid.excited_bins.iter().map(|&k| (k, 1.0)).collect()
}

/// Amplitude profile whose line powers follow a one-sided target PSD: the line
/// at bin `k` carries `psd(k f0) * spacing` where `spacing` is the distance to
/// the next excited line of a regular grid (`f0`, or `2 f0` on odd grids).
pub fn profile_from_psd(grid: &FrequencyGrid, psd: impl Fn(f64) -> f64) -> BTreeMap<usize, f64> {
    let spacing = if grid.kind.is_odd() { 2.0 } else { 1.0 } * grid.resolution();
    grid.excited_bins
        .iter()
        .map(|&k| (k, (psd(grid.frequency(k)).max(0.0) * spacing).sqrt()))
        .collect()
}

impl MultisineRealization {
    /// Draws one realization: independent uniform phases on `[0, 2 pi)` for
    /// every excited bin (ascending bin order), then a common scale so that the
    /// time-sample RMS equals `rms_target`.
    ///
    /// Bins of the grid missing from `profile` get zero amplitude.
    pub fn synthesize(
        grid: &FrequencyGrid,
        profile: &BTreeMap<usize, f64>,
        rms_target: f64,
        seed: u64,
    ) -> Result<Self> {
        if grid.excited_bins.is_empty() {
            return Err(Error::InvalidExcitation("grid has no excited bins".into()));
        }
        if !(rms_target > 0.0) || !rms_target.is_finite() {
            return Err(Error::InvalidExcitation(format!(
                "rms_target must be positive, got {rms_target}"
            )));
        }
        for (&k, &a) in profile {
            if a != 0.0 && !grid.is_excited(k) {
                return Err(Error::InvalidExcitation(format!(
                    "amplitude profile has support on non-excited bin {k}"
                )));
            }
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::InvalidExcitation(format!(
                    "amplitude at bin {k} must be finite and non-negative"
                )));
            }
        }
        let mut rng = seed::rng(seed);
        let mut lines: Vec<Line> = grid
            .excited_bins
            .iter()
            .map(|&bin| Line {
                bin,
                amplitude: profile.get(&bin).copied().unwrap_or(0.0),
                phase: rng.random_range(0.0..2.0 * PI),
            })
            .collect();

        let n = grid.n_samples as f64;
        // time-sample mean square: sum over lines of (2/sqrt(N))^2 U^2 / 2
        let mean_square: f64 = lines.iter().map(|l| 2.0 * l.amplitude * l.amplitude / n).sum();
        if mean_square <= 0.0 {
            return Err(Error::InvalidExcitation(
                "amplitude profile is zero on every excited bin".into(),
            ));
        }
        let scale = rms_target / mean_square.sqrt();
        for l in &mut lines {
            l.amplitude *= scale;
        }
        let samples = Self::render(grid, &lines);
        Ok(MultisineRealization {
            grid: grid.clone(),
            lines,
            seed,
            samples,
        })
    }

    /// Builds a realization from explicit lines (amplitudes are used as given).
    pub fn from_lines(grid: &FrequencyGrid, lines: Vec<Line>, seed: u64) -> Result<Self> {
        for l in &lines {
            if l.bin == 0 || l.bin >= grid.n_samples / 2 {
                return Err(Error::InvalidExcitation(format!(
                    "bin {} outside 1..N/2-1",
                    l.bin
                )));
            }
        }
        let samples = Self::render(grid, &lines);
        Ok(MultisineRealization {
            grid: grid.clone(),
            lines,
            seed,
            samples,
        })
    }

    fn render(grid: &FrequencyGrid, lines: &[Line]) -> Vec<f64> {
        let spec = half_spectrum(grid.n_samples, lines);
        dft::irfft(&spec, grid.n_samples)
    }

    /// Expected DFT `sqrt(N) U_k exp(j phi_k)` at bins `0..=N/2`.
    pub fn spectrum(&self) -> Vec<Complex64> {
        half_spectrum(self.grid.n_samples, &self.lines)
    }

    pub fn rms(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Two-sided line magnitudes `|X(k)| / N` of the excited bins, i.e. the
    /// amplitude of `exp(j 2 pi k t / N)` in the time signal.
    pub fn line_magnitudes(&self) -> BTreeMap<usize, f64> {
        let n = self.grid.n_samples as f64;
        self.lines.iter().map(|l| (l.bin, l.amplitude / n.sqrt())).collect()
    }

    /// The samples repeated `periods` times.
    pub fn repeated(&self, periods: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.samples.len() * periods);
        for _ in 0..periods {
            out.extend_from_slice(&self.samples);
        }
        out
    }
}

fn half_spectrum(n: usize, lines: &[Line]) -> Vec<Complex64> {
    let mut spec = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
    let root_n = (n as f64).sqrt();
    for l in lines {
        spec[l.bin] = Complex64::from_polar(root_n * l.amplitude, l.phase);
    }
    spec
}

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft;
use crate::error::{Error, Result};

/// Forced Duffing oscillator `m y'' + c y' + k1 y + k3 y^3 = u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuffingParams {
    pub mass: f64,
    pub damping: f64,
    pub k_linear: f64,
    pub k_cubic: f64,
    #[serde(default = "default_oversample")]
    pub oversample_factor: usize,
    #[serde(default = "default_bound")]
    pub divergence_bound: f64,
}

fn default_oversample() -> usize {
    8
}

fn default_bound() -> f64 {
    1e6
}

impl Default for DuffingParams {
    /// Unit static gain, 65 Hz resonance, damping ratio 0.05, hardening spring.
    fn default() -> Self {
        Self::from_modal(65.0, 0.05, 1.0, 2.0)
    }
}

impl DuffingParams {
    /// Parameters from a resonance frequency (Hz), damping ratio, static gain
    /// `1/k1`, and cubic stiffness.
    pub fn from_modal(f_res: f64, zeta: f64, static_gain: f64, k_cubic: f64) -> Self {
        let wn = 2.0 * PI * f_res;
        let k_linear = 1.0 / static_gain;
        let mass = k_linear / (wn * wn);
        DuffingParams {
            mass,
            damping: 2.0 * zeta * wn * mass,
            k_linear,
            k_cubic,
            oversample_factor: default_oversample(),
            divergence_bound: default_bound(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.damping > 0.0 && self.k_linear > 0.0) {
            return Err(Error::InvalidArgument(
                "duffing mass, damping and k_linear must be positive".into(),
            ));
        }
        if self.oversample_factor < 4 {
            return Err(Error::InvalidArgument(
                "duffing oversample_factor must be >= 4".into(),
            ));
        }
        Ok(())
    }

    pub fn natural_frequency(&self) -> f64 {
        (self.k_linear / self.mass).sqrt() / (2.0 * PI)
    }

    /// Frequency response of the linearized oscillator (`k3 = 0`) at `f` Hz.
    pub fn linear_response(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        Complex64::new(self.k_linear - self.mass * w * w, self.damping * w).inv()
    }

    fn accel(&self, y: f64, v: f64, u: f64) -> f64 {
        (u - self.damping * v - self.k_linear * y - self.k_cubic * y * y * y) / self.mass
    }

    /// One RK4 step of length `h` with input values at the start, midpoint and end.
    fn rk4(&self, y: f64, v: f64, u0: f64, um: f64, u1: f64, h: f64) -> (f64, f64) {
        let k1y = v;
        let k1v = self.accel(y, v, u0);
        let k2y = v + 0.5 * h * k1v;
        let k2v = self.accel(y + 0.5 * h * k1y, k2y, um);
        let k3y = v + 0.5 * h * k2v;
        let k3v = self.accel(y + 0.5 * h * k2y, k3y, um);
        let k4y = v + h * k3v;
        let k4v = self.accel(y + h * k3y, k4y, u1);
        (
            y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }

    /// Integrates from rest with fixed-step RK4 at `sample_rate * oversample_factor`
    /// and returns `y` at the input sample instants.
    ///
    /// The input is treated as one period of a periodic signal and
    /// interpolated band-limited between samples, so a multisine input is
    /// reproduced exactly at the intermediate RK4 stages.
    pub fn simulate(&self, u: &[f64], sample_rate: f64) -> Result<Vec<f64>> {
        self.validate()?;
        let osf = self.oversample_factor;
        let fine = dft::upsample_periodic(u, 2 * osf);
        let len = fine.len();
        let h = 1.0 / (sample_rate * osf as f64);
        let (mut y, mut v) = (0.0, 0.0);
        let mut out = Vec::with_capacity(u.len());
        for (t, _) in u.iter().enumerate() {
            out.push(y);
            for s in 0..osf {
                let i = 2 * (t * osf + s);
                let (u0, um, u1) = (fine[i], fine[i + 1], fine[(i + 2) % len]);
                (y, v) = self.rk4(y, v, u0, um, u1, h);
            }
            if !y.is_finite() || y.abs() > self.divergence_bound {
                return Err(Error::Diverged {
                    sample: t + 1,
                    magnitude: y.abs(),
                    bound: self.divergence_bound,
                });
            }
        }
        Ok(out)
    }

    pub fn stepper(&self, sample_rate: f64) -> DuffingState {
        DuffingState {
            params: self.clone(),
            h: 1.0 / (sample_rate * self.oversample_factor as f64),
            y: 0.0,
            v: 0.0,
        }
    }
}

/// Sample-by-sample integration with the input held constant over each
/// sample interval, for use inside feedback loops.
#[derive(Debug, Clone)]
pub struct DuffingState {
    params: DuffingParams,
    h: f64,
    y: f64,
    v: f64,
}

impl DuffingState {
    /// Returns `y(t)` and advances the state to `t + 1` under input `u(t)`.
    pub fn step(&mut self, u: f64) -> f64 {
        let out = self.y;
        for _ in 0..self.params.oversample_factor {
            (self.y, self.v) = self.params.rk4(self.y, self.v, u, u, u, self.h);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{flat_profile, FrequencyGrid, GridKind, MultisineRealization};

    fn excitation(rms: f64, seed: u64) -> MultisineRealization {
        let g = FrequencyGrid::build(1220.0, 1024, 1.0, 200.0, GridKind::Odd, 0).unwrap();
        MultisineRealization::synthesize(&g, &flat_profile(&g), rms, seed).unwrap()
    }

    #[test]
    fn linear_limit_matches_analytic_response() {
        let p = DuffingParams {
            k_cubic: 0.0,
            ..DuffingParams::default()
        };
        let ms = excitation(1.0, 3);
        let n = ms.grid.n_samples;
        let y = p.simulate(&ms.repeated(3), 1220.0).unwrap();
        let spec_y = dft::rfft(&y[2 * n..]);
        let spec_u = ms.spectrum();
        for &k in &ms.grid.excited_bins {
            let h = p.linear_response(ms.grid.frequency(k));
            let g = spec_y[k] / spec_u[k];
            assert!((g - h).norm() < 1e-6 * h.norm(), "bin {k}: {g} vs {h}");
        }
    }

    #[test]
    fn step_halving_converges() {
        let ms = excitation(0.05, 1);
        let p = DuffingParams::default();
        let half = DuffingParams {
            oversample_factor: 16,
            ..p.clone()
        };
        let a = p.simulate(&ms.repeated(2), 1220.0).unwrap();
        let b = half.simulate(&ms.repeated(2), 1220.0).unwrap();
        let n = ms.grid.n_samples;
        let diff: f64 = a[n..].iter().zip(&b[n..]).map(|(x, y)| (x - y).powi(2)).sum();
        let norm: f64 = b[n..].iter().map(|x| x * x).sum();
        let rel = (diff / norm).sqrt();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn divergence_is_reported() {
        let p = DuffingParams {
            k_cubic: -50.0,
            ..DuffingParams::default()
        };
        let ms = excitation(2.0, 0);
        match p.simulate(&ms.repeated(2), 1220.0) {
            Err(Error::Diverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = DuffingParams {
            oversample_factor: 2,
            ..DuffingParams::default()
        };
        assert!(p.simulate(&[0.0; 8], 100.0).is_err());
        let p = DuffingParams {
            mass: 0.0,
            ..DuffingParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn stepper_tracks_periodic_solution_for_slow_input() {
        // ZOH stepping differs from the band-limited path only by O(h) input error
        let p = DuffingParams::default();
        let fs = 1220.0;
        let u: Vec<f64> = (0..2048).map(|t| 0.3 * (2.0 * PI * 2.0 * t as f64 / fs).sin()).collect();
        let a = p.simulate(&u, fs).unwrap();
        let mut st = p.stepper(fs);
        let b: Vec<f64> = u.iter().map(|&x| st.step(x)).collect();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let peak = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(err < 0.05 * peak, "{err} vs {peak}");
    }
}

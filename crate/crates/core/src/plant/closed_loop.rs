use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lti::{self, LtiFilter};
use super::noise::NoiseSpec;
use super::poly::StaticPolynomial;
use super::Plant;
use crate::error::{Error, Result};

/// Plant `G` in a negative feedback loop with controller `C`:
///
/// `u(t) = g r(t) - f_c( (C y)(t - 1) )`, `y(t) = G(u)(t) + v(t)`
///
/// The one-sample delay in the feedback path makes the loop computable
/// sample by sample. All closed-loop oracles use the effective controller
/// `C q^-1` returned by [`ClosedLoopScenario::effective_controller`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopScenario {
    pub plant: Plant,
    pub controller: LtiFilter,
    /// Optional static nonlinearity applied to the controller output.
    #[serde(default)]
    pub controller_nonlinearity: Option<StaticPolynomial>,
    #[serde(default = "one")]
    pub reference_gain: f64,
    #[serde(default = "default_bound")]
    pub divergence_bound: f64,
}

fn one() -> f64 {
    1.0
}

fn default_bound() -> f64 {
    1e6
}

impl ClosedLoopScenario {
    /// Checks that the linearized loop `1 + G C q^-1` is stable when the plant
    /// has a discrete-time linear part.
    pub fn new(plant: Plant, controller: LtiFilter) -> Result<Self> {
        let s = ClosedLoopScenario {
            plant,
            controller,
            controller_nonlinearity: None,
            reference_gain: 1.0,
            divergence_bound: default_bound(),
        };
        s.check_stability()?;
        Ok(s)
    }

    pub fn with_controller_nonlinearity(mut self, f: StaticPolynomial) -> Result<Self> {
        self.controller_nonlinearity = Some(f);
        self.check_stability()?;
        Ok(self)
    }

    pub fn check_stability(&self) -> Result<()> {
        let Some(g) = self.plant.linear_part() else {
            return Ok(());
        };
        let c = self.effective_controller();
        // (A_g A_c + B_g B_c) in powers of q^-1
        let chi = lti::poly_add(
            &lti::poly_mul(g.denominator(), c.denominator()),
            &lti::poly_mul(g.numerator(), c.numerator()),
        );
        if chi[0] == 0.0 {
            return Err(Error::InvalidFilter("ill-posed loop".into()));
        }
        let normalized: Vec<f64> = chi.iter().map(|x| x / chi[0]).collect();
        if !lti::is_schur_stable(&normalized) {
            return Err(Error::InvalidFilter(
                "linearized closed loop 1 + G C is unstable".into(),
            ));
        }
        Ok(())
    }

    /// `C q^-1`, scaled by the linear gain of the controller nonlinearity.
    pub fn effective_controller(&self) -> LtiFilter {
        let gain = self
            .controller_nonlinearity
            .as_ref()
            .map_or(1.0, |f| f.linear_gain());
        self.controller
            .cascade(&LtiFilter::delay(1))
            .cascade(&LtiFilter::gain(gain))
    }

    pub fn controller_response(&self, bin: usize, n: usize) -> Complex64 {
        self.effective_controller().response_at_bin(bin, n)
    }
}

/// Runs the loop from rest. `r` is the unscaled reference; the returned
/// triple is `(g r, u, y)`. `noise_stream` selects the disturbance stream.
pub fn simulate_closed_loop(
    scenario: &ClosedLoopScenario,
    r: &[f64],
    noise: &NoiseSpec,
    sample_rate: f64,
    noise_stream: u64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let v = noise.generate(r.len(), noise_stream);
    let mut plant = scenario.plant.stepper(sample_rate);
    let mut controller = scenario.controller.state();
    let mut y_prev = 0.0;
    let mut rs = Vec::with_capacity(r.len());
    let mut us = Vec::with_capacity(r.len());
    let mut ys = Vec::with_capacity(r.len());
    for (t, (&rt, &vt)) in r.iter().zip(&v).enumerate() {
        let mut feedback = controller.step(y_prev);
        if let Some(f) = &scenario.controller_nonlinearity {
            feedback = f.eval(feedback);
        }
        let reference = scenario.reference_gain * rt;
        let u = reference - feedback;
        let y = plant.step(u) + vt;
        if !y.is_finite() || y.abs() > scenario.divergence_bound {
            return Err(Error::Diverged {
                sample: t,
                magnitude: y.abs(),
                bound: scenario.divergence_bound,
            });
        }
        rs.push(reference);
        us.push(u);
        ys.push(y);
        y_prev = y;
    }
    Ok((rs, us, ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft;
    use crate::signal::{flat_profile, FrequencyGrid, GridKind, MultisineRealization};

    fn plant() -> Plant {
        Plant::Lti {
            filter: LtiFilter::new(vec![0.0, 0.5], vec![1.0, -0.6]).unwrap(),
        }
    }

    fn reference(periods: usize) -> MultisineRealization {
        let g = FrequencyGrid::build(100.0, 256, 1.0, 40.0, GridKind::Odd, 0).unwrap();
        let ms = MultisineRealization::synthesize(&g, &flat_profile(&g), 1.0, 5).unwrap();
        let _ = periods;
        ms
    }

    #[test]
    fn zero_controller_is_open_loop() {
        let s = ClosedLoopScenario::new(plant(), LtiFilter::gain(0.0)).unwrap();
        let r = reference(1).repeated(2);
        let (_, u, y) = simulate_closed_loop(&s, &r, &NoiseSpec::none(), 100.0, 0).unwrap();
        assert_eq!(u, r);
        let open = plant().simulate(&r, 100.0, false).unwrap();
        assert_eq!(y, open);
    }

    #[test]
    fn steady_state_matches_complementary_sensitivity() {
        let c = LtiFilter::new(vec![0.8, -0.2], vec![1.0]).unwrap();
        let s = ClosedLoopScenario::new(plant(), c).unwrap();
        let ms = reference(1);
        let n = ms.grid.n_samples;
        let periods = 30;
        let (_, _, y) =
            simulate_closed_loop(&s, &ms.repeated(periods), &NoiseSpec::none(), 100.0, 0).unwrap();
        let yk = dft::rfft(&y[(periods - 1) * n..]);
        let rk = ms.spectrum();
        let Plant::Lti { filter: g } = plant() else { unreachable!() };
        for &k in &ms.grid.excited_bins {
            let gk = g.response_at_bin(k, n);
            let ck = s.controller_response(k, n);
            let expected = gk / (1.0 + gk * ck);
            let got = yk[k] / rk[k];
            assert!((got - expected).norm() < 1e-8 * expected.norm(), "bin {k}");
        }
    }

    #[test]
    fn rejects_unstable_loop() {
        let c = LtiFilter::gain(5.0);
        assert!(ClosedLoopScenario::new(plant(), c).is_err());
    }

    #[test]
    fn noise_only_loop_has_input_sensitivity() {
        // U/V = -C/(1+GC), checked through cross-spectra over periods
        let c = LtiFilter::gain(0.7);
        let s = ClosedLoopScenario::new(plant(), c).unwrap();
        let n = 256;
        let periods = 400;
        let r = vec![0.0; n * periods];
        let noise = NoiseSpec::white(1.0, 3);
        let (_, u, _) = simulate_closed_loop(&s, &r, &noise, 100.0, 0).unwrap();
        let v = noise.generate(n * periods, 0);
        let Plant::Lti { filter: g } = plant() else { unreachable!() };
        let mut s_uv = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
        let mut s_vv = vec![0.0; n / 2 + 1];
        for p in 1..periods {
            let uk = dft::rfft(&u[p * n..(p + 1) * n]);
            let vk = dft::rfft(&v[p * n..(p + 1) * n]);
            for k in 0..=n / 2 {
                s_uv[k] += uk[k] * vk[k].conj();
                s_vv[k] += vk[k].norm_sqr();
            }
        }
        for k in (5..n / 2).step_by(17) {
            let gk = g.response_at_bin(k, n);
            let ck = s.controller_response(k, n);
            let expected = -ck / (1.0 + gk * ck);
            let got = s_uv[k] / s_vv[k];
            assert!((got - expected).norm() < 0.15 * expected.norm(), "bin {k}: {got} vs {expected}");
        }
    }
}

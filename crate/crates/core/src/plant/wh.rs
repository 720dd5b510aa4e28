use serde::{Deserialize, Serialize};

use super::lti::LtiFilter;
use super::poly::StaticPolynomial;

/// Front filter `R`, static nonlinearity `f`, back filter `S`, in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerHammerstein {
    pub front: LtiFilter,
    pub nonlinearity: StaticPolynomial,
    pub back: LtiFilter,
}

impl WienerHammerstein {
    pub fn new(front: LtiFilter, nonlinearity: StaticPolynomial, back: LtiFilter) -> Self {
        WienerHammerstein {
            front,
            nonlinearity,
            back,
        }
    }

    pub fn simulate(&self, u: &[f64], assume_periodic: bool) -> Vec<f64> {
        let x = self.front.simulate(u, assume_periodic);
        let z = self.nonlinearity.apply(&x);
        self.back.simulate(&z, assume_periodic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft;
    use std::f64::consts::PI;

    fn tone(n: usize, k: usize) -> Vec<f64> {
        (0..n).map(|t| (2.0 * PI * k as f64 * t as f64 / n as f64).cos()).collect()
    }

    #[test]
    fn identity_filters_reduce_to_static() {
        let poly = StaticPolynomial::new(vec![1.0, 0.3, -0.2]).unwrap();
        let wh = WienerHammerstein::new(LtiFilter::identity(), poly.clone(), LtiFilter::identity());
        let u = tone(32, 3);
        let a = wh.simulate(&u, true);
        let b = poly.apply(&u);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_nonlinearity_reduces_to_cascade() {
        let r = LtiFilter::new(vec![0.5], vec![1.0, -0.5]).unwrap();
        let s = LtiFilter::new(vec![1.0, 1.0], vec![1.0, 0.2]).unwrap();
        let wh = WienerHammerstein::new(r.clone(), StaticPolynomial::identity(), s.clone());
        let u: Vec<f64> = (0..40).map(|t| ((t * 13 % 7) as f64) - 3.0).collect();
        let a = wh.simulate(&u, false);
        let b = r.cascade(&s).filter(&u);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_single_tone_fills_first_and_third_harmonic() {
        let n = 64;
        let wh = WienerHammerstein::new(
            LtiFilter::identity(),
            StaticPolynomial::monomial(3, 1.0),
            LtiFilter::identity(),
        );
        let spec = dft::rfft(&wh.simulate(&tone(n, 2), true));
        // cos^3 = 3/4 cos + 1/4 cos 3x  -> lines N/2 * 3/4 and N/2 * 1/4
        assert!((spec[2].re - 0.75 * n as f64 / 2.0).abs() < 1e-10);
        assert!((spec[6].re - 0.25 * n as f64 / 2.0).abs() < 1e-10);
        for (k, c) in spec.iter().enumerate() {
            if k != 2 && k != 6 {
                assert!(c.norm() < 1e-10);
            }
        }
    }
}

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::moments::GaussianMoments;
use crate::error::{Error, Result};
use crate::plant::{LtiFilter, StaticPolynomial};

/// `a_BLA = sum_a c_a mu_{a+1} / mu_2` for a zero-mean Gaussian input.
pub fn theoretical_bla_static(poly: &StaticPolynomial, std_dev: f64) -> Result<f64> {
    let mu = GaussianMoments::new(std_dev, poly.degree() + 1)?;
    Ok(poly
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| c * mu.get(i + 2))
        .sum::<f64>()
        / mu.get(2))
}

/// Which filter's gain enters the magnitude-squared factors of the cubic
/// Wiener-Hammerstein BLA.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeFilter {
    /// The filter in front of the cubic (the branch signal).
    #[default]
    Front,
    /// The filter behind the cubic, as some printed versions write it.
    Back,
}

/// BLA of `S(q) f(R(q) u)` with `f(x) = x^3` for a multisine with the given
/// lines. `lines` maps excited bin to `|U(k)|`, the two-sided line magnitude
/// `|DFT| / N`:
///
/// `G(k) = S(k) R(k) (6 sum_l |H(l)|^2 |U(l)|^2 - 3 |H(k)|^2 |U(k)|^2)`
///
/// with `H = R` or `H = S` per `placement`.
pub fn theoretical_bla_wh_cubic(
    front: &LtiFilter,
    back: &LtiFilter,
    lines: &BTreeMap<usize, f64>,
    n_samples: usize,
    placement: MagnitudeFilter,
) -> Result<BTreeMap<usize, Complex64>> {
    if lines.is_empty() {
        return Err(Error::InvalidExcitation("no excited lines (F = 0)".into()));
    }
    let h = |k: usize| match placement {
        MagnitudeFilter::Front => front.response_at_bin(k, n_samples),
        MagnitudeFilter::Back => back.response_at_bin(k, n_samples),
    };
    let total: f64 = lines.iter().map(|(&l, &a)| h(l).norm_sqr() * a * a).sum();
    Ok(lines
        .iter()
        .map(|(&k, &a)| {
            let sr = back.response_at_bin(k, n_samples) * front.response_at_bin(k, n_samples);
            (k, sr * (6.0 * total - 3.0 * h(k).norm_sqr() * a * a))
        })
        .collect())
}

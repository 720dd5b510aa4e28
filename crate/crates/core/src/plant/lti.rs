use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft;
use crate::error::{Error, Result};

/// Stable discrete-time transfer function in the delay operator `q^-1`:
///
/// `H(q) = (b_0 + b_1 q^-1 + ... ) / (1 + a_1 q^-1 + ...)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtiFilter {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl LtiFilter {
    /// Normalizes the denominator to a leading 1 and rejects unstable filters.
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        let mut den = denominator;
        while den.len() > 1 && *den.last().unwrap() == 0.0 {
            den.pop();
        }
        let lead = den.first().copied().unwrap_or(0.0);
        if lead == 0.0 {
            return Err(Error::InvalidFilter(
                "denominator constant term must be nonzero".into(),
            ));
        }
        if numerator.is_empty() {
            return Err(Error::InvalidFilter("empty numerator".into()));
        }
        if numerator.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient".into()));
        }
        let num: Vec<f64> = numerator.iter().map(|b| b / lead).collect();
        let den: Vec<f64> = den.iter().map(|a| a / lead).collect();
        if !is_schur_stable(&den) {
            return Err(Error::InvalidFilter(format!(
                "denominator {den:?} has a pole on or outside the unit circle"
            )));
        }
        Ok(LtiFilter {
            numerator: num,
            denominator: den,
        })
    }

    pub fn identity() -> Self {
        Self::gain(1.0)
    }

    pub fn gain(g: f64) -> Self {
        LtiFilter {
            numerator: vec![g],
            denominator: vec![1.0],
        }
    }

    /// Pure delay of `d` samples.
    pub fn delay(d: usize) -> Self {
        let mut numerator = vec![0.0; d + 1];
        numerator[d] = 1.0;
        LtiFilter {
            numerator,
            denominator: vec![1.0],
        }
    }

    pub fn numerator(&self) -> &[f64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    /// Series connection `self * other`.
    pub fn cascade(&self, other: &LtiFilter) -> LtiFilter {
        LtiFilter {
            numerator: poly_mul(&self.numerator, &other.numerator),
            denominator: poly_mul(&self.denominator, &other.denominator),
        }
    }

    /// `H` evaluated at `z` (a point on the unit circle for frequency responses).
    pub fn response(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        eval_poly(&self.numerator, zi) / eval_poly(&self.denominator, zi)
    }

    pub fn response_at_bin(&self, bin: usize, n: usize) -> Complex64 {
        self.response(dft::bin_to_z(bin, n))
    }

    /// Difference-equation response from zero initial state (transposed direct form II).
    pub fn filter(&self, u: &[f64]) -> Vec<f64> {
        let mut state = self.state();
        u.iter().map(|&x| state.step(x)).collect()
    }

    /// Steady-state response of a periodic input whose period is `u.len()`,
    /// computed by multiplying the DFT with `H` at each bin.
    pub fn filter_periodic(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let mut spec = dft::rfft(u);
        for (k, x) in spec.iter_mut().enumerate() {
            *x *= self.response_at_bin(k, n);
        }
        dft::irfft(&spec, n)
    }

    pub fn simulate(&self, u: &[f64], assume_periodic: bool) -> Vec<f64> {
        if assume_periodic {
            self.filter_periodic(u)
        } else {
            self.filter(u)
        }
    }

    pub fn state(&self) -> LtiState {
        let order = self.numerator.len().max(self.denominator.len());
        LtiState {
            b: pad(&self.numerator, order),
            a: pad(&self.denominator, order),
            z: vec![0.0; order.saturating_sub(1)],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.numerator == [1.0] && self.denominator == [1.0]
    }
}

/// Running state of an [`LtiFilter`].
#[derive(Debug, Clone)]
pub struct LtiState {
    b: Vec<f64>,
    a: Vec<f64>,
    z: Vec<f64>,
}

impl LtiState {
    pub fn step(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.z.first().copied().unwrap_or(0.0);
        let m = self.z.len();
        for i in 0..m {
            let next = if i + 1 < m { self.z[i + 1] } else { 0.0 };
            self.z[i] = next + self.b[i + 1] * x - self.a[i + 1] * y;
        }
        y
    }
}

fn pad(c: &[f64], len: usize) -> Vec<f64> {
    let mut v = c.to_vec();
    v.resize(len, 0.0);
    v
}

pub(crate) fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn eval_poly(c: &[f64], x: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * x + ci)
}

/// Schur-Cohn step-down test: all roots of `1 + a_1 z^-1 + ... + a_n z^-n`
/// strictly inside the unit circle. Expects `a[0] == 1`.
pub fn is_schur_stable(a: &[f64]) -> bool {
    let mut cur: Vec<f64> = a.to_vec();
    while cur.len() > 1 && *cur.last().unwrap() == 0.0 {
        cur.pop();
    }
    while cur.len() > 1 {
        let m = cur.len() - 1;
        let k = cur[m] / cur[0];
        if !(k.abs() < 1.0) {
            return false;
        }
        let mut next = vec![0.0; m];
        for i in 0..m {
            next[i] = (cur[i] - k * cur[m - i]) / (1.0 - k * k);
        }
        cur = next;
        while cur.len() > 1 && *cur.last().unwrap() == 0.0 {
            cur.pop();
        }
    }
    true
}

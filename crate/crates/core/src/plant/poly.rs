use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `y = sum_{a=1..n} c_a u^a`, stored as `[c_1, ..., c_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StaticPolynomial {
    coefficients: Vec<f64>,
}

impl StaticPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs degree >= 1".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
        }
        Ok(StaticPolynomial { coefficients })
    }

    pub fn identity() -> Self {
        StaticPolynomial {
            coefficients: vec![1.0],
        }
    }

    /// `c u^degree`
    pub fn monomial(degree: usize, c: f64) -> Self {
        assert!(degree >= 1);
        let mut coefficients = vec![0.0; degree];
        coefficients[degree - 1] = c;
        StaticPolynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn linear_gain(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| (acc + c) * u)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * u + (i + 1) as f64 * c)
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&x| self.eval(x)).collect()
    }
}

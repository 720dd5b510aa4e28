use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moments `mu_a = E[x^a]` of a zero-mean Gaussian with standard deviation `std_dev`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub std_dev: f64,
    /// `moments[a]` for `a = 0..=max_order`.
    pub moments: Vec<f64>,
}

impl GaussianMoments {
    /// Closed form `(a-1)!! sigma^a` for even `a`, zero for odd `a`. Each
    /// moment is cross-checked against a numerical quadrature of the density.
    pub fn new(std_dev: f64, max_order: usize) -> Result<Self> {
        if !(std_dev > 0.0 && std_dev.is_finite()) {
            return Err(Error::InvalidArgument("std_dev must be positive".into()));
        }
        let mut moments = Vec::with_capacity(max_order + 1);
        for a in 0..=max_order {
            let m = if a % 2 == 1 {
                0.0
            } else {
                let dfact: f64 = (1..a).step_by(2).map(|x| x as f64).product();
                dfact * std_dev.powi(a as i32)
            };
            let q = quadrature(std_dev, a);
            let scale = std_dev.powi(a as i32) * (1..=a.max(1)).map(|x| x as f64).product::<f64>().sqrt();
            if (m - q).abs() > 1e-9 * scale {
                return Err(Error::InvalidArgument(format!(
                    "moment {a}: closed form {m} disagrees with quadrature {q}"
                )));
            }
            moments.push(m);
        }
        Ok(GaussianMoments { std_dev, moments })
    }

    pub fn get(&self, order: usize) -> f64 {
        self.moments[order]
    }
}

/// Composite Simpson rule for `E[x^a]` over `+-(12 + sqrt(a)) sigma`.
fn quadrature(std_dev: f64, a: usize) -> f64 {
    let half = (12.0 + (a as f64).sqrt() * 2.0) * std_dev;
    let n = 4000;
    let h = 2.0 * half / n as f64;
    let norm = 1.0 / (std_dev * (2.0 * std::f64::consts::PI).sqrt());
    let f = |x: f64| x.powi(a as i32) * norm * (-0.5 * (x / std_dev).powi(2)).exp();
    let mut s = f(-half) + f(half);
    for i in 1..n {
        let x = -half + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

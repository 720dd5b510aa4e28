use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::FrfEstimate;

pub const COVARIANCE_VALIDITY: &str = "unreliable under nonlinear distortions";

/// `G(z) = (b_0 + b_1 z^-1 + ...) / (1 + a_1 z^-1 + ...)` with `z = exp(j 2 pi f / fs)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalModel {
    pub numerator: Vec<f64>,
    /// Starts with the fixed constant term 1.
    pub denominator: Vec<f64>,
}

impl RationalModel {
    pub fn n_parameters(&self) -> usize {
        self.numerator.len() + self.denominator.len() - 1
    }

    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        poly_eval(&self.numerator, z_inv) / poly_eval(&self.denominator, z_inv)
    }

    pub fn response_at(&self, frequency: f64, sample_rate: f64) -> Complex64 {
        self.response(z_inv(frequency, sample_rate))
    }

    /// Parameter vector `[b_0.., a_1..]`.
    pub fn parameters(&self) -> Vec<f64> {
        self.numerator.iter().chain(&self.denominator[1..]).copied().collect()
    }

    fn from_parameters(theta: &[f64], n_b: usize) -> Self {
        let mut denominator = vec![1.0];
        denominator.extend_from_slice(&theta[n_b..]);
        RationalModel {
            numerator: theta[..n_b].to_vec(),
            denominator,
        }
    }

    fn parameter_name(i: usize, n_b: usize) -> String {
        if i < n_b {
            format!("b{i}")
        } else {
            format!("a{}", i - n_b + 1)
        }
    }
}

fn z_inv(frequency: f64, sample_rate: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * frequency / sample_rate)
}

fn poly_eval(c: &[f64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * x + ci)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "values")]
pub enum Weighting {
    /// Every bin weighted 1.
    Unit,
    /// `1 / sigma_G` from the estimate's total variance, or its noise
    /// variance when no total is available.
    Variance,
    /// Explicit `1 / sigma` per FRF line.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub weighting: Weighting,
    pub max_iterations: usize,
    /// Stop when the relative cost decrease of an accepted step falls below this.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            weighting: Weighting::Variance,
            max_iterations: 200,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    /// Linear-theory parameter covariance, ordered as [`RationalModel::parameters`].
    pub matrix: Vec<Vec<f64>>,
    pub validity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResidual {
    pub bin: usize,
    pub frequency: f64,
    /// `|G_hat - G_model| * weight`
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: RationalModel,
    /// `sum_k w_k^2 |G_hat(k) - G(k)|^2`
    pub final_cost: f64,
    pub iterations: usize,
    /// Cost after initialization and after every accepted step.
    pub cost_history: Vec<f64>,
    pub covariance: Covariance,
    pub residuals: Vec<FitResidual>,
}

struct Problem {
    g: Vec<Complex64>,
    z: Vec<Complex64>,
    w: Vec<f64>,
    n_b: usize,
    n_a: usize,
}

impl Problem {
    fn n_par(&self) -> usize {
        self.n_b + self.n_a
    }

    fn residuals(&self, theta: &[f64]) -> DVector<f64> {
        let m = RationalModel::from_parameters(theta, self.n_b);
        let mut r = DVector::zeros(2 * self.g.len());
        for (i, ((g, z), w)) in self.g.iter().zip(&self.z).zip(&self.w).enumerate() {
            let e = (g - m.response(*z)) * *w;
            r[2 * i] = e.re;
            r[2 * i + 1] = e.im;
        }
        r
    }

    fn jacobian(&self, theta: &[f64]) -> DMatrix<f64> {
        let m = RationalModel::from_parameters(theta, self.n_b);
        let mut j = DMatrix::zeros(2 * self.g.len(), self.n_par());
        for (i, (z, w)) in self.z.iter().zip(&self.w).enumerate() {
            let num = poly_eval(&m.numerator, *z);
            let den = poly_eval(&m.denominator, *z);
            for p in 0..self.n_par() {
                // d(-N/D)/d theta
                let d = if p < self.n_b {
                    -z.powu(p as u32) / den
                } else {
                    num * z.powu((p - self.n_b + 1) as u32) / (den * den)
                } * *w;
                j[(2 * i, p)] = d.re;
                j[(2 * i + 1, p)] = d.im;
            }
        }
        j
    }

    /// Weighted linear least squares on `D G_hat - N = 0`.
    fn levy(&self) -> Result<Vec<f64>> {
        let rows = 2 * self.g.len();
        let mut a = DMatrix::zeros(rows, self.n_par());
        let mut rhs = DVector::zeros(rows);
        for (i, ((g, z), w)) in self.g.iter().zip(&self.z).zip(&self.w).enumerate() {
            for p in 0..self.n_par() {
                let v = if p < self.n_b {
                    -z.powu(p as u32)
                } else {
                    g * z.powu((p - self.n_b + 1) as u32)
                } * *w;
                a[(2 * i, p)] = v.re;
                a[(2 * i + 1, p)] = v.im;
            }
            let v = -g * *w;
            rhs[2 * i] = v.re;
            rhs[2 * i + 1] = v.im;
        }
        let (a, scale) = scale_columns(a);
        check_rank(&a, self.n_b)?;
        let sol = a
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::InvalidArgument(format!("initializer solve failed: {e}")))?;
        Ok(sol.iter().zip(&scale).map(|(x, s)| x * s).collect())
    }
}

fn scale_columns(mut a: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let mut scale = Vec::with_capacity(a.ncols());
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        let s = if n > 0.0 { 1.0 / n } else { 1.0 };
        col *= s;
        scale.push(s);
    }
    (a, scale)
}

/// Fails naming the parameter combinations spanning the numerical null space.
fn check_rank(a: &DMatrix<f64>, n_b: usize) -> Result<()> {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested v_t");
    let max = svd.singular_values.max();
    let mut directions = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if !(s > 1e-10 * max) {
            let row = v_t.row(i);
            let terms: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, c)| c.abs() > 0.1)
                .map(|(p, c)| format!("{c:+.3}*{}", RationalModel::parameter_name(p, n_b)))
                .collect();
            directions.push(format!("[{}]", terms.join(" ")));
        }
    }
    if directions.is_empty() {
        Ok(())
    } else {
        Err(Error::RankDeficient(directions.join(", ")))
    }
}

fn weights(frf: &FrfEstimate, w: &Weighting) -> Result<Vec<f64>> {
    let out: Vec<f64> = match w {
        Weighting::Unit => vec![1.0; frf.lines.len()],
        Weighting::Explicit(v) => {
            if v.len() != frf.lines.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} weights for {} FRF lines",
                    v.len(),
                    frf.lines.len()
                )));
            }
            v.clone()
        }
        Weighting::Variance => frf
            .lines
            .iter()
            .map(|l| {
                let var = l.var_total.or(l.var_noise).ok_or_else(|| {
                    Error::InvalidArgument(format!("bin {} has no variance for weighting", l.bin))
                })?;
                if !(var > 0.0 && var.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "bin {} has non-positive variance {var}",
                        l.bin
                    )));
                }
                Ok(1.0 / var.sqrt())
            })
            .collect::<Result<_>>()?,
    };
    if out.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
    }
    if out.iter().all(|&w| w == 0.0) {
        return Err(Error::InvalidArgument("all weights are zero".into()));
    }
    Ok(out)
}

/// Fits a rational model of orders `n_num` / `n_den` to the FRF by
/// minimizing the weighted cost with Levenberg-Marquardt steps started from
/// the linearized (equation-error) solution.
pub fn fit_frf(frf: &FrfEstimate, n_num: usize, n_den: usize, options: &FitOptions) -> Result<FitResult> {
    let n_par = n_num + 1 + n_den;
    if frf.lines.len() < n_par {
        return Err(Error::InvalidArgument(format!(
            "{} FRF lines cannot determine {n_par} parameters",
            frf.lines.len()
        )));
    }
    let problem = Problem {
        g: frf.lines.iter().map(|l| l.g).collect(),
        z: frf.lines.iter().map(|l| z_inv(l.frequency, frf.sample_rate)).collect(),
        w: weights(frf, &options.weighting)?,
        n_b: n_num + 1,
        n_a: n_den,
    };

    let mut theta = problem.levy()?;
    let mut r = problem.residuals(&theta);
    let mut cost = r.norm_squared();
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < options.max_iterations && cost > 0.0 {
        iterations += 1;
        let j = problem.jacobian(&theta);
        let jtj = j.transpose() * &j;
        let grad = j.transpose() * &r;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut lhs = jtj.clone();
            for p in 0..n_par {
                lhs[(p, p)] += lambda * jtj[(p, p)].max(1e-300);
            }
            let Some(step) = lhs.cholesky().map(|c| c.solve(&(-&grad))) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            let r_trial = problem.residuals(&trial);
            let c_trial = r_trial.norm_squared();
            if c_trial.is_finite() && c_trial < cost {
                let decrease = (cost - c_trial) / cost;
                theta = trial;
                r = r_trial;
                cost = c_trial;
                history.push(cost);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if decrease < options.tolerance {
                    lambda = f64::INFINITY;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || lambda.is_infinite() {
            break;
        }
    }

    let j = problem.jacobian(&theta);
    let (js, scale) = scale_columns(j);
    check_rank(&js, problem.n_b)?;
    let jtj = js.transpose() * &js;
    let inv = jtj
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient("normal matrix not invertible".into()))?;
    let dof = (2 * problem.g.len()).saturating_sub(n_par).max(1) as f64;
    let s2 = match options.weighting {
        Weighting::Variance => 1.0,
        _ => cost / dof,
    };
    let matrix = (0..n_par)
        .map(|p| (0..n_par).map(|q| inv[(p, q)] * scale[p] * scale[q] * s2).collect())
        .collect();

    let model = RationalModel::from_parameters(&theta, problem.n_b);
    let residuals = frf
        .lines
        .iter()
        .zip(&problem.z)
        .zip(&problem.w)
        .map(|((l, z), w)| FitResidual {
            bin: l.bin,
            frequency: l.frequency,
            weighted: (l.g - model.response(*z)).norm() * w,
        })
        .collect();
    Ok(FitResult {
        model,
        final_cost: cost,
        iterations,
        cost_history: history,
        covariance: Covariance {
            matrix,
            validity: COVARIANCE_VALIDITY.into(),
        },
        residuals,
    })
}

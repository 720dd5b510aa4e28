use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRatio {
    pub degree: usize,
    /// Mean of the per-trial gain estimates.
    pub mean_estimate: f64,
    /// Variance of the gain estimate across trials.
    pub observed_variance: f64,
    /// Mean of the per-trial variance predicted by independent-noise theory.
    pub independent_variance: f64,
    pub ratio: f64,
}

/// Repeats the least-squares gain estimate `a = sum y u / sum u^2` for
/// `y = u^degree` and white Gaussian `u`, and compares the spread of `a`
/// across trials with the variance an independent-noise analysis of each
/// trial's residual would predict.
pub fn variance_ratio_experiment(
    degree: usize,
    n_trials: usize,
    n_samples: usize,
    std_dev: f64,
    seed: u64,
) -> Result<VarianceRatio> {
    if degree < 2 {
        return Err(Error::InvalidArgument(
            "degree 1 leaves no residual; the ratio is undefined".into(),
        ));
    }
    if n_trials < 2 || n_samples < 2 || !(std_dev > 0.0) {
        return Err(Error::InvalidArgument(
            "need n_trials >= 2, n_samples >= 2 and std_dev > 0".into(),
        ));
    }
    let trials = par::map_indexed(n_trials, |t| {
        let mut rng = seed::rng(seed::derive(seed, t as u64));
        let u: Vec<f64> = (0..n_samples)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                std_dev * z
            })
            .collect();
        let y: Vec<f64> = u.iter().map(|x| x.powi(degree as i32)).collect();
        let suu: f64 = u.iter().map(|x| x * x).sum();
        let a = y.iter().zip(&u).map(|(y, u)| y * u).sum::<f64>() / suu;
        let see: f64 = y.iter().zip(&u).map(|(y, u)| (y - a * u).powi(2)).sum();
        (a, see / (n_samples - 1) as f64 / suu)
    });
    let nt = n_trials as f64;
    let mean_estimate = trials.iter().map(|t| t.0).sum::<f64>() / nt;
    let observed_variance = trials.iter().map(|t| (t.0 - mean_estimate).powi(2)).sum::<f64>() / (nt - 1.0);
    let independent_variance = trials.iter().map(|t| t.1).sum::<f64>() / nt;
    Ok(VarianceRatio {
        degree,
        mean_estimate,
        observed_variance,
        independent_variance,
        ratio: observed_variance / independent_variance,
    })
}

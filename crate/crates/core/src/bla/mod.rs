//! Analytic best-linear-approximation oracles and parametric BLA fitting.

pub mod fit;
pub mod moments;
pub mod oracle;
pub mod variance_ratio;

pub use fit::{fit_frf, Covariance, FitOptions, FitResidual, FitResult, RationalModel, Weighting, COVARIANCE_VALIDITY};
pub use moments::GaussianMoments;
pub use oracle::{theoretical_bla_static, theoretical_bla_wh_cubic, MagnitudeFilter};
pub use variance_ratio::{variance_ratio_experiment, VarianceRatio};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bla::Weighting;
use crate::error::{Error, Result};
use crate::plant::{ClosedLoopScenario, DuffingParams, LtiFilter, NoiseSpec, Plant, StaticPolynomial, System, WienerHammerstein};
use crate::seed;
use crate::signal::{FrequencyGrid, GridKind};
use crate::spectral::{DEFAULT_CONDITION_LIMIT, DEFAULT_DIP_FLOOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub sample_rate: f64,
    pub n_samples: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub kind: GridKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationConfig {
    /// One experiment per level; each is the time-domain RMS of the input.
    pub rms_levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub numerator: Vec<f64>,
    #[serde(default = "unit_den")]
    pub denominator: Vec<f64>,
}

fn unit_den() -> Vec<f64> {
    vec![1.0]
}

impl FilterConfig {
    pub fn build(&self) -> Result<LtiFilter> {
        LtiFilter::new(self.numerator.clone(), self.denominator.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantConfig {
    Static {
        coefficients: Vec<f64>,
    },
    Lti {
        numerator: Vec<f64>,
        #[serde(default = "unit_den")]
        denominator: Vec<f64>,
    },
    WienerHammerstein {
        front: FilterConfig,
        coefficients: Vec<f64>,
        back: FilterConfig,
    },
    /// Duffing oscillator from its linear resonance, damping ratio and static gain.
    Duffing {
        resonance_hz: f64,
        damping_ratio: f64,
        static_gain: f64,
        k_cubic: f64,
        #[serde(default)]
        oversample_factor: Option<usize>,
    },
}

impl PlantConfig {
    pub fn build(&self) -> Result<Plant> {
        Ok(match self {
            PlantConfig::Static { coefficients } => Plant::Static {
                polynomial: StaticPolynomial::new(coefficients.clone())?,
            },
            PlantConfig::Lti { numerator, denominator } => Plant::Lti {
                filter: LtiFilter::new(numerator.clone(), denominator.clone())?,
            },
            PlantConfig::WienerHammerstein { front, coefficients, back } => Plant::WienerHammerstein {
                system: WienerHammerstein::new(front.build()?, StaticPolynomial::new(coefficients.clone())?, back.build()?),
            },
            PlantConfig::Duffing {
                resonance_hz,
                damping_ratio,
                static_gain,
                k_cubic,
                oversample_factor,
            } => {
                let mut params = DuffingParams::from_modal(*resonance_hz, *damping_ratio, *static_gain, *k_cubic);
                if let Some(osf) = oversample_factor {
                    params.oversample_factor = *osf;
                }
                params.validate()?;
                Plant::Duffing { params }
            }
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub std_dev: f64,
    #[serde(default)]
    pub shaping: Option<FilterConfig>,
    /// Defaults to a stream derived from the experiment seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub controller: FilterConfig,
    #[serde(default)]
    pub controller_nonlinearity: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub reference_gain: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    pub periods: usize,
    pub realizations: usize,
    /// Periods simulated and dropped before recording. Defaults to 1 for
    /// systems with a transient (Duffing, closed loops), else 0.
    #[serde(default)]
    pub transient_periods: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrfMethod {
    /// Two-level averaging when `M >= 2`, division otherwise.
    #[default]
    Robust,
    Division,
    CrossSpectral,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWeighting {
    #[default]
    Variance,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub n_num: usize,
    pub n_den: usize,
    #[serde(default)]
    pub weighting: FitWeighting,
    #[serde(default = "max_iter")]
    pub max_iterations: usize,
}

fn max_iter() -> usize {
    200
}

impl FitConfig {
    pub fn weighting(&self) -> Weighting {
        match self.weighting {
            FitWeighting::Variance => Weighting::Variance,
            FitWeighting::Unit => Weighting::Unit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub frf_method: FrfMethod,
    #[serde(default = "dip_floor")]
    pub dip_floor: f64,
    #[serde(default = "cond_limit")]
    pub condition_limit: f64,
    #[serde(default)]
    pub fit: Option<FitConfig>,
}

fn dip_floor() -> f64 {
    DEFAULT_DIP_FLOOR
}

fn cond_limit() -> f64 {
    DEFAULT_CONDITION_LIMIT
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            frf_method: FrfMethod::default(),
            dip_floor: dip_floor(),
            condition_limit: cond_limit(),
            fit: None,
        }
    }
}

/// Everything needed to reproduce an experiment and its analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub grid: GridConfig,
    pub excitation: ExcitationConfig,
    pub plant: PlantConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default, rename = "loop")]
    pub feedback: Option<LoopConfig>,
    pub measurement: MeasurementConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

/// Sub-seeds of an experiment. Grid line selection, excitation phases and
/// noise use separate streams of the experiment seed.
pub fn grid_seed(seed: u64) -> u64 {
    seed::derive(seed, 0)
}

pub fn level_seed(seed: u64, level: usize) -> u64 {
    seed::derive(seed, 1000 + level as u64)
}

pub fn noise_seed(seed: u64, level: usize) -> u64 {
    seed::derive(seed, 2000 + level as u64)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds every component once so that invalid configs fail before any
    /// simulation starts.
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        if self.excitation.rms_levels.is_empty() {
            return Err(Error::Config("excitation.rms_levels is empty".into()));
        }
        if let Some(bad) = self.excitation.rms_levels.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::Config(format!("rms level {bad} must be positive")));
        }
        if self.measurement.periods == 0 || self.measurement.realizations == 0 {
            return Err(Error::Config("measurement needs periods >= 1 and realizations >= 1".into()));
        }
        if !(self.noise.std_dev >= 0.0 && self.noise.std_dev.is_finite()) {
            return Err(Error::Config("noise.std_dev must be >= 0".into()));
        }
        if !(self.analysis.dip_floor >= 0.0) {
            return Err(Error::Config("analysis.dip_floor must be >= 0".into()));
        }
        self.frequency_grid().map_err(cfg)?;
        self.system().map_err(cfg)?;
        self.noise_spec(0).map_err(cfg)?;
        Ok(())
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        let g = &self.grid;
        FrequencyGrid::build(g.sample_rate, g.n_samples, g.f_min, g.f_max, g.kind, grid_seed(self.seed))
    }

    pub fn system(&self) -> Result<System> {
        let plant = self.plant.build()?;
        match &self.feedback {
            None => Ok(System::Open { plant }),
            Some(l) => {
                let mut s = ClosedLoopScenario::new(plant, l.controller.build()?)?;
                s.reference_gain = l.reference_gain;
                if let Some(c) = &l.controller_nonlinearity {
                    s = s.with_controller_nonlinearity(StaticPolynomial::new(c.clone())?)?;
                }
                Ok(System::Closed { scenario: s })
            }
        }
    }

    pub fn noise_spec(&self, level: usize) -> Result<NoiseSpec> {
        Ok(NoiseSpec {
            std_dev: self.noise.std_dev,
            shaping: self.noise.shaping.as_ref().map(FilterConfig::build).transpose()?,
            seed: self.noise.seed.unwrap_or_else(|| noise_seed(self.seed, level)),
        })
    }

    pub fn transient_periods(&self) -> usize {
        self.measurement.transient_periods.unwrap_or_else(|| {
            let dynamic = self.feedback.is_some() || matches!(self.plant, PlantConfig::Duffing { .. });
            usize::from(dynamic)
        })
    }

    /// SHA-256 (hex) of the canonical JSON form of the parsed config, so
    /// formatting, comments and spelled-out defaults do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

const DUFFING_SWEEP: &str = include_str!("../../configs/duffing-sweep.toml");
const LINEAR_SANITY: &str = include_str!("../../configs/linear-sanity.toml");
const CUBIC_LOOP: &str = include_str!("../../configs/cubic-loop.toml");

pub const BUNDLED: [&str; 3] = ["duffing-sweep", "linear-sanity", "cubic-loop"];

/// Source text of a bundled config.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "duffing-sweep" => Some(DUFFING_SWEEP),
        "linear-sanity" => Some(LINEAR_SANITY),
        "cubic-loop" => Some(CUBIC_LOOP),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse() {
        for name in BUNDLED {
            let cfg = ExperimentConfig::from_toml(bundled(name).unwrap()).unwrap();
            assert_eq!(cfg.name, name);
        }
    }

    #[test]
    fn hash_ignores_formatting_and_defaults() {
        let text = bundled("linear-sanity").unwrap();
        let a = ExperimentConfig::from_toml(text).unwrap();
        let reformatted = format!("# a comment\n\n{}", text.replace(" = ", "="));
        let b = ExperimentConfig::from_toml(&reformatted).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = ExperimentConfig::from_toml(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a.hash(), c.hash());
    }

    #[test]
    fn hash_tracks_meaningful_fields() {
        let a = ExperimentConfig::from_toml(bundled("linear-sanity").unwrap()).unwrap();
        let mut b = a.clone();
        b.measurement.periods += 1;
        assert_ne!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed ^= 1;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = bundled("linear-sanity").unwrap();
        let unstable = base.replace("denominator = [1.0, -1.6, 0.8]", "denominator = [1.0, -2.5, 1.2]");
        assert_ne!(unstable, base);
        assert!(matches!(ExperimentConfig::from_toml(&unstable), Err(Error::Config(_))));
        let typo = format!("{base}\nbogus = 1\n");
        assert!(ExperimentConfig::from_toml(&typo).is_err());
        let zero = base.replace("periods = 2", "periods = 0");
        assert!(ExperimentConfig::from_toml(&zero).is_err());
    }
}

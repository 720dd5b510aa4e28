use serde::{Deserialize, Serialize};

use super::config::{level_seed, ExperimentConfig, FrfMethod};
use crate::bla::{fit_frf, FitOptions, FitResult};
use crate::closed_loop::{correct_feedback, indirect_frf, CorrectionResult, IndirectEstimate};
use crate::error::{Error, Result};
use crate::plant::{steady_state_record, System};
use crate::record::Record;
use crate::signal::{flat_profile, FrequencyGrid, MultisineRealization};
use crate::spectral::{
    classify_distortions, frf_cross_spectral, frf_division, line_statistics, period_dfts, robust_method,
    DistortionReport, FrfEstimate, Scope,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleProvenance {
    pub config_name: String,
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopOutputs {
    pub indirect: IndirectEstimate,
    pub correction: CorrectionResult,
}

/// Results of one excitation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub config_hash: String,
    pub rms: f64,
    pub distortion: DistortionReport,
    pub frf: FrfEstimate,
    pub fit: Option<FitResult>,
    pub closed_loop: Option<ClosedLoopOutputs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub provenance: BundleProvenance,
    pub grid: FrequencyGrid,
    pub levels: Vec<LevelResult>,
}

impl ResultBundle {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Flat-amplitude excitation of every level, with phases drawn per level.
pub fn design(config: &ExperimentConfig) -> Result<Vec<MultisineRealization>> {
    let grid = config.frequency_grid().map_err(|e| e.in_stage("design"))?;
    let profile = flat_profile(&grid);
    config
        .excitation
        .rms_levels
        .iter()
        .enumerate()
        .map(|(i, &rms)| {
            MultisineRealization::synthesize(&grid, &profile, rms, level_seed(config.seed, i))
                .map_err(|e| e.in_stage("design"))
        })
        .collect()
}

/// Steady-state record of every level; realization `m` of level `i` uses
/// the phases of seed `derive(level_seed(i), m)`.
pub fn simulate(config: &ExperimentConfig, excitations: &[MultisineRealization]) -> Result<Vec<Record>> {
    let system = config.system().map_err(|e| e.in_stage("simulate"))?;
    let hash = config.hash();
    excitations
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let noise = config.noise_spec(i)?;
            let mut rec = steady_state_record(
                &system,
                ex,
                config.transient_periods(),
                config.measurement.periods,
                config.measurement.realizations,
                &noise,
                ex.seed,
            )?;
            rec.provenance.config_hash = hash.clone();
            Ok(rec)
        })
        .collect::<Result<_>>()
        .map_err(|e: Error| e.in_stage("simulate"))
}

fn frf_of(config: &ExperimentConfig, record: &Record) -> Result<(DistortionReport, FrfEstimate)> {
    let spectra = period_dfts(record)?;
    let per = line_statistics(&spectra, Scope::PerRealization)?;
    let distortion = classify_distortions(&per, &record.grid)?;
    let floor = config.analysis.dip_floor;
    let frf = match config.analysis.frf_method {
        FrfMethod::Robust if record.n_realizations >= 2 => robust_method(&spectra, &record.grid, floor)?,
        FrfMethod::Robust | FrfMethod::Division => {
            let pooled = line_statistics(&spectra, Scope::Pooled)?;
            frf_division(&pooled[0], &record.grid, floor)?
        }
        FrfMethod::CrossSpectral => frf_cross_spectral(&spectra, &record.grid, floor)?,
    };
    Ok((distortion, frf))
}

/// Distortion report and FRF of every record, without fit or closed-loop outputs.
pub fn analyze(config: &ExperimentConfig, records: &[Record]) -> Result<ResultBundle> {
    let hash = config.hash();
    let levels = records
        .iter()
        .zip(&config.excitation.rms_levels)
        .map(|(rec, &rms)| {
            let (distortion, frf) = frf_of(config, rec)?;
            Ok(LevelResult {
                config_hash: hash.clone(),
                rms,
                distortion,
                frf,
                fit: None,
                closed_loop: None,
            })
        })
        .collect::<Result<_>>()
        .map_err(|e: Error| e.in_stage("analyze"))?;
    Ok(ResultBundle {
        provenance: BundleProvenance {
            config_name: config.name.clone(),
            config_hash: hash,
            tool_version: TOOL_VERSION.into(),
            seed: config.seed,
        },
        grid: config.frequency_grid()?,
        levels,
    })
}

/// Adds the configured parametric fit to every level.
pub fn fit(config: &ExperimentConfig, bundle: &mut ResultBundle) -> Result<()> {
    let Some(fc) = &config.analysis.fit else {
        return Err(Error::Config("no [analysis.fit] section".into()).in_stage("fit"));
    };
    let options = FitOptions {
        weighting: fc.weighting(),
        max_iterations: fc.max_iterations,
        ..FitOptions::default()
    };
    for level in &mut bundle.levels {
        level.fit = Some(fit_frf(&level.frf, fc.n_num, fc.n_den, &options).map_err(|e| e.in_stage("fit"))?);
    }
    Ok(())
}

/// Adds indirect estimates and detection-line corrections to every level.
pub fn closed_loop(config: &ExperimentConfig, records: &[Record], bundle: &mut ResultBundle) -> Result<()> {
    for (level, rec) in bundle.levels.iter_mut().zip(records) {
        let out = (|| -> Result<ClosedLoopOutputs> {
            if !rec.is_closed_loop() {
                return Err(Error::InvalidArgument("record has no reference channel `r`".into()));
            }
            let spectra = period_dfts(rec)?;
            let pooled = line_statistics(&spectra, Scope::Pooled)?;
            Ok(ClosedLoopOutputs {
                indirect: indirect_frf(&spectra, &rec.grid, config.analysis.dip_floor)?,
                correction: correct_feedback(&pooled[0], &rec.grid)?,
            })
        })()
        .map_err(|e| e.in_stage("closedloop"))?;
        level.closed_loop = Some(out);
    }
    Ok(())
}

/// Design, simulate and analyze every level, then fit and run the
/// closed-loop analysis when the config asks for them.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<ResultBundle> {
    config.validate()?;
    let excitations = design(config)?;
    let records = simulate(config, &excitations)?;
    let mut bundle = analyze(config, &records)?;
    if config.analysis.fit.is_some() {
        fit(config, &mut bundle)?;
    }
    if matches!(config.system()?, System::Closed { .. }) {
        closed_loop(config, &records, &mut bundle)?;
    }
    Ok(bundle)
}

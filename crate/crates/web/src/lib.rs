//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export returns a JSON string on success and an error message
//! prefixed with the error category on failure.

use nlsid::closed_loop::mixture;
use nlsid::plant::{steady_state_record, DuffingParams, LtiFilter, NoiseSpec, Plant, System};
use nlsid::signal::{flat_profile, FrequencyGrid, GridKind, MultisineRealization};
use nlsid::spectral::{classify_distortions, line_statistics, period_dfts, robust_method, Scope, DEFAULT_DIP_FLOOR};
use nlsid::{dft, Complex64, Error};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type JsResult = Result<String, String>;

fn fail(e: Error) -> String {
    format!("{}: {e}", e.category())
}

fn json<T: Serialize>(value: &T) -> JsResult {
    serde_json::to_string(value).map_err(|e| format!("serialization: {e}"))
}

fn grid_kind(kind: &str) -> Result<GridKind, Error> {
    match kind {
        "full" => Ok(GridKind::Full),
        "odd" => Ok(GridKind::Odd),
        "odd_sparse" => Ok(GridKind::OddSparse { group_size: 4, drops_per_group: 1 }),
        other => Err(Error::InvalidArgument(format!("grid kind `{other}`; expected full, odd or odd_sparse"))),
    }
}

fn db(x: f64) -> Option<f64> {
    (x > 0.0).then(|| 10.0 * x.log10())
}

#[derive(Debug, Serialize)]
pub struct DesignView {
    pub time: Vec<f64>,
    pub samples: Vec<f64>,
    pub frequency: Vec<f64>,
    /// `|DFT| / N` in dB per bin `0..=N/2`; `None` for empty bins.
    pub spectrum_db: Vec<Option<f64>>,
    pub excited: Vec<usize>,
    pub detection: Vec<usize>,
    pub rms: f64,
    pub crest_factor: f64,
}

/// Random-phase multisine for the given grid.
#[wasm_bindgen]
pub fn design_multisine(n_samples: usize, sample_rate: f64, f_min: f64, f_max: f64, kind: &str, rms: f64, seed: u64) -> JsResult {
    let run = || -> Result<DesignView, Error> {
        let grid = FrequencyGrid::build(sample_rate, n_samples, f_min, f_max, grid_kind(kind)?, seed)?;
        let ms = MultisineRealization::synthesize(&grid, &flat_profile(&grid), rms, seed)?;
        let n = n_samples as f64;
        let spectrum = dft::rfft(&ms.samples);
        let peak = ms.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(DesignView {
            time: (0..n_samples).map(|t| t as f64 / sample_rate).collect(),
            frequency: (0..spectrum.len()).map(|k| grid.frequency(k)).collect(),
            spectrum_db: spectrum.iter().map(|c| db((c.norm() / n).powi(2)).filter(|d| *d > -200.0)).collect(),
            excited: grid.excited_bins.clone(),
            detection: grid.all_detection_bins(),
            rms: ms.rms(),
            crest_factor: peak / ms.rms(),
            samples: ms.samples,
        })
    };
    run().map_err(fail).and_then(|v| json(&v))
}

#[derive(Debug, Serialize)]
pub struct DistortionPoint {
    pub frequency: f64,
    pub class: &'static str,
    pub level_db: Option<f64>,
    pub noise_db: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct FrfPoint {
    pub frequency: f64,
    pub magnitude_db: f64,
    pub total_db: Option<f64>,
    pub noise_db: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct DuffingView {
    pub distortion: Vec<DistortionPoint>,
    pub frf: Vec<FrfPoint>,
    pub peak_frequency: Option<f64>,
}

/// Measures the hardening Duffing oscillator at one RMS level and returns the
/// distortion classification and the robust-method BLA.
#[wasm_bindgen]
pub fn duffing_analysis(rms: f64, k_cubic: f64, noise_std: f64, realizations: usize, seed: u64) -> JsResult {
    let run = || -> Result<DuffingView, Error> {
        if !(1..=64).contains(&realizations) {
            return Err(Error::InvalidArgument("realizations must be in 1..=64".into()));
        }
        let grid = FrequencyGrid::build(1220.0, 2048, 0.5, 200.0, GridKind::OddSparse { group_size: 5, drops_per_group: 1 }, seed)?;
        let ms = MultisineRealization::synthesize(&grid, &flat_profile(&grid), rms, seed)?;
        let params = DuffingParams { k_cubic, ..DuffingParams::default() };
        let system = System::open(Plant::Duffing { params });
        let rec = steady_state_record(&system, &ms, 1, 2, realizations, &NoiseSpec::white(noise_std, seed ^ 1), seed)?;
        let spectra = period_dfts(&rec)?;
        let report = classify_distortions(&line_statistics(&spectra, Scope::PerRealization)?, &grid)?;
        let frf = robust_method(&spectra, &grid, DEFAULT_DIP_FLOOR)?;
        let band_end = grid.frequency(grid.band.1);
        Ok(DuffingView {
            distortion: report
                .bins
                .iter()
                .filter(|b| b.frequency <= band_end)
                .map(|b| DistortionPoint {
                    frequency: b.frequency,
                    class: b.class.as_str(),
                    level_db: db(b.level),
                    noise_db: b.noise_floor.and_then(db),
                })
                .collect(),
            frf: frf
                .lines
                .iter()
                .map(|l| FrfPoint {
                    frequency: l.frequency,
                    magnitude_db: 20.0 * l.g.norm().log10(),
                    total_db: l.var_total.and_then(db),
                    noise_db: l.var_noise.and_then(db),
                })
                .collect(),
            peak_frequency: frf.peak_bin().map(|k| grid.frequency(k)),
        })
    };
    run().map_err(fail).and_then(|v| json(&v))
}

#[derive(Debug, Serialize)]
pub struct MixtureCurve {
    pub ratio: f64,
    pub magnitude_db: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct MixtureView {
    pub frequency: Vec<f64>,
    pub plant_db: Vec<f64>,
    pub inverse_controller_db: Vec<f64>,
    pub curves: Vec<MixtureCurve>,
}

/// Direct closed-loop FRF `(G S_RR - C* S_VV) / (S_RR + |C|^2 S_VV)` for a
/// second-order resonant plant and a proportional controller with a
/// one-sample delay, for each noise-to-reference ratio in `ratios`.
#[wasm_bindgen]
pub fn closed_loop_mixture(resonance: f64, damping: f64, controller_gain: f64, ratios: &[f64]) -> JsResult {
    let run = || -> Result<MixtureView, Error> {
        if !(0.0 < resonance && resonance < 0.5 && 0.0 < damping && damping < 1.0) {
            return Err(Error::InvalidArgument("need 0 < resonance < 0.5 (cycles/sample) and 0 < damping < 1".into()));
        }
        if ratios.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidArgument("ratios must be non-negative".into()));
        }
        // pole pair at radius exp(-zeta w) and angle w, unit static gain
        let w = 2.0 * std::f64::consts::PI * resonance;
        let radius = (-damping * w).exp();
        let a = vec![1.0, -2.0 * radius * w.cos(), radius * radius];
        let plant = LtiFilter::new(vec![a.iter().sum()], a)?;
        let controller = LtiFilter::new(vec![0.0, controller_gain], vec![1.0])?;
        let n = 1024;
        let bins: Vec<usize> = (1..n / 2).collect();
        let g: Vec<Complex64> = bins.iter().map(|&k| plant.response_at_bin(k, n)).collect();
        let c: Vec<Complex64> = bins.iter().map(|&k| controller.response_at_bin(k, n)).collect();
        let to_db = |z: Complex64| 20.0 * z.norm().max(1e-12).log10();
        let curves = ratios
            .iter()
            .map(|&ratio| MixtureCurve {
                ratio,
                magnitude_db: g
                    .iter()
                    .zip(&c)
                    .map(|(&gk, &ck)| mixture(gk, ck, 1.0, ratio).map_or(f64::NAN, to_db))
                    .collect(),
            })
            .collect();
        Ok(MixtureView {
            frequency: bins.iter().map(|&k| k as f64 / n as f64).collect(),
            plant_db: g.iter().map(|&z| to_db(z)).collect(),
            inverse_controller_db: c.iter().map(|&z| to_db(-z.inv())).collect(),
            curves,
        })
    };
    run().map_err(fail).and_then(|v| json(&v))
}

use serde::{Deserialize, Serialize};

use super::stats::LineAverages;
use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineClass {
    Excited,
    OddDetection,
    EvenDetection,
    OutOfBand,
}

impl LineClass {
    pub const ALL: [LineClass; 4] = [
        LineClass::Excited,
        LineClass::OddDetection,
        LineClass::EvenDetection,
        LineClass::OutOfBand,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LineClass::Excited => "excited",
            LineClass::OddDetection => "odd_detection",
            LineClass::EvenDetection => "even_detection",
            LineClass::OutOfBand => "out_of_band",
        }
    }
}

/// Class of `bin`, from the grid layout only.
///
/// In-band bins that are neither excited nor designated detection lines
/// (e.g. odd bins of a zippered grid) are reported as out of band.
pub fn classify_bin(grid: &FrequencyGrid, bin: usize) -> LineClass {
    let (lo, hi) = grid.band;
    if grid.is_excited(bin) {
        LineClass::Excited
    } else if bin < lo || bin > hi {
        LineClass::OutOfBand
    } else if grid.detection_bins.binary_search(&bin).is_ok() {
        LineClass::OddDetection
    } else if grid.kind.is_odd() && bin % 2 == 0 {
        LineClass::EvenDetection
    } else {
        LineClass::OutOfBand
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinLevel {
    pub bin: usize,
    pub frequency: f64,
    pub class: LineClass,
    /// Mean output power `|Y(k)|^2`, averaged over realizations.
    pub level: f64,
    /// `var_Y(k) / P`, averaged over realizations; absent for `P = 1`.
    pub noise_floor: Option<f64>,
}

impl BinLevel {
    pub fn level_db(&self) -> f64 {
        db(self.level)
    }

    pub fn noise_floor_db(&self) -> Option<f64> {
        self.noise_floor.map(db)
    }
}

pub fn db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// Output levels of every bin `1..N/2`, tagged by line class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub n_realizations: usize,
    pub n_periods: usize,
    pub bins: Vec<BinLevel>,
}

impl DistortionReport {
    pub fn of_class(&self, class: LineClass) -> impl Iterator<Item = &BinLevel> {
        self.bins.iter().filter(move |b| b.class == class)
    }

    /// Mean power over the bins of a class, `None` when the class is empty.
    pub fn mean_level(&self, class: LineClass) -> Option<f64> {
        mean(self.of_class(class).map(|b| b.level))
    }

    pub fn max_level(&self, class: LineClass) -> Option<f64> {
        self.of_class(class).map(|b| b.level).reduce(f64::max)
    }

    pub fn mean_noise_floor(&self, class: LineClass) -> Option<f64> {
        mean(self.of_class(class).filter_map(|b| b.noise_floor))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Tags every bin by class and attaches the realization-averaged output
/// level and noise floor. `averages` holds one entry per realization.
pub fn classify_distortions(averages: &[LineAverages], grid: &FrequencyGrid) -> Result<DistortionReport> {
    let Some(first) = averages.first() else {
        return Err(Error::InvalidArgument("no line averages to classify".into()));
    };
    let n_bins = grid.n_bins();
    if averages.iter().any(|a| a.mean_y.len() != n_bins) {
        return Err(Error::InvalidArgument("line averages do not match the grid".into()));
    }
    let m = averages.len() as f64;
    let with_noise = averages.iter().all(|a| a.has_noise_estimate());
    let bins = (1..grid.n_samples.div_ceil(2))
        .map(|k| BinLevel {
            bin: k,
            frequency: grid.frequency(k),
            class: classify_bin(grid, k),
            level: averages.iter().map(|a| a.mean_y[k].norm_sqr()).sum::<f64>() / m,
            noise_floor: with_noise
                .then(|| averages.iter().filter_map(|a| a.var_mean_y(k)).sum::<f64>() / m),
        })
        .collect();
    Ok(DistortionReport {
        n_realizations: averages.len(),
        n_periods: first.n_averages,
        bins,
    })
}

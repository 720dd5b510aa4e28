use std::collections::BTreeSet;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Layout of the excited lines on the DFT grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridKind {
    /// Every bin in the band.
    Full,
    /// Odd bins in the band.
    Odd,
    /// Odd bins, with `drops_per_group` lines of every consecutive group of
    /// `group_size` odd bins left unexcited as odd detection lines.
    OddSparse {
        group_size: usize,
        drops_per_group: usize,
    },
    /// Every `n_channels`-th bin of the band starting at offset `channel_index`.
    Zippered {
        channel_index: usize,
        n_channels: usize,
    },
}

impl GridKind {
    pub fn is_odd(&self) -> bool {
        matches!(self, GridKind::Odd | GridKind::OddSparse { .. })
    }
}

/// The bin layout of one periodic experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub n_samples: usize,
    pub sample_rate: f64,
    pub kind: GridKind,
    /// First and last bin index of the requested band.
    pub band: (usize, usize),
    pub excited_bins: Vec<usize>,
    /// Designated odd detection lines (only for [`GridKind::OddSparse`]).
    pub detection_bins: Vec<usize>,
    pub seed: u64,
}

impl FrequencyGrid {
    /// Builds the grid covering `[f_min, f_max]`.
    ///
    /// For odd-sparse grids the dropped line inside each complete group is
    /// drawn from a generator seeded with `seed`. An incomplete trailing group
    /// is excited in full.
    pub fn build(
        sample_rate: f64,
        n_samples: usize,
        f_min: f64,
        f_max: f64,
        kind: GridKind,
        seed: u64,
    ) -> Result<Self> {
        if n_samples < 4 || n_samples % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_samples must be even and >= 4, got {n_samples}"
            )));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidGrid("sample_rate must be positive".into()));
        }
        let nyquist = sample_rate / 2.0;
        if f_max >= nyquist {
            return Err(Error::InvalidGrid(format!(
                "f_max = {f_max} Hz is at or above Nyquist ({nyquist} Hz)"
            )));
        }
        if !(f_min > 0.0 && f_min < f_max) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < f_min < f_max, got [{f_min}, {f_max}]"
            )));
        }
        let f0 = sample_rate / n_samples as f64;
        // tolerate rounding when the band edges sit exactly on a bin
        let k_lo = ((f_min / f0) - 1e-9).ceil().max(1.0) as usize;
        let k_hi = (((f_max / f0) + 1e-9).floor() as usize).min(n_samples / 2 - 1);
        if k_lo > k_hi {
            return Err(Error::InvalidGrid(format!(
                "band [{f_min}, {f_max}] Hz contains no bin at resolution {f0} Hz"
            )));
        }

        let (excited, detection) = match kind {
            GridKind::Full => ((k_lo..=k_hi).collect::<Vec<_>>(), Vec::new()),
            GridKind::Odd => ((k_lo..=k_hi).filter(|k| k % 2 == 1).collect(), Vec::new()),
            GridKind::OddSparse {
                group_size,
                drops_per_group,
            } => {
                if group_size < 2 {
                    return Err(Error::InvalidGrid("group_size must be >= 2".into()));
                }
                if drops_per_group == 0 || drops_per_group >= group_size {
                    return Err(Error::InvalidGrid(format!(
                        "drops_per_group must be in 1..{group_size}, got {drops_per_group}"
                    )));
                }
                let odd: Vec<usize> = (k_lo..=k_hi).filter(|k| k % 2 == 1).collect();
                let mut rng = seed::rng(seed);
                let mut excited = Vec::with_capacity(odd.len());
                let mut detection = Vec::new();
                for group in odd.chunks(group_size) {
                    if group.len() < group_size {
                        excited.extend_from_slice(group);
                        continue;
                    }
                    let dropped: BTreeSet<usize> =
                        sample(&mut rng, group_size, drops_per_group).into_iter().collect();
                    for (i, &k) in group.iter().enumerate() {
                        if dropped.contains(&i) {
                            detection.push(k);
                        } else {
                            excited.push(k);
                        }
                    }
                }
                (excited, detection)
            }
            GridKind::Zippered {
                channel_index,
                n_channels,
            } => {
                if n_channels == 0 || channel_index >= n_channels {
                    return Err(Error::InvalidGrid(format!(
                        "zippered channel {channel_index} out of range for {n_channels} channels"
                    )));
                }
                (
                    (k_lo..=k_hi)
                        .filter(|k| (k - k_lo) % n_channels == channel_index)
                        .collect(),
                    Vec::new(),
                )
            }
        };
        if excited.is_empty() {
            return Err(Error::InvalidGrid(
                "no excited bins after rounding to the grid".into(),
            ));
        }
        Ok(FrequencyGrid {
            n_samples,
            sample_rate,
            kind,
            band: (k_lo, k_hi),
            excited_bins: excited,
            detection_bins: detection,
            seed,
        })
    }

    /// Spectral resolution `f_s / N`.
    pub fn resolution(&self) -> f64 {
        self.sample_rate / self.n_samples as f64
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.resolution()
    }

    pub fn n_bins(&self) -> usize {
        self.n_samples / 2 + 1
    }

    pub fn is_excited(&self, bin: usize) -> bool {
        self.excited_bins.binary_search(&bin).is_ok()
    }

    /// Even bins inside the band. These are detection lines for odd grids.
    pub fn even_detection_bins(&self) -> Vec<usize> {
        if !self.kind.is_odd() {
            return Vec::new();
        }
        (self.band.0..=self.band.1).filter(|k| k % 2 == 0).collect()
    }

    /// Designated odd lines and implicit even lines, sorted.
    pub fn all_detection_bins(&self) -> Vec<usize> {
        let mut all = self.detection_bins.clone();
        all.extend(self.even_detection_bins());
        all.sort_unstable();
        all
    }
}

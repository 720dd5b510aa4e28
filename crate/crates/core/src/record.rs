use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;

/// One named time series of a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seeds: Vec<u64>,
}

/// Periodic time data: `M` realizations of `P` steady-state periods of `N`
/// samples each. Channel data is laid out realization-major, then period,
/// then sample: index `(m * P + p) * N + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub sample_rate: f64,
    pub n_samples: usize,
    pub n_periods: usize,
    pub n_realizations: usize,
    pub channels: Vec<Channel>,
    pub grid: FrequencyGrid,
    pub provenance: Provenance,
}

impl Record {
    pub fn new(
        grid: FrequencyGrid,
        n_periods: usize,
        n_realizations: usize,
        channels: Vec<Channel>,
        provenance: Provenance,
    ) -> Result<Self> {
        let record = Record {
            sample_rate: grid.sample_rate,
            n_samples: grid.n_samples,
            n_periods,
            n_realizations,
            channels,
            grid,
            provenance,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn expected_len(&self) -> usize {
        self.n_realizations * self.n_periods * self.n_samples
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_periods == 0 || self.n_realizations == 0 {
            return Err(Error::InvalidArgument(
                "record needs at least one period and one realization".into(),
            ));
        }
        if self.grid.n_samples != self.n_samples || self.grid.sample_rate != self.sample_rate {
            return Err(Error::InvalidArgument(
                "grid N / sample rate do not match the record".into(),
            ));
        }
        for c in &self.channels {
            if c.data.len() != self.expected_len() {
                return Err(Error::InvalidArgument(format!(
                    "channel `{}` has {} samples, expected M*P*N = {}",
                    c.name,
                    c.data.len(),
                    self.expected_len()
                )));
            }
        }
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.data.as_slice())
    }

    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.channel(name)
            .ok_or_else(|| Error::InvalidArgument(format!("record has no `{name}` channel")))
    }

    pub fn channel_names(&self) -> Vec<&str> {
        self.channels.iter().map(|c| c.name.as_str()).collect()
    }

    /// A record carrying a reference channel `r` can be analysed as closed loop.
    pub fn is_closed_loop(&self) -> bool {
        self.channel("r").is_some()
    }

    /// One period of a channel.
    pub fn period<'a>(&self, data: &'a [f64], realization: usize, period: usize) -> &'a [f64] {
        let start = (realization * self.n_periods + period) * self.n_samples;
        &data[start..start + self.n_samples]
    }
}

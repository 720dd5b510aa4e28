use num_complex::Complex64;

use crate::dft;
use crate::error::{Error, Result};
use crate::par;
use crate::record::Record;

/// Per-period spectra (bins `0..=N/2`) of every channel of a record.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSet {
    pub n_samples: usize,
    pub n_periods: usize,
    pub n_realizations: usize,
    names: Vec<String>,
    /// `data[channel][m * P + p]`
    data: Vec<Vec<Vec<Complex64>>>,
}

impl SpectralSet {
    pub fn channel_names(&self) -> &[String] {
        &self.names
    }

    pub fn has(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no `{name}` channel in spectra")))
    }

    /// Spectrum of one period.
    pub fn spectrum(&self, name: &str, realization: usize, period: usize) -> Result<&[Complex64]> {
        let c = self.index(name)?;
        Ok(&self.data[c][realization * self.n_periods + period])
    }

    /// All period spectra of realization `m`.
    pub fn periods(&self, name: &str, realization: usize) -> Result<&[Vec<Complex64>]> {
        let c = self.index(name)?;
        let p = self.n_periods;
        Ok(&self.data[c][realization * p..(realization + 1) * p])
    }

    /// Every period of every realization.
    pub fn all_blocks(&self, name: &str) -> Result<&[Vec<Complex64>]> {
        let c = self.index(name)?;
        Ok(&self.data[c])
    }

    /// Mean over the periods of realization `m`.
    pub fn period_mean(&self, name: &str, realization: usize) -> Result<Vec<Complex64>> {
        let blocks = self.periods(name, realization)?;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n_samples / 2 + 1];
        for b in blocks {
            for (a, x) in acc.iter_mut().zip(b) {
                *a += x;
            }
        }
        let scale = 1.0 / blocks.len() as f64;
        Ok(acc.into_iter().map(|a| a * scale).collect())
    }
}

/// One unnormalized DFT per period, channel and realization.
pub fn period_dfts(record: &Record) -> Result<SpectralSet> {
    let n = record.n_samples;
    for c in &record.channels {
        if n == 0 || c.data.len() % n != 0 {
            return Err(Error::InvalidArgument(format!(
                "channel `{}` length {} is not an integer number of {n}-sample periods",
                c.name,
                c.data.len()
            )));
        }
    }
    record.validate()?;
    let blocks = record.n_periods * record.n_realizations;
    let data = record
        .channels
        .iter()
        .map(|c| par::map_indexed(blocks, |b| dft::rfft(&c.data[b * n..(b + 1) * n])))
        .collect();
    Ok(SpectralSet {
        n_samples: n,
        n_periods: record.n_periods,
        n_realizations: record.n_realizations,
        names: record.channels.iter().map(|c| c.name.clone()).collect(),
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Channel, Provenance};
    use crate::signal::{FrequencyGrid, GridKind};
    use std::f64::consts::PI;

    fn record(u: Vec<f64>, periods: usize) -> Record {
        let g = FrequencyGrid::build(64.0, 64, 1.0, 30.0, GridKind::Full, 0).unwrap();
        let y = u.clone();
        Record::new(
            g,
            periods,
            1,
            vec![
                Channel { name: "u".into(), data: u },
                Channel { name: "y".into(), data: y },
            ],
            Provenance::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_tone_lands_on_its_bin_every_period() {
        let u: Vec<f64> = (0..64 * 3).map(|t| (2.0 * PI * ((7 * t) % 64) as f64 / 64.0).sin()).collect();
        let s = period_dfts(&record(u, 3)).unwrap();
        for p in 0..3 {
            let spec = s.spectrum("u", 0, p).unwrap();
            for (k, c) in spec.iter().enumerate() {
                if k == 7 {
                    assert!((c.norm() - 32.0).abs() < 1e-10);
                } else {
                    assert!(c.norm() < 1e-10);
                }
            }
        }
        assert_eq!(s.spectrum("u", 0, 0).unwrap(), s.spectrum("u", 0, 2).unwrap());
    }

    #[test]
    fn parseval_holds_under_convention() {
        let u: Vec<f64> = (0..64).map(|t| ((t * 37 % 17) as f64 - 8.0) / 3.0).collect();
        let time: f64 = u.iter().map(|x| x * x).sum();
        let s = period_dfts(&record(u, 1)).unwrap();
        let spec = s.spectrum("u", 0, 0).unwrap();
        // one-sided: interior bins count twice
        let mut freq = spec[0].norm_sqr() + spec[32].norm_sqr();
        freq += 2.0 * spec[1..32].iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((freq / 64.0 - time).abs() < 1e-10 * time);
    }

    #[test]
    fn rejects_partial_periods() {
        let mut r = record(vec![0.0; 64], 1);
        r.channels[0].data.push(1.0);
        assert!(period_dfts(&r).is_err());
    }
}

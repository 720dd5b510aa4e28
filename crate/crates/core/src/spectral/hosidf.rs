use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectra::period_dfts;
use crate::error::{Error, Result};
use crate::record::Record;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HosidfPoint {
    pub bin: usize,
    pub frequency: f64,
    pub g: Complex64,
}

/// `G_k(f0, a) = Y(k f0) / U(f0)^k` with lines taken as `DFT / N`, so an
/// amplitude-`a` cosine has fundamental line `a/2` (times its phase).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HosidfCurve {
    pub order: usize,
    /// Sine amplitude of the first record.
    pub amplitude: f64,
    pub points: Vec<HosidfPoint>,
}

/// One point per single-tone record, averaged over all of its periods and
/// realizations.
pub fn hosidf(sine_records: &[Record], order: usize) -> Result<HosidfCurve> {
    if order == 0 {
        return Err(Error::InvalidArgument("HOSIDF order must be >= 1".into()));
    }
    if sine_records.is_empty() {
        return Err(Error::InvalidArgument("no sine records".into()));
    }
    let mut amplitude = None;
    let mut points = Vec::with_capacity(sine_records.len());
    for rec in sine_records {
        let &[k0] = rec.grid.excited_bins.as_slice() else {
            return Err(Error::InvalidGrid(format!(
                "HOSIDF record must excite exactly one bin, found {}",
                rec.grid.excited_bins.len()
            )));
        };
        let n = rec.n_samples;
        let kh = order * k0;
        if 2 * kh >= n {
            return Err(Error::InvalidGrid(format!(
                "harmonic {order} of bin {k0} is at or above Nyquist (N = {n})"
            )));
        }
        let spectra = period_dfts(rec)?;
        let line = |name: &str, k: usize| -> Result<Complex64> {
            let blocks = spectra.all_blocks(name)?;
            let s: Complex64 = blocks.iter().map(|b| b[k]).sum();
            Ok(s / (blocks.len() as f64 * n as f64))
        };
        let u = line("u", k0)?;
        let y = line("y", kh)?;
        amplitude.get_or_insert(2.0 * u.norm());
        points.push(HosidfPoint {
            bin: k0,
            frequency: rec.grid.frequency(k0),
            g: y / u.powu(order as u32),
        });
    }
    Ok(HosidfCurve {
        order,
        amplitude: amplitude.unwrap_or(0.0),
        points,
    })
}

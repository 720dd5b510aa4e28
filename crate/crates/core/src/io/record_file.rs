//! Record container: a text header followed by raw little-endian `f64` data.
//!
//! ```text
//! NLSIDREC 1
//! sample_rate <f64>
//! n_samples <N>
//! n_periods <P>
//! n_realizations <M>
//! channels <name> <name> ...
//! grid <json>
//! provenance <json>
//! end
//! ```
//!
//! The data block holds each channel in turn (channel-major), each in
//! realization / period / sample order: `channels * M * P * N` values.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::record::{Channel, Provenance, Record};
use crate::signal::FrequencyGrid;

pub const MAGIC: &str = "NLSIDREC";
pub const VERSION: u32 = 1;

pub fn encode_record(record: &Record) -> Result<Vec<u8>> {
    record.validate()?;
    for c in &record.channels {
        if c.name.is_empty() || c.name.contains(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("channel name `{}` is not a single word", c.name)));
        }
    }
    let mut out = Vec::new();
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(out, "sample_rate {}", record.sample_rate)?;
    writeln!(out, "n_samples {}", record.n_samples)?;
    writeln!(out, "n_periods {}", record.n_periods)?;
    writeln!(out, "n_realizations {}", record.n_realizations)?;
    let names: Vec<&str> = record.channel_names();
    writeln!(out, "channels {}", names.join(" "))?;
    writeln!(out, "grid {}", serde_json::to_string(&record.grid)?)?;
    writeln!(out, "provenance {}", serde_json::to_string(&record.provenance)?)?;
    writeln!(out, "end")?;
    out.reserve(record.channels.len() * record.expected_len() * 8);
    for c in &record.channels {
        for x in &c.data {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn write_record(record: &Record, path: &Path) -> Result<()> {
    fs::write(path, encode_record(record)?)?;
    Ok(())
}

pub fn read_record(path: &Path) -> Result<Record> {
    decode_record(&fs::read(path)?)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::RecordFormat {
            offset: offset as u64,
            message: message.into(),
        }
    }

    /// Next header line as `(offset, text)`.
    fn line(&mut self) -> Result<(usize, &'a str)> {
        let start = self.pos;
        let Some(len) = self.bytes[start..].iter().position(|&b| b == b'\n') else {
            return Err(self.err(start, "unterminated header line"));
        };
        self.pos = start + len + 1;
        let text = std::str::from_utf8(&self.bytes[start..start + len])
            .map_err(|_| self.err(start, "header line is not UTF-8"))?;
        Ok((start, text))
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (off, line) = self.line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((off + k.len() + 1, v)),
            _ => Err(self.err(off, format!("expected `{key} ...`, found `{}`", truncate(line)))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (off, v) = self.field(key)?;
        v.trim().parse().map_err(|_| self.err(off, format!("bad value for {key}: `{}`", truncate(v))))
    }
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(60) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

pub fn decode_record(bytes: &[u8]) -> Result<Record> {
    let mut cur = Cursor { bytes, pos: 0 };
    let (off, first) = cur.line()?;
    let version = match first.split_once(' ') {
        Some((MAGIC, v)) => v.parse::<u32>().map_err(|_| cur.err(off, "bad version"))?,
        _ => return Err(cur.err(0, "not a record file (bad magic)")),
    };
    if version != VERSION {
        return Err(cur.err(off, format!("unsupported version {version}")));
    }
    let sample_rate: f64 = cur.number("sample_rate")?;
    let n_samples: usize = cur.number("n_samples")?;
    let n_periods: usize = cur.number("n_periods")?;
    let n_realizations: usize = cur.number("n_realizations")?;
    let (_, names) = cur.field("channels")?;
    let names: Vec<String> = names.split(' ').filter(|s| !s.is_empty()).map(str::to_owned).collect();
    let (goff, grid) = cur.field("grid")?;
    let grid: FrequencyGrid =
        serde_json::from_str(grid).map_err(|e| cur.err(goff, format!("grid: {e}")))?;
    let (poff, prov) = cur.field("provenance")?;
    let provenance: Provenance =
        serde_json::from_str(prov).map_err(|e| cur.err(poff, format!("provenance: {e}")))?;
    let (eoff, end) = cur.line()?;
    if end != "end" {
        return Err(cur.err(eoff, "expected `end` header marker"));
    }

    let per_channel = n_realizations
        .checked_mul(n_periods)
        .and_then(|x| x.checked_mul(n_samples))
        .ok_or_else(|| cur.err(eoff, "shape overflows"))?;
    let data = &bytes[cur.pos..];
    let expected = names.len() * per_channel * 8;
    if data.len() != expected {
        let at = cur.pos + data.len().min(expected);
        return Err(cur.err(
            at,
            format!(
                "data block has {} bytes, expected {} channel(s) x M*P*N = {} x {per_channel} samples ({expected} bytes)",
                data.len(),
                names.len(),
                names.len()
            ),
        ));
    }
    let channels = names
        .into_iter()
        .enumerate()
        .map(|(c, name)| Channel {
            name,
            data: data[c * per_channel * 8..(c + 1) * per_channel * 8]
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect(),
        })
        .collect();
    let record = Record {
        sample_rate,
        n_samples,
        n_periods,
        n_realizations,
        channels,
        grid,
        provenance,
    };
    record.validate().map_err(|e| cur.err(0, e.to_string()))?;
    Ok(record)
}

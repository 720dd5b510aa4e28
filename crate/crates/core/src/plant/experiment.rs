use serde::{Deserialize, Serialize};

use super::closed_loop::{simulate_closed_loop, ClosedLoopScenario};
use super::lti::LtiFilter;
use super::noise::NoiseSpec;
use super::Plant;
use crate::error::{Error, Result};
use crate::par;
use crate::record::{Channel, Provenance, Record};
use crate::seed;
use crate::signal::{MultisineRealization, OrthogonalMultisineSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "loop", rename_all = "snake_case")]
pub enum System {
    Open { plant: Plant },
    Closed { scenario: ClosedLoopScenario },
}

impl System {
    pub fn open(plant: Plant) -> Self {
        System::Open { plant }
    }
}

/// Seed of realization `m` of an experiment seeded with `seed`.
pub fn realization_seed(seed: u64, m: usize) -> u64 {
    seed::derive(seed, m as u64)
}

/// Measures `realizations` independent random-phase multisines sharing the
/// amplitude spectrum of `excitation`.
///
/// Realization `m` is synthesized with seed [`realization_seed`]`(seed, m)`,
/// simulated over `periods_discard + periods_keep` periods, and the first
/// `periods_discard` periods are dropped. Output noise uses stream `m` of
/// `noise`. Closed-loop systems also store the applied reference as `r`.
pub fn steady_state_record(
    system: &System,
    excitation: &MultisineRealization,
    periods_discard: usize,
    periods_keep: usize,
    realizations: usize,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<Record> {
    if periods_keep == 0 || realizations == 0 {
        return Err(Error::InvalidArgument(
            "need periods_keep >= 1 and realizations >= 1".into(),
        ));
    }
    let grid = &excitation.grid;
    let n = grid.n_samples;
    let fs = grid.sample_rate;
    let profile = excitation.lines.iter().map(|l| (l.bin, l.amplitude)).collect();
    let rms = excitation.rms();
    let total = periods_discard + periods_keep;
    let head = periods_discard * n;

    let run = |m: usize| -> Result<(Vec<f64>, Vec<f64>, Option<Vec<f64>>)> {
        let ms = MultisineRealization::synthesize(grid, &profile, rms, realization_seed(seed, m))?;
        let excitation = ms.repeated(total);
        match system {
            System::Open { plant } => {
                let mut y = plant.simulate(&excitation, fs, true)?;
                let v = noise.generate(y.len(), m as u64);
                for (yi, vi) in y.iter_mut().zip(&v) {
                    *yi += vi;
                }
                Ok((excitation[head..].to_vec(), y[head..].to_vec(), None))
            }
            System::Closed { scenario } => {
                let (r, u, y) = simulate_closed_loop(scenario, &excitation, noise, fs, m as u64)?;
                Ok((u[head..].to_vec(), y[head..].to_vec(), Some(r[head..].to_vec())))
            }
        }
    };

    let runs = par::map_indexed(realizations, |m| run(m).map_err(|e| e.in_realization(m)));
    let mut u = Vec::with_capacity(realizations * periods_keep * n);
    let mut y = Vec::with_capacity(realizations * periods_keep * n);
    let mut r = Vec::new();
    for out in runs {
        let (um, ym, rm) = out?;
        u.extend(um);
        y.extend(ym);
        if let Some(rm) = rm {
            r.extend(rm);
        }
    }
    let mut channels = vec![
        Channel {
            name: "u".into(),
            data: u,
        },
        Channel {
            name: "y".into(),
            data: y,
        },
    ];
    if matches!(system, System::Closed { .. }) {
        channels.push(Channel {
            name: "r".into(),
            data: r,
        });
    }
    let provenance = Provenance {
        config_hash: String::new(),
        seeds: vec![seed, noise.seed],
    };
    Record::new(grid.clone(), periods_keep, realizations, channels, provenance)
}

/// Linear multi-input multi-output plant, `filters[output][input]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoLti {
    pub filters: Vec<Vec<LtiFilter>>,
}

impl MimoLti {
    pub fn n_outputs(&self) -> usize {
        self.filters.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.filters.first().map_or(0, |row| row.len())
    }

    /// Periodic steady-state outputs for one period of each input.
    pub fn simulate_periodic(&self, inputs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.filters
            .iter()
            .map(|row| {
                let mut acc = vec![0.0; inputs[0].len()];
                for (f, u) in row.iter().zip(inputs) {
                    for (a, b) in acc.iter_mut().zip(f.filter_periodic(u)) {
                        *a += b;
                    }
                }
                acc
            })
            .collect()
    }
}

/// One record per experiment of an orthogonal multisine set. Realization `m`
/// builds its orthogonal set from a base multisine drawn with
/// [`realization_seed`]`(seed, m)`; channels are `u0..`, `y0..`.
pub fn mimo_records(
    plant: &MimoLti,
    template: &OrthogonalMultisineSet,
    periods: usize,
    realizations: usize,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<(Vec<Record>, Vec<OrthogonalMultisineSet>)> {
    let nu = template.n_inputs;
    if plant.n_inputs() != nu {
        return Err(Error::InvalidArgument(format!(
            "plant has {} inputs, excitation set has {nu}",
            plant.n_inputs()
        )));
    }
    if periods == 0 || realizations == 0 {
        return Err(Error::InvalidArgument("need periods >= 1 and realizations >= 1".into()));
    }
    let base = &template.base;
    let grid = &base.grid;
    let n = grid.n_samples;
    let profile = base.lines.iter().map(|l| (l.bin, l.amplitude)).collect();
    let mut sets = Vec::with_capacity(realizations);
    for m in 0..realizations {
        let ms = MultisineRealization::synthesize(grid, &profile, base.rms(), realization_seed(seed, m))?;
        sets.push(OrthogonalMultisineSet::new(&ms, nu)?);
    }
    let ny = plant.n_outputs();
    let mut records = Vec::with_capacity(nu);
    for e in 0..nu {
        let mut inputs = vec![Vec::with_capacity(realizations * periods * n); nu];
        let mut outputs = vec![Vec::with_capacity(realizations * periods * n); ny];
        for (m, set) in sets.iter().enumerate() {
            let period_inputs: Vec<Vec<f64>> =
                set.signals[e].iter().map(|s| s.samples.clone()).collect();
            let period_outputs = plant.simulate_periodic(&period_inputs);
            for (i, u) in period_inputs.iter().enumerate() {
                for _ in 0..periods {
                    inputs[i].extend_from_slice(u);
                }
            }
            for (o, y) in period_outputs.iter().enumerate() {
                let v = noise.generate(periods * n, (e * realizations * ny + m * ny + o) as u64);
                for p in 0..periods {
                    outputs[o].extend(y.iter().zip(&v[p * n..(p + 1) * n]).map(|(a, b)| a + b));
                }
            }
        }
        let mut channels: Vec<Channel> = inputs
            .into_iter()
            .enumerate()
            .map(|(i, data)| Channel {
                name: format!("u{i}"),
                data,
            })
            .collect();
        channels.extend(outputs.into_iter().enumerate().map(|(o, data)| Channel {
            name: format!("y{o}"),
            data,
        }));
        records.push(Record::new(
            grid.clone(),
            periods,
            realizations,
            channels,
            Provenance {
                config_hash: String::new(),
                seeds: vec![seed, noise.seed, e as u64],
            },
        )?);
    }
    Ok((records, sets))
}

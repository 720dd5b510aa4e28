//! Deterministic simulators for the test systems and the steady-state record
//! generator.

pub mod closed_loop;
pub mod duffing;
pub mod experiment;
pub mod lti;
pub mod noise;
pub mod poly;
pub mod wh;

use serde::{Deserialize, Serialize};

pub use closed_loop::{simulate_closed_loop, ClosedLoopScenario};
pub use duffing::DuffingParams;
pub use experiment::{mimo_records, steady_state_record, MimoLti, System};
pub use lti::LtiFilter;
pub use noise::NoiseSpec;
pub use poly::StaticPolynomial;
pub use wh::WienerHammerstein;

use crate::error::Result;

/// Any of the single-input single-output systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Plant {
    Static { polynomial: StaticPolynomial },
    Lti { filter: LtiFilter },
    WienerHammerstein { system: WienerHammerstein },
    Duffing { params: DuffingParams },
}

impl Plant {
    /// Response to `u`. `assume_periodic` selects the exact periodic steady
    /// state for the discrete-time systems; the Duffing oscillator always
    /// integrates from rest.
    pub fn simulate(&self, u: &[f64], sample_rate: f64, assume_periodic: bool) -> Result<Vec<f64>> {
        match self {
            Plant::Static { polynomial } => Ok(polynomial.apply(u)),
            Plant::Lti { filter } => Ok(filter.simulate(u, assume_periodic)),
            Plant::WienerHammerstein { system } => Ok(system.simulate(u, assume_periodic)),
            Plant::Duffing { params } => params.simulate(u, sample_rate),
        }
    }

    /// Whether the simulator needs transient periods discarded.
    pub fn has_transient(&self) -> bool {
        matches!(self, Plant::Duffing { .. })
    }

    /// Linear part as a discrete-time filter, when the plant has one.
    pub fn linear_part(&self) -> Option<LtiFilter> {
        match self {
            Plant::Static { polynomial } => Some(LtiFilter::gain(polynomial.linear_gain())),
            Plant::Lti { filter } => Some(filter.clone()),
            Plant::WienerHammerstein { system } => Some(
                system
                    .front
                    .cascade(&LtiFilter::gain(system.nonlinearity.linear_gain()))
                    .cascade(&system.back),
            ),
            Plant::Duffing { .. } => None,
        }
    }

    pub fn stepper(&self, sample_rate: f64) -> PlantState {
        match self {
            Plant::Static { polynomial } => PlantState::Static(polynomial.clone()),
            Plant::Lti { filter } => PlantState::Lti(filter.state()),
            Plant::WienerHammerstein { system } => PlantState::Wh(
                system.front.state(),
                system.nonlinearity.clone(),
                system.back.state(),
            ),
            Plant::Duffing { params } => PlantState::Duffing(params.stepper(sample_rate)),
        }
    }
}

/// Sample-by-sample state of a [`Plant`].
#[derive(Debug, Clone)]
pub enum PlantState {
    Static(StaticPolynomial),
    Lti(lti::LtiState),
    Wh(lti::LtiState, StaticPolynomial, lti::LtiState),
    Duffing(duffing::DuffingState),
}

impl PlantState {
    pub fn step(&mut self, u: f64) -> f64 {
        match self {
            PlantState::Static(p) => p.eval(u),
            PlantState::Lti(s) => s.step(u),
            PlantState::Wh(r, f, s) => s.step(f.eval(r.step(u))),
            PlantState::Duffing(d) => d.step(u),
        }
    }
}

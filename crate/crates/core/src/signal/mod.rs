//! Excitation design: frequency grids, random-phase multisines and
//! orthogonal multi-input sets.

pub mod grid;
pub mod multisine;
pub mod orthogonal;
pub mod riemann;

pub use grid::{FrequencyGrid, GridKind};
pub use multisine::{flat_profile, profile_from_psd, Line, MultisineRealization};
pub use orthogonal::OrthogonalMultisineSet;
pub use riemann::{verify_band_power, BandDeviation, TabulatedPsd};

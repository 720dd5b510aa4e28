//! Nonparametric and parametric identification of nonlinear systems with
//! periodic random-phase multisine excitations.
//!
//! The crate covers excitation design ([`signal`]), simulation of the test
//! systems ([`plant`]), per-period spectral analysis and distortion
//! classification ([`spectral`]), best-linear-approximation oracles and
//! rational model fitting ([`bla`]), closed-loop analysis ([`closed_loop`]),
//! and the config / file / report plumbing ([`io`]).
//!
//! All DFTs are unnormalized (see [`dft`]).

pub mod bla;
pub mod closed_loop;
pub mod dft;
pub mod error;
pub mod io;
pub(crate) mod linalg;
pub(crate) mod par;
pub mod plant;
pub mod record;
pub mod seed;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use record::{Channel, Provenance, Record};

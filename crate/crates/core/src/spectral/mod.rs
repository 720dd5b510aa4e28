//! Nonparametric analysis of periodic records: spectra, line statistics,
//! distortion classification, FRF estimation and HOSIDF.

pub mod classify;
pub mod frf;
pub mod hosidf;
pub mod mimo;
pub mod spectra;
pub mod stats;

pub use classify::{classify_bin, classify_distortions, db, BinLevel, DistortionReport, LineClass};
pub use frf::{
    estimate_frf, frf_cross_spectral, frf_division, robust_method, FlagReason, FlaggedBin, FrfEstimate,
    FrfInput, FrfLine, FrfMode, DEFAULT_DIP_FLOOR,
};
pub use hosidf::{hosidf, HosidfCurve, HosidfPoint};
pub use mimo::{mimo_frf, MimoFrf, MimoLine, DEFAULT_CONDITION_LIMIT};
pub use spectra::{period_dfts, SpectralSet};
pub use stats::{line_statistics, LineAverages, Scope};

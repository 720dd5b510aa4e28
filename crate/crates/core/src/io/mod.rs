//! Configuration, record files, the end-to-end pipeline and report emission.

pub mod config;
pub mod pipeline;
pub mod record_file;
pub mod report;
mod svg;

pub use config::{bundled, ExperimentConfig, BUNDLED};
pub use pipeline::{analyze, closed_loop, design, fit, run_pipeline, simulate, ClosedLoopOutputs, LevelResult, ResultBundle};
pub use record_file::{decode_record, encode_record, read_record, write_record};
pub use report::{available_kinds, emit_report, render_plots, render_table, ReportKind};

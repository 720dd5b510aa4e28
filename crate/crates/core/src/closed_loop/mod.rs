//! Closed-loop FRF prediction, detection-line feedback correction and the
//! reference-based (indirect) BLA estimator.

pub mod correct;
pub mod indirect;
pub mod predict;

pub use correct::{correct_feedback, CorrectedLine, CorrectionResult};
pub use indirect::{indirect_frf, IndirectEstimate, IndirectLine};
pub use predict::{mixture, predict_closed_loop_frf, LoopPoint, LoopPrediction};

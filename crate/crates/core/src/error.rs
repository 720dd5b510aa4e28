use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid excitation: {0}")]
    InvalidExcitation(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("simulation diverged at sample {sample} (|y| = {magnitude:e} > {bound:e}); likely not a fading-memory regime")]
    Diverged {
        sample: usize,
        magnitude: f64,
        bound: f64,
    },

    #[error("realization {index}: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("record shape mismatch at byte {offset}: {message}")]
    RecordFormat { offset: u64, message: String },

    #[error("rank-deficient jacobian; deficient directions: {0}")]
    RankDeficient(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    MissingArtifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category, printed by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "grid",
            Error::InvalidExcitation(_) => "excitation",
            Error::InvalidFilter(_) => "filter",
            Error::InvalidArgument(_) => "argument",
            Error::Diverged { .. } => "divergence",
            Error::Realization { source, .. } | Error::Stage { source, .. } => source.category(),
            Error::RecordFormat { .. } => "record-format",
            Error::RankDeficient(_) => "rank-deficient",
            Error::Config(_) => "config",
            Error::MissingArtifact(_) => "missing-artifact",
            Error::Io(_) => "io",
            Error::Json(_) => "serialization",
        }
    }

    pub(crate) fn in_realization(self, index: usize) -> Error {
        Error::Realization {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

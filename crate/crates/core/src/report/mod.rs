//! State files, canonical states, per-state measure records and verification sweeps.

use std::path::PathBuf;

use thiserror::Error;

pub mod canonical;
pub mod measure;
mod statefile;
pub mod sweep;

pub use measure::{measure, BipartiteRecord, MeasureRecord};
pub use statefile::{BasisFile, LoadedState, StateFile};
pub use sweep::{run_sweep, Check, SweepConfig, VerificationReport};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed state file: {0}")]
    Shape(String),

    #[error(transparent)]
    State(#[from] crate::error::Error),

    #[error("{0}")]
    UnknownState(String),

    #[error("{0}")]
    BadArgs(String),
}

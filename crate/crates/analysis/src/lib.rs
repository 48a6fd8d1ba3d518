//! Aggregation and statistics over prediction records: per-style accuracy,
//! the point-biserial correlation between local homophily and correctness,
//! and perturbation curves.

mod curve;
mod records;
mod report;
mod stats;

pub use curve::{perturbation_curve, CurveRow, CurveTable};
pub use records::{read_records, write_records, PredictionRecord};
pub use report::{build_report, write_curve_tsvs, AccuracyRow, CorrelationRow, ExperimentReport, ReportMeta, RewireRow};
pub use stats::{accuracy, point_biserial, CorrelationResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, AnalysisError>;

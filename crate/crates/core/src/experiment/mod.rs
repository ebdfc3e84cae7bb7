//! Experiment planning and analysis.
//!
//! Factors are classified as controllable (set by the experimenter),
//! observable (known but not set) or noise (neither known nor set); the
//! measured outputs are response factors. A full-factorial [`Design`]
//! crosses every non-response factor, [`robust_select`] picks the best
//! controllable configuration per observable level while aggregating over
//! noise, and [`ReportSkeleton`] structures the write-up.
//!
//! Replicates are kept as a separate index and aggregated together with the
//! noise factors.

mod design;
mod io;
mod report;
mod select;

use thiserror::Error;

pub use design::{classify_factors, full_factorial, Assignment, Design, FactorCategory, FactorSpec, Level, RawFactor};
pub use io::{parse_design_csv, parse_runs_csv, write_cells_csv, write_design_csv, write_runs_csv};
pub use report::{render_report, report_skeleton, ReportMetadata, ReportSkeleton, Section, SectionKind};
pub use select::{robust_select, Aggregation, Direction, RobustSelection, RunRecord, SelectionEntry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("factor name {0:?} used more than once")]
    DuplicateName(String),
    #[error("response factor {0:?} must not have levels")]
    ResponseWithLevels(String),
    #[error("noise factor {0:?} cannot condition the selection")]
    NoiseConditioning(String),
    #[error("factor {0:?} needs at least one level")]
    EmptyLevels(String),
    #[error("factor {factor:?} has duplicate level label {label:?}")]
    DuplicateLevel { factor: String, label: String },
    #[error("design needs at least one controllable factor")]
    MissingControllable,
    #[error("design needs at least one response factor")]
    MissingResponse,
    #[error("replicates must be at least 1")]
    InvalidReplicates,
    #[error("runs missing for {} cell/replicate combination(s): {}", .0.len(), .0.join("; "))]
    IncompleteRuns(Vec<String>),
    #[error("unknown response {0:?}")]
    UnknownResponse(String),
    #[error("run does not match any design cell: {0}")]
    UnknownCell(String),
    #[error("duplicate run for {0}")]
    DuplicateRun(String),
    #[error("run {run} lacks response {response:?}")]
    MissingResponseValue { run: String, response: String },
    #[error("CSV error: {0}")]
    Csv(String),
}

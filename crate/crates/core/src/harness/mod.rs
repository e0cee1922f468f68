//! Support code for the `projrot` command-line tool: rate profiles, run
//! reports, convergence studies and kernel timing.

pub mod bench;
pub mod convergence;
pub mod profile;
pub mod report;

use thiserror::Error;

pub use bench::{run_bench, BenchOptions, BenchReport};
pub use convergence::{
    fit_loglog_slope, geometric_ladder, run_convergence, write_convergence, ConvergenceOptions,
    ConvergenceSeries,
};
pub use profile::{load_rate_csv, RateProfile, SampledRate, Tumble};
pub use report::{
    parse_report, reference_attitudes, report_rows, run_integrate, IntegrateOptions, Rep,
    ReportRow, RunReport, RunSummary, REPORT_HEADER,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),

    #[error("bad profile: {0}")]
    Profile(String),

    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] crate::error::Error),
}

impl HarnessError {
    /// True for errors caused by bad flags or inputs rather than by a run.
    pub fn is_usage(&self) -> bool {
        match self {
            HarnessError::Usage(_)
            | HarnessError::Profile(_)
            | HarnessError::Csv { .. }
            | HarnessError::Io(_) => true,
            HarnessError::Core(e) => matches!(e, crate::error::Error::Config(_)),
        }
    }
}

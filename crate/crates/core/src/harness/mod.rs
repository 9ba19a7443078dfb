//! Benchmark grid over quasi-likelihood problems, CSV records and summaries.

pub mod config;
pub mod gradcheck;
pub mod record;
pub mod runner;

pub use config::{ExperimentConfig, MethodChoice, EVENT_DRIVEN, SEED_ENV};
pub use gradcheck::{
    check_point, gradcheck_frankenstein, gradcheck_ql, GradcheckPoint, GRADCHECK_TOL,
};
pub use record::{read_runs, summarize, write_summary, RunRecord, RunWriter, SummaryRow};
pub use runner::{build_cells, build_jobs, run_experiment, run_experiment_csv, run_job, Cell, Job};

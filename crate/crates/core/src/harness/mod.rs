//! Experiment runner: configs, parallel multi-seed execution and CSV output.

pub mod config;
mod records;
mod run;

pub use config::{
    load_config, parse_config, resolve_config, shipped_config, Algorithm, AlgorithmChoice, ExperimentConfig, Sweep,
    SweepAxis, SHIPPED,
};
pub use records::{
    median, read_records, read_summary, summarize, to_db, write_records, write_summary, write_trace, RunRecord,
    SummaryRow, RUNS_HEADER, SUMMARY_HEADER, TRACE_HEADER,
};
pub use run::{execute, run_experiment, train, write_outputs, RunOutcome};

//! Experiment plumbing: TOML configs, ensemble runs and sweeps, result
//! files, and fit reports.

mod config;
mod output;
mod report;
mod run;

pub use config::{
    Ensemble, ExperimentConfig, Limits, Observables, OutputFormat, OutputSpec, SweepAxes,
    SweepConfig, SCHEMA_VERSION,
};
pub use output::{
    format_float, meta_path, parse_series_csv, to_csv, to_json, write_atomic, write_record,
    SeriesTable,
};
pub use report::{fit_report, fit_series, max_decay_factor, FitReport};
pub use run::{columns, execute, run, sweep, RunRecord};

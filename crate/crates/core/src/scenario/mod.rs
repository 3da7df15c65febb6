//! Scenario orchestration, diagnostics, studies, and file output.

mod config;
mod diagnostics;
mod oracle;
mod output;
mod run;
mod studies;

pub use config::{ScenarioConfig, ScenarioKind};
pub use diagnostics::{e_amplitude, fit_rate, relative_e_error, GridField, TimeSeries};
pub use oracle::{PhaseGrid, SlOracle};
pub use output::{format_float, read_summary_value, write_csv, write_summary};
pub use run::{run_scenario, RunArtifacts, RunSummary};
pub use studies::{
    convergence_study, error_scaling_study, landau_oracle_run, runtime_scaling_study,
    ConvergenceRow, ConvergenceTable, ErrorScalingParams, ErrorScalingResult,
    RuntimeScalingResult,
};

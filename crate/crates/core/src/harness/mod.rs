//! Scenario configuration, verification suites and output files.

pub mod config;
pub mod expr;
pub mod output;
pub mod report;
pub mod scenario;
pub mod suites;

pub use config::{CheckId, ScenarioConfig};
pub use output::{emit_csv, emit_report};
pub use report::{CheckRecord, Status, VerificationReport};
pub use scenario::{run_scenario, run_to_dir, ScenarioOutcome};
pub use suites::{run_suite, Suite};

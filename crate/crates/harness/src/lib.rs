//! Verification suites over `dyadic_core` with CSV/JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod sample;
pub mod suites;

pub use config::{ExperimentSpec, Suite, SuiteConfig};
pub use error::{HarnessError, Result};
pub use report::{emit_report, ExperimentReport, Format};
pub use suites::{run, run_with_jobs};

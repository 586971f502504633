//! The verification suites. Each returns a report whose pass flag is exactly the
//! conjunction of its rows.

mod allocation;
mod bellman;
mod delta;
mod inequality;
mod lorentz;
mod sharpness;
mod triple_norm;

use std::time::Instant;

use serde::Serialize;

pub use allocation::run_allocation_suite;
pub use bellman::run_bellman_suite;
pub use delta::run_delta_suite;
pub use inequality::run_inequality_suite;
pub use lorentz::run_lorentz_suite;
pub use sharpness::run_sharpness_suite;
pub use triple_norm::run_triple_norm_suite;

use crate::config::{ExperimentSpec, Suite, SuiteConfig};
use crate::error::{config_error, Result};
use crate::report::{config_hash, ExperimentReport, PlotTable, Provenance, Row};

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.config.validate()?;
    match &spec.config {
        SuiteConfig::Inequality(c) => run_inequality_suite(c, spec.seed),
        SuiteConfig::Sharpness(c) => run_sharpness_suite(c, spec.seed),
        SuiteConfig::Bellman(c) => run_bellman_suite(c, spec.seed),
        SuiteConfig::Delta(c) => run_delta_suite(c, spec.seed),
        SuiteConfig::TripleNorm(c) => run_triple_norm_suite(c, spec.seed),
        SuiteConfig::Lorentz(c) => run_lorentz_suite(c, spec.seed),
        SuiteConfig::Allocation(c) => run_allocation_suite(c, spec.seed),
    }
}

/// Runs `spec` on a dedicated pool of `jobs` threads; `None` uses rayon's default.
pub fn run_with_jobs(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ExperimentReport> {
    let Some(jobs) = jobs else {
        return run(spec);
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| config_error(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| run(spec))
}

fn finish<C: Serialize>(
    suite: Suite,
    config: &C,
    seed: u64,
    rows: Vec<Row>,
    plot: Option<PlotTable>,
    started: Instant,
) -> ExperimentReport {
    let provenance = Provenance {
        seed,
        config_sha256: config_hash(config),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    ExperimentReport::assemble(suite.name(), rows, provenance, plot, started.elapsed())
}

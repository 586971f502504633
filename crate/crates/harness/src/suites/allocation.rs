use std::time::Instant;

use dyadic_core::profile::{merged_distribution, rearrange_with_averages};
use rayon::prelude::*;

use super::finish;
use crate::config::{AllocationConfig, Suite};
use crate::error::Result;
use crate::report::{params, ExperimentReport, Row};
use crate::sample::{instance_rng, partition, step_profile};

/// Splitting a random step profile into parts of prescribed measures, each
/// averaging `∫g`: part averages hit the target and the parts together carry
/// exactly the distribution of `g`.
pub fn run_allocation_suite(config: &AllocationConfig, seed: u64) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let rows: Vec<Vec<Row>> = (0..config.instances)
        .into_par_iter()
        .map(|i| instance(config, seed, i))
        .collect();
    let rows = rows.into_iter().flatten().collect();
    Ok(finish(Suite::Allocation, config, seed, rows, None, started))
}

fn instance(config: &AllocationConfig, seed: u64, i: usize) -> Vec<Row> {
    let mut rng = instance_rng(seed, i);
    let g = step_profile(&mut rng, config.max_pieces, 10.0);
    let parts = partition(&mut rng, config.max_parts);
    let f = g.integral();
    let ps = params([("parts", parts.len() as f64), ("f", f)]);
    let out = match rearrange_with_averages(&g, &parts, f) {
        Ok(out) => out,
        Err(e) => return vec![Row::failed("part_averages", ps, config.average_tol, e)],
    };
    let farthest = out
        .iter()
        .map(|s| s.average())
        .max_by(|a, b| (a - f).abs().total_cmp(&(b - f).abs()))
        .unwrap_or(f64::NAN);
    let mut rows = vec![Row::close(
        "part_averages",
        ps.clone(),
        farthest,
        f,
        config.average_tol,
    )];

    let merged = merged_distribution(
        out.iter()
            .flat_map(|s| s.distribution().unwrap_or_default()),
    );
    let expected = merged_distribution(
        g.as_step()
            .expect("sampled profiles are steps")
            .distribution(),
    );
    let same_values =
        merged.len() == expected.len() && merged.iter().zip(&expected).all(|(a, b)| a.0 == b.0);
    let row = if same_values {
        let gap = merged
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max);
        Row::close("distribution_merges", ps, gap, 0.0, config.measure_tol)
    } else {
        Row::failed(
            "distribution_merges",
            ps,
            config.measure_tol,
            "value sets differ",
        )
    };
    rows.push(row);
    rows
}

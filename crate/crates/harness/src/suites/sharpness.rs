use std::time::Instant;

use dyadic_core::extremal::{lower_bound_sum_at_depth, sharpness_gap, SharpnessGap};
use dyadic_core::Error;
use rayon::prelude::*;

use super::finish;
use crate::config::{SharpnessConfig, Suite};
use crate::error::Result;
use crate::report::{params, ExperimentReport, PlotTable, Row};

/// Sweeps `a` for one extremal instance: the ratio lower/upper stays at most 1,
/// improves along the grid and reaches the target at the end.
pub fn run_sharpness_suite(config: &SharpnessConfig, seed: u64) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let gaps: Vec<(f64, dyadic_core::Result<Evaluated>)> = config
        .a_grid
        .par_iter()
        .map(|&a| (a, evaluate(config, a)))
        .collect();

    let mut rows = Vec::new();
    let mut plot = Vec::new();
    let mut ratios: Vec<(f64, f64)> = Vec::new();
    for (a, gap) in gaps {
        let ps = params([("a", a)]);
        let (gap, staircase) = match gap {
            Ok(v) => v,
            Err(e @ Error::Divergence(_)) => {
                rows.push(Row::recorded("divergent", ps, e));
                continue;
            }
            Err(e) => {
                rows.push(Row::failed("ratio_le_one", ps, config.upper_tol, e));
                continue;
            }
        };
        let ps = params([("a", a), ("m_a", gap.m_a as f64)]);
        rows.push(Row::at_most(
            "ratio_le_one",
            ps.clone(),
            gap.ratio,
            1.0,
            config.upper_tol,
        ));
        if let (Some(concrete), Some(staircase)) = (gap.lower_concrete, staircase) {
            rows.push(Row::close(
                "concrete_matches_staircase",
                ps.clone(),
                concrete,
                staircase,
                config.concrete_tol,
            ));
        }
        if let Some(&(_, prev)) = ratios.last() {
            rows.push(Row::at_least(
                "ratio_nondecreasing",
                ps,
                gap.ratio,
                prev,
                config.slack,
            ));
        }
        ratios.push((a, gap.ratio));
        plot.push(vec![
            a,
            gap.m_a as f64,
            gap.lower_analytic,
            gap.lower_concrete.unwrap_or(f64::NAN),
            gap.upper,
            gap.ratio,
        ]);
    }
    if let Some(&(a, ratio)) = ratios.last() {
        rows.push(Row::at_least(
            "final_ratio",
            params([("a", a)]),
            ratio,
            config.target,
            0.0,
        ));
    }
    let plot = PlotTable {
        columns: [
            "a",
            "m_a",
            "lower_analytic",
            "lower_concrete",
            "upper",
            "ratio",
        ]
        .map(String::from)
        .to_vec(),
        rows: plot,
    };
    Ok(finish(
        Suite::Sharpness,
        config,
        seed,
        rows,
        Some(plot),
        started,
    ))
}

/// The gap and, when a tree was built, the staircase truncated at the tree depth.
type Evaluated = (SharpnessGap, Option<f64>);

fn evaluate(config: &SharpnessConfig, a: f64) -> dyadic_core::Result<Evaluated> {
    let gap = sharpness_gap(&config.extremal(a), true)?;
    let staircase = match gap.lower_concrete {
        Some(_) => Some(lower_bound_sum_at_depth(
            &config.g,
            &config.h,
            &config.transform,
            a,
            config.k,
            config.levels,
        )?),
        None => None,
    };
    Ok((gap, staircase))
}

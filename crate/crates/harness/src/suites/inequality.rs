use std::time::Instant;

use dyadic_core::maximal::{lhs_integral, lhs_integral_initial, maximal_function, MeasurableSet};
use dyadic_core::profile::{rhs_integral, MonotoneProfile, MonotoneTransform};
use dyadic_core::tree::{build_uniform_tree, tree_rearrangement, Tree, TreeFunction};
use rand::Rng;
use rayon::prelude::*;

use super::finish;
use crate::config::{InequalityConfig, Suite};
use crate::error::Result;
use crate::report::{params, ExperimentReport, Row};
use crate::sample::{instance_rng, measurable_set, step_profile};

/// `∫_K G((M φ)*) h ≤ ∫_0^k G(A φ*) h` on random trees, profiles and sets, where
/// `φ*` is the rearrangement of the sampled tree function itself.
pub fn run_inequality_suite(config: &InequalityConfig, seed: u64) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let trees = (1..=config.max_depth)
        .map(|d| build_uniform_tree(d, 2))
        .collect::<dyadic_core::Result<Vec<_>>>()?;

    let mut rows: Vec<Row> = (0..config.instances)
        .into_par_iter()
        .map(|i| random_instance(config, &trees, seed, i))
        .collect();
    rows.extend(fixed_rows(config, &trees)?);
    Ok(finish(Suite::Inequality, config, seed, rows, None, started))
}

fn random_instance(config: &InequalityConfig, trees: &[Tree], seed: u64, i: usize) -> Row {
    let mut rng = instance_rng(seed, i);
    let g = step_profile(&mut rng, config.max_pieces, config.max_value);
    let h = step_profile(&mut rng, config.max_h_pieces, config.max_value);
    let which = rng.gen_range(0..config.transforms.len());
    let depth = rng.gen_range(1..=config.max_depth);
    let set = measurable_set(&mut rng, config.max_set_pieces);
    let tree_seed: u64 = rng.gen();
    let pieces = g.as_step().map_or(0, |s| s.values().len());
    let ps = params([
        ("depth", depth as f64),
        ("pieces", pieces as f64),
        ("transform", which as f64),
        ("k", set.measure()),
    ]);
    let tree = &trees[depth as usize - 1];
    let transform = &config.transforms[which];
    let eval = || -> dyadic_core::Result<(f64, f64)> {
        let phi = tree_rearrangement(&g, tree, tree_seed)?;
        let lhs = lhs_integral(&maximal_function(&phi), &set, &h, transform);
        let rhs = rhs_integral(&phi.rearrangement()?, &h, transform, set.measure())?;
        Ok((lhs, rhs))
    };
    match eval() {
        Ok((lhs, rhs)) => Row::at_most("lhs_le_rhs", ps, lhs, rhs, config.tol),
        Err(e) => Row::failed("lhs_le_rhs", ps, config.tol, e),
    }
}

/// Hand-checkable cases: constants and the two-leaf tree.
fn fixed_rows(config: &InequalityConfig, trees: &[Tree]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    // φ ≡ c: both sides are G(c) times the h-measure of their sets.
    let tree = &trees[(config.max_depth.min(3) - 1) as usize];
    let c = 1.7;
    let phi = TreeFunction::new(tree, vec![c; tree.leaf_count()])?;
    let h = MonotoneProfile::step(vec![0.0, 0.3, 1.0], vec![2.0, 0.5])?;
    let square = MonotoneTransform::Power(2.0);
    let set = MeasurableSet::new(vec![(0.1, 0.2), (0.5, 0.9)])?;
    let k = set.measure();
    let lhs = lhs_integral(&maximal_function(&phi), &set, &h, &square);
    let rhs = rhs_integral(&MonotoneProfile::constant(c)?, &h, &square, k)?;
    let v_set: f64 = set
        .intervals()
        .iter()
        .map(|&(a, b)| h.integrate(a, b))
        .sum();
    let scaled = rhs * v_set / h.integrate(0.0, k);
    rows.push(Row::close(
        "constant_profile",
        params([("c", c), ("k", k)]),
        lhs,
        scaled,
        config.tol,
    ));

    // Leaves (2, 1): (M φ)* is 2 on (0, 1/2] and 3/2 on (1/2, 1].
    let two = &trees[0];
    let phi = TreeFunction::new(two, vec![2.0, 1.0])?;
    let result = maximal_function(&phi);
    let one = MonotoneProfile::constant(1.0)?;
    for k in [0.25, 0.75, 1.0] {
        let lhs = lhs_integral_initial(&result, k, &one, &MonotoneTransform::Identity)?;
        let closed = 2.0 * f64::min(k, 0.5) + 1.5 * f64::max(k - 0.5, 0.0);
        rows.push(Row::close(
            "two_leaf_closed_form",
            params([("k", k)]),
            lhs,
            closed,
            config.tol,
        ));
    }
    Ok(rows)
}

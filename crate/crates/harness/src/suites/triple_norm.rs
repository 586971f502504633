use std::time::Instant;

use dyadic_core::bellman::{conjugate, e_constant};
use dyadic_core::maximal::maximal_function;
use dyadic_core::norms::{triple_norm, weak_norm};
use dyadic_core::profile::{rhs_integral, MonotoneProfile, MonotoneTransform};
use dyadic_core::tree::{build_uniform_tree, tree_rearrangement, Tree};
use rand::Rng;
use rayon::prelude::*;

use super::finish;
use crate::config::{Suite, TripleNormConfig};
use crate::error::Result;
use crate::report::{params, ExperimentReport, Row};
use crate::sample::{section_rng, step_profile};

/// The witness identity for the weak-type constant, the norm sandwich
/// `‖g‖_{p,∞} ≤ |||g|||_{p,∞} ≤ p' ‖g‖_{p,∞}`, and the chain
/// `|||(M φ)*|||_{p,∞} ≤ p'^2 ‖φ*‖_{p,∞}` on random tree functions.
pub fn run_triple_norm_suite(config: &TripleNormConfig, seed: u64) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let mut rows = Vec::new();
    for &p in &config.p_grid {
        let cutoff = config.f.powf(p / (p - 1.0));
        for &s in &config.k0_fractions {
            let k0 = s * cutoff;
            let ps = params([("p", p), ("f", config.f), ("k0", k0)]);
            match witness(p, cutoff, k0) {
                Ok(v) => rows.push(Row::close(
                    "witness_identity",
                    ps,
                    v,
                    conjugate(p),
                    config.witness_tol,
                )),
                Err(e) => rows.push(Row::failed("witness_identity", ps, config.witness_tol, e)),
            }
        }
        let ps = params([("p", p)]);
        match e_constant(p, (p - 1.0) / p) {
            Ok(e) => rows.push(Row::close(
                "e_constant",
                ps,
                e,
                conjugate(p),
                config.witness_tol,
            )),
            Err(e) => rows.push(Row::failed("e_constant", ps, config.witness_tol, e)),
        }
    }

    let sandwich: Vec<Vec<Row>> = (0..config.sandwich_instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = section_rng(seed, 0, i);
            let p = config.p_grid[rng.gen_range(0..config.p_grid.len())];
            let g = step_profile(&mut rng, config.max_pieces, 4.0);
            let ps = params([("p", p)]);
            match (weak_norm(&g, p), triple_norm(&g, p)) {
                (Ok(w), Ok(t)) => vec![
                    Row::at_most("sandwich_lower", ps.clone(), w, t, config.sandwich_tol),
                    Row::at_most(
                        "sandwich_upper",
                        ps,
                        t,
                        conjugate(p) * w,
                        config.sandwich_tol,
                    ),
                ],
                (Err(e), _) | (_, Err(e)) => {
                    vec![Row::failed("sandwich_lower", ps, config.sandwich_tol, e)]
                }
            }
        })
        .collect();
    rows.extend(sandwich.into_iter().flatten());

    let trees = (1..=config.max_depth)
        .map(|d| build_uniform_tree(d, 2))
        .collect::<dyadic_core::Result<Vec<_>>>()?;
    rows.par_extend(
        (0..config.chain_instances)
            .into_par_iter()
            .map(|i| chain(config, &trees, seed, i)),
    );
    Ok(finish(Suite::TripleNorm, config, seed, rows, None, started))
}

/// `k0^{-1+1/p} ∫_0^{k0} A ψ` for `ψ(u) = (p-1)/p · u^{-1/p}` on `(0, cutoff]`.
fn witness(p: f64, cutoff: f64, k0: f64) -> dyadic_core::Result<f64> {
    let psi = MonotoneProfile::power((p - 1.0) / p, -1.0 / p, cutoff)?;
    let one = MonotoneProfile::constant(1.0)?;
    let integral = rhs_integral(&psi, &one, &MonotoneTransform::Identity, k0)?;
    Ok(k0.powf(-1.0 + 1.0 / p) * integral)
}

fn chain(config: &TripleNormConfig, trees: &[Tree], seed: u64, i: usize) -> Row {
    let mut rng = section_rng(seed, 1, i);
    let p = config.p_grid[rng.gen_range(0..config.p_grid.len())];
    let depth = rng.gen_range(1..=config.max_depth);
    let g = step_profile(&mut rng, config.max_pieces, 4.0);
    let tree_seed: u64 = rng.gen();
    let ps = params([("p", p), ("depth", depth as f64)]);
    let eval = || -> dyadic_core::Result<(f64, f64)> {
        let phi = tree_rearrangement(&g, &trees[depth as usize - 1], tree_seed)?;
        let lhs = triple_norm(maximal_function(&phi).rearrangement(), p)?;
        let bound = conjugate(p).powi(2) * weak_norm(&phi.rearrangement()?, p)?;
        Ok((lhs, bound))
    };
    match eval() {
        Ok((lhs, bound)) => Row::at_most("maximal_chain", ps, lhs, bound, config.chain_tol),
        Err(e) => Row::failed("maximal_chain", ps, config.chain_tol, e),
    }
}

use std::time::Instant;

use dyadic_core::bellman::{bellman_b, h_p, omega};
use dyadic_core::profile::{rhs_integral, MonotoneProfile, MonotoneTransform};
use dyadic_core::quadrature::tanh_sinh;
use rand::Rng;
use rayon::prelude::*;

use super::finish;
use crate::config::{BellmanConfig, Suite};
use crate::error::Result;
use crate::report::{params, ExperimentReport, Row};
use crate::sample::{instance_rng, step_profile};

pub fn run_bellman_suite(config: &BellmanConfig, seed: u64) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let mut rows = Vec::new();

    // Power witnesses t^{-β} attain B_p(f, F).
    for &p in &config.witness_p {
        for &beta in &config.betas {
            let ps = params([("p", p), ("beta", beta)]);
            match witness(p, beta) {
                Ok((quad, hardy, b)) => {
                    rows.push(Row::close(
                        "witness_quadrature",
                        ps.clone(),
                        quad,
                        b,
                        config.witness_tol,
                    ));
                    rows.push(Row::close(
                        "witness_hardy_integral",
                        ps.clone(),
                        hardy,
                        b,
                        config.witness_tol,
                    ));
                    let closed = (1.0 - beta).powf(-p) / (1.0 - p * beta);
                    rows.push(Row::close(
                        "witness_closed_form",
                        ps,
                        b,
                        closed,
                        config.witness_tol,
                    ));
                }
                Err(e) => rows.push(Row::failed("witness_quadrature", ps, config.witness_tol, e)),
            }
        }
    }

    rows.par_extend((0..config.random_instances).into_par_iter().map(|i| {
        let mut rng = instance_rng(seed, i);
        let p = config.random_p[rng.gen_range(0..config.random_p.len())];
        let g = step_profile(&mut rng, config.max_pieces, 4.0);
        let ps = params([("p", p), ("f", g.integral())]);
        let eval = || -> dyadic_core::Result<(f64, f64)> {
            let one = MonotoneProfile::constant(1.0)?;
            let lhs = rhs_integral(&g, &one, &MonotoneTransform::power(p)?, 1.0)?;
            let big_f = g.power_integral(p, 0.0, 1.0)?;
            Ok((lhs, bellman_b(p, g.integral(), big_f)?))
        };
        match eval() {
            Ok((lhs, b)) => Row::at_most("hardy_le_bellman", ps, lhs, b, config.random_tol),
            Err(e) => Row::failed("hardy_le_bellman", ps, config.random_tol, e),
        }
    }));

    let n = config.omega_points;
    for &p in &config.omega_p {
        for i in 0..n {
            let y = if n == 1 {
                1.0
            } else {
                i as f64 / (n - 1) as f64
            };
            let ps = params([("p", p), ("y", y)]);
            match omega(p, y).and_then(|z| h_p(p, z)) {
                Ok(back) => rows.push(Row::close("omega_inverse", ps, back, y, config.omega_tol)),
                Err(e) => rows.push(Row::failed("omega_inverse", ps, config.omega_tol, e)),
            }
        }
    }
    Ok(finish(Suite::Bellman, config, seed, rows, None, started))
}

/// Quadrature of `∫_0^1 (A g)^p`, the library's Hardy integral, and `B_p(f, F)`
/// for `g(t) = t^{-β}`.
fn witness(p: f64, beta: f64) -> dyadic_core::Result<(f64, f64, f64)> {
    let g = MonotoneProfile::power(1.0, -beta, 1.0)?;
    let quad = tanh_sinh(&|t: f64| (g.integrate(0.0, t) / t).powf(p), 0.0, 1.0, 1e-12)?;
    let one = MonotoneProfile::constant(1.0)?;
    let hardy = rhs_integral(&g, &one, &MonotoneTransform::power(p)?, 1.0)?;
    let b = bellman_b(p, g.integral(), g.power_integral(p, 0.0, 1.0)?)?;
    Ok((quad, hardy, b))
}

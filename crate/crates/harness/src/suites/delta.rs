use std::time::Instant;

use dyadic_core::bellman::{delta, delta_branches, delta_junction};
use dyadic_core::profile::{rhs_integral, MonotoneProfile, MonotoneTransform};
use dyadic_core::quadrature::tanh_sinh;
use rayon::prelude::*;

use super::finish;
use crate::config::{DeltaConfig, Suite};
use crate::error::Result;
use crate::report::{params, ExperimentReport, PlotTable, Row};

/// `Δ(p, q, f, k)` against quadrature of `∫_0^k min(f/t, t^{-1/p})^q dt`, branch
/// agreement at the junction, and attainment by the witness
/// `ψ(u) = (p-1)/p · u^{-1/p}` on `(0, f^{p/(p-1)}]`.
pub fn run_delta_suite(config: &DeltaConfig, seed: u64) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let mut triples = Vec::new();
    for &p in &config.p_grid {
        for &s in &config.q_fractions {
            for &f in &config.f_grid {
                triples.push((p, 1.0 + s * (p - 1.0), f));
            }
        }
    }
    let blocks: Vec<(Vec<Row>, Vec<Vec<f64>>)> = triples
        .par_iter()
        .map(|&(p, q, f)| block(config, p, q, f))
        .collect();
    let mut rows = Vec::new();
    let mut plot = Vec::new();
    for (r, t) in blocks {
        rows.extend(r);
        plot.extend(t);
    }
    let ps = params([("p", 2.0), ("q", 1.5), ("f", 0.25), ("k", 0.25)]);
    match delta(2.0, 1.5, 0.25, 0.25) {
        Ok(d) => rows.push(Row::close("closed_form_example", ps, d, 2.5, config.tol)),
        Err(e) => rows.push(Row::failed("closed_form_example", ps, config.tol, e)),
    }
    let plot = PlotTable {
        columns: ["p", "q", "f", "k", "delta", "quadrature", "witness"]
            .map(String::from)
            .to_vec(),
        rows: plot,
    };
    Ok(finish(
        Suite::Delta,
        config,
        seed,
        rows,
        Some(plot),
        started,
    ))
}

fn block(config: &DeltaConfig, p: f64, q: f64, f: f64) -> (Vec<Row>, Vec<Vec<f64>>) {
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let j = delta_junction(p, f);
    let ps = params([("p", p), ("q", q), ("f", f)]);
    match delta_branches(p, q, f, j) {
        Ok((a, b)) => rows.push(Row::close(
            "junction_continuity",
            ps,
            a,
            b,
            config.junction_tol,
        )),
        Err(e) => rows.push(Row::failed(
            "junction_continuity",
            ps,
            config.junction_tol,
            e,
        )),
    }
    let witness = MonotoneProfile::power((p - 1.0) / p, -1.0 / p, j.min(1.0));
    for &k in &config.k_grid {
        let ps = params([("p", p), ("q", q), ("f", f), ("k", k)]);
        let d = match delta(p, q, f, k) {
            Ok(d) => d,
            Err(e) => {
                rows.push(Row::failed("quadrature", ps, config.tol, e));
                continue;
            }
        };
        let quad = quadrature(p, q, f, k);
        let attained = witness.clone().and_then(|w| {
            rhs_integral(
                &w,
                &MonotoneProfile::constant(1.0)?,
                &MonotoneTransform::power(q)?,
                k,
            )
        });
        match &quad {
            Ok(v) => rows.push(Row::close("quadrature", ps.clone(), d, *v, config.tol)),
            Err(e) => rows.push(Row::failed("quadrature", ps.clone(), config.tol, e)),
        }
        match &attained {
            Ok(v) => rows.push(Row::close("witness_attains", ps, *v, d, config.tol)),
            Err(e) => rows.push(Row::failed("witness_attains", ps, config.tol, e)),
        }
        let nan = f64::NAN;
        table.push(vec![
            p,
            q,
            f,
            k,
            d,
            *quad.as_ref().unwrap_or(&nan),
            *attained.as_ref().unwrap_or(&nan),
        ]);
    }
    (rows, table)
}

/// Tanh-sinh on each side of the junction, where the integrand has a kink.
fn quadrature(p: f64, q: f64, f: f64, k: f64) -> dyadic_core::Result<f64> {
    let j = delta_junction(p, f);
    let integrand = |t: f64| (f / t).min(t.powf(-1.0 / p)).powf(q);
    if k <= j {
        return tanh_sinh(&integrand, 0.0, k, 1e-13);
    }
    Ok(tanh_sinh(&integrand, 0.0, j, 1e-13)? + tanh_sinh(&integrand, j, k, 1e-13)?)
}

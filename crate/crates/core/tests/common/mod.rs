#![allow(dead_code)]

use dyadic_core::profile::{MonotoneProfile, StepFunction};
use proptest::prelude::*;

/// Nonincreasing step profile with up to `max_pieces` pieces and values in `(0, 10]`.
pub fn step_profile(max_pieces: usize) -> impl Strategy<Value = MonotoneProfile> {
    (1..=max_pieces)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.001f64..0.999, n - 1),
                prop::collection::vec(0.01f64..10.0, n),
            )
        })
        .prop_map(|(mut cuts, mut values)| {
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let mut breakpoints = vec![0.0];
            breakpoints.extend(cuts);
            breakpoints.push(1.0);
            values.truncate(breakpoints.len() - 1);
            values.sort_by(|a, b| b.total_cmp(a));
            MonotoneProfile::step(breakpoints, values).unwrap()
        })
}

/// Nonincreasing step profile constant on each cell `((j-1)/n, j/n]`.
pub fn aligned_step(n: usize) -> impl Strategy<Value = MonotoneProfile> {
    prop::collection::vec(0.0f64..5.0, n).prop_map(move |mut values| {
        values.sort_by(|a, b| b.total_cmp(a));
        MonotoneProfile::Step(StepFunction::uniform(values).unwrap())
    })
}

pub fn power_profile() -> impl Strategy<Value = MonotoneProfile> {
    (0.1f64..3.0, -0.9f64..0.0, 0.05f64..1.0)
        .prop_map(|(c, alpha, cutoff)| MonotoneProfile::power(c, alpha, cutoff).unwrap())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

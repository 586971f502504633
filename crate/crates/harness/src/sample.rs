//! Seeded random instances.

use dyadic_core::maximal::MeasurableSet;
use dyadic_core::profile::MonotoneProfile;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    section_rng(seed, 0, index)
}

/// Like [`instance_rng`], for suites with several randomized sections.
pub fn section_rng(seed: u64, section: u32, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((section as u64) << 32) | index as u64);
    rng
}

fn sorted_cuts(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.0..1.0))
        .filter(|&c| c > 0.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Nonincreasing step profile with 1 to `max_pieces` pieces and values in `[0, max_value)`.
pub fn step_profile(rng: &mut impl Rng, max_pieces: usize, max_value: f64) -> MonotoneProfile {
    let n = rng.gen_range(1..=max_pieces);
    let mut breakpoints = vec![0.0];
    breakpoints.extend(sorted_cuts(rng, n - 1));
    breakpoints.push(1.0);
    let mut values: Vec<f64> = (0..breakpoints.len() - 1)
        .map(|_| rng.gen_range(0.0..max_value))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    MonotoneProfile::step(breakpoints, values).expect("sorted cuts and values form a profile")
}

/// Union of 1 to `max_pieces` disjoint intervals in `[0, 1]`.
pub fn measurable_set(rng: &mut impl Rng, max_pieces: usize) -> MeasurableSet {
    let n = rng.gen_range(1..=max_pieces);
    let cuts = sorted_cuts(rng, 2 * n);
    let intervals: Vec<(f64, f64)> = cuts
        .chunks_exact(2)
        .filter(|c| c[1] > c[0])
        .map(|c| (c[0], c[1]))
        .collect();
    if intervals.is_empty() {
        return MeasurableSet::initial(rng.gen_range(0.01..1.0)).expect("k in (0, 1]");
    }
    MeasurableSet::new(intervals).expect("sorted disjoint intervals")
}

/// Positive weights summing to 1.
pub fn partition(rng: &mut impl Rng, max_parts: usize) -> Vec<f64> {
    let n = rng.gen_range(1..=max_parts);
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = instance_rng(7, 0).gen();
        let b: u64 = instance_rng(7, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, instance_rng(7, 0).gen::<u64>());
        assert_ne!(a, section_rng(7, 1, 0).gen::<u64>());
    }

    #[test]
    fn samples_are_valid() {
        let mut rng = instance_rng(3, 0);
        for _ in 0..200 {
            let g = step_profile(&mut rng, 16, 4.0);
            assert!(g.as_step().unwrap().values().len() <= 16);
            let k = measurable_set(&mut rng, 4);
            assert!(k.measure() > 0.0 && k.measure() <= 1.0);
            let p = partition(&mut rng, 6);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

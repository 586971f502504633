//! The extremal family `φ_a` on a split tree, the level averages `γ_m`, `θ_m`,
//! and the staircase lower bounds that approach `∫_0^k G(A g) h` as `a → 0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::maximal::{lhs_integral_initial, maximal_function};
use crate::profile::{
    allocate_equal_averages, check_integrable_near_zero, rhs_integral, MonotoneProfile,
    MonotoneTransform, SlicedProfile,
};
use crate::tree::{build_split_tree, NodeKind, Tree, TreeFunction, LEAF_CAP};

/// Extra tree levels required below `m_a`.
pub const LEVEL_BUFFER: u32 = 5;

/// Windows thinner than this end the staircase sums.
const TAIL_MEASURE: f64 = 1e-15;

/// Partial sums beyond this are reported as divergent.
const OVERFLOW_GUARD: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalConfig {
    pub a: f64,
    pub g: MonotoneProfile,
    pub h: MonotoneProfile,
    #[serde(rename = "G")]
    pub transform: MonotoneTransform,
    pub k: f64,
    pub levels: u32,
    pub fanout: u32,
}

/// The `m` with `(1-a)^{m+1} < k ≤ (1-a)^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowIndex {
    pub m: u32,
    /// `k = 1`, where no window lies strictly above `k`.
    pub degenerate: bool,
}

fn check_a_k(a: f64, k: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("a", a, "(0, 1)"));
    }
    if !(k > 0.0 && k <= 1.0) {
        return Err(domain("k", k, "(0, 1]"));
    }
    Ok(())
}

fn window_top(a: f64, m: u32) -> f64 {
    (1.0 - a).powi(m as i32)
}

pub fn m_index(a: f64, k: f64) -> Result<WindowIndex> {
    check_a_k(a, k)?;
    let guess = (k.ln() / (1.0 - a).ln()).floor();
    let mut m = if guess.is_finite() && guess > 0.0 {
        guess.min(i32::MAX as f64) as u32
    } else {
        0
    };
    while m > 0 && window_top(a, m) < k {
        m -= 1;
    }
    while window_top(a, m + 1) >= k {
        m += 1;
    }
    Ok(WindowIndex {
        m,
        degenerate: k == 1.0,
    })
}

/// `γ_m`, the average of `g` over `[(1-a)^{m+1}, (1-a)^m)`.
pub fn gamma(g: &MonotoneProfile, a: f64, m: u32) -> f64 {
    let top = window_top(a, m);
    g.integrate(top * (1.0 - a), top) / (a * top)
}

/// `θ_m`, the average of `g` over `(0, (1-a)^m]`.
pub fn theta(g: &MonotoneProfile, a: f64, m: u32) -> f64 {
    let top = window_top(a, m);
    g.integrate(0.0, top) / top
}

/// Sums `G(θ_m) ∫_{W_m ∩ (0, cap]} h` over the windows `W_m` from `m_a` down,
/// stopping at rank `stop` or once windows get thinner than [`TAIL_MEASURE`].
/// The rest, `(0, (1-a)^M]` for the final rank `M`, is charged at `G(θ_M)`,
/// which keeps the sum below the integral since `θ` grows with the rank.
fn staircase(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    a: f64,
    k: f64,
    cap: f64,
    stop: Option<u32>,
) -> Result<f64> {
    check_integrable_near_zero(g, h, transform, k)?;
    let stop = stop.unwrap_or(u32::MAX);
    let mut m = m_index(a, k)?.m.min(stop);
    let mut total = 0.0;
    while m < stop && a * window_top(a, m) >= TAIL_MEASURE {
        let top = window_top(a, m);
        let weight = h.integrate(top * (1.0 - a), top.min(cap));
        if weight > 0.0 {
            total += transform.apply(theta(g, a, m)) * weight;
        }
        if !(total.is_finite() && total < OVERFLOW_GUARD) {
            return Err(Error::Divergence(format!(
                "staircase sum passed {OVERFLOW_GUARD:e} at window {m}"
            )));
        }
        m += 1;
    }
    let rest = h.integrate(0.0, window_top(a, m).min(cap));
    if rest > 0.0 {
        total += transform.apply(theta(g, a, m)) * rest;
    }
    Ok(total)
}

/// `Σ_{m ≥ m_a} G(θ_m) ∫_{W_m ∩ (0,k]} h`, a lower bound for `∫_0^k G(A g) h`.
///
/// Since `(M φ_a)* ≥ θ_m` on `W_m = [(1-a)^{m+1}, (1-a)^m)`, this also bounds
/// `∫_0^k G((M φ_a)*) h` from below. The window containing `k` is clipped at `k`.
pub fn lower_bound_sum(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    a: f64,
    k: f64,
) -> Result<f64> {
    staircase(g, h, transform, a, k, k, None)
}

/// The same staircase without clipping at `k`, so it covers `(0, (1-a)^{m_a}]`.
pub fn window_riemann_sum(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    a: f64,
    k: f64,
) -> Result<f64> {
    staircase(g, h, transform, a, k, 1.0, None)
}

/// The clipped staircase cut at rank `depth`, with `G(θ_depth)` on all of
/// `(0, min(k, (1-a)^depth)]`. This is `∫_0^k G((M φ_a)*) h` for `φ_a` built
/// on a split tree with `depth` levels.
pub fn lower_bound_sum_at_depth(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    a: f64,
    k: f64,
    depth: u32,
) -> Result<f64> {
    staircase(g, h, transform, a, k, k, Some(depth))
}

/// `φ_a` on its split tree with the level averages it is built from.
#[derive(Debug, Clone)]
pub struct ExtremalFamily {
    tree: Tree,
    values: Vec<f64>,
    gamma: Vec<f64>,
    theta: Vec<f64>,
    m_a: u32,
}

impl ExtremalFamily {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn phi(&self) -> TreeFunction<'_> {
        TreeFunction::new(&self.tree, self.values.clone())
            .expect("leaf values were built for this tree")
    }

    /// `γ_0, …, γ_{levels-1}`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// `θ_0, …, θ_levels`.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn m_a(&self) -> u32 {
        self.m_a
    }
}

/// Builds `φ_a`: the reserved cells of rank `m` share `g` on the window
/// `[(1-a)^{m+1}, (1-a)^m)` in parts of average `γ_m`, and the rank-`levels`
/// leaves share `g` on `(0, (1-a)^levels]` in parts of average `θ_levels`. Each
/// leaf carries the average of its part.
pub fn build_extremal(config: &ExtremalConfig) -> Result<ExtremalFamily> {
    let ExtremalConfig {
        a,
        ref g,
        k,
        levels,
        fanout,
        ..
    } = *config;
    check_a_k(a, k)?;
    let m_a = m_index(a, k)?.m;
    let required = m_a + LEVEL_BUFFER;
    if levels < required {
        return Err(Error::InsufficientLevels { levels, required });
    }
    let tree = build_split_tree(a, levels, fanout)?;
    let mut leaf_slot = vec![usize::MAX; tree.len()];
    for (j, leaf) in tree.leaves().enumerate() {
        leaf_slot[leaf] = j;
    }
    let mut values = vec![0.0; tree.leaf_count()];
    let gamma_values: Vec<f64> = (0..levels).map(|m| gamma(g, a, m)).collect();
    let theta_values: Vec<f64> = (0..=levels).map(|m| theta(g, a, m)).collect();

    let mut assign = |cells: Vec<usize>, lo: f64, hi: f64, target: f64| -> Result<()> {
        let source = SlicedProfile::new(g, vec![(lo, hi)])?;
        let parts: Vec<f64> = cells.iter().map(|&c| tree.measure(c)).collect();
        let allocated = allocate_equal_averages(&source, &parts, target)?;
        if allocated.len() != cells.len() {
            return Err(Error::Allocation(format!(
                "{} parts for {} cells",
                allocated.len(),
                cells.len()
            )));
        }
        for (&cell, part) in cells.iter().zip(&allocated) {
            values[leaf_slot[cell]] = part.average();
        }
        Ok(())
    };

    for m in 0..levels {
        let cells: Vec<usize> = (0..tree.len())
            .filter(|&i| tree.kind(i) == NodeKind::Reserved && tree.rank(i) == m)
            .collect();
        let top = window_top(a, m);
        let bottom = window_top(a, m + 1);
        assign(cells, bottom, top, gamma_values[m as usize])?;
    }
    let deepest: Vec<usize> = tree
        .leaves()
        .filter(|&l| tree.kind(l) == NodeKind::Regular)
        .collect();
    assign(
        deepest,
        0.0,
        window_top(a, levels),
        theta_values[levels as usize],
    )?;

    Ok(ExtremalFamily {
        tree,
        values,
        gamma: gamma_values,
        theta: theta_values,
        m_a,
    })
}

/// How close the staircase lower bounds come to `∫_0^k G(A g) h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessGap {
    pub m_a: u32,
    pub lower_analytic: f64,
    /// `∫_0^k G((M φ_a)*) h` for the built `φ_a`; absent when the tree would be
    /// too shallow or too large.
    pub lower_concrete: Option<f64>,
    pub upper: f64,
    /// `max(lower_analytic, lower_concrete) / upper`.
    pub ratio: f64,
}

/// Whether [`build_extremal`] can run for this configuration.
pub fn concrete_feasible(config: &ExtremalConfig) -> bool {
    let Ok(idx) = m_index(config.a, config.k) else {
        return false;
    };
    let leaves = (config.fanout as u128).checked_pow(config.levels);
    config.levels >= idx.m + LEVEL_BUFFER && leaves.is_some_and(|l| 2 * l <= LEAF_CAP)
}

pub fn sharpness_gap(config: &ExtremalConfig, with_concrete: bool) -> Result<SharpnessGap> {
    let ExtremalConfig {
        a,
        ref g,
        ref h,
        ref transform,
        k,
        ..
    } = *config;
    let m_a = m_index(a, k)?.m;
    let upper = rhs_integral(g, h, transform, k)?;
    let lower_analytic = lower_bound_sum(g, h, transform, a, k)?;
    let lower_concrete = if with_concrete && concrete_feasible(config) {
        let family = build_extremal(config)?;
        let result = maximal_function(&family.phi());
        Some(lhs_integral_initial(&result, k, h, transform)?)
    } else {
        None
    };
    let lower = lower_concrete.map_or(lower_analytic, |c| c.max(lower_analytic));
    Ok(SharpnessGap {
        m_a,
        lower_analytic,
        lower_concrete,
        upper,
        ratio: if upper > 0.0 { lower / upper } else { 1.0 },
    })
}

//! The tree maximal operator, its decreasing rearrangement, and the integrals
//! `∫_K G((M φ)*) h` it is compared against.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::profile::{MonotoneProfile, MonotoneTransform};
use crate::tree::TreeFunction;

/// A finite union of disjoint intervals `(a, b]` inside `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetRepr", into = "SetRepr")]
pub struct MeasurableSet {
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct SetRepr {
    intervals: Vec<(f64, f64)>,
}

impl TryFrom<SetRepr> for MeasurableSet {
    type Error = Error;

    fn try_from(r: SetRepr) -> Result<Self> {
        MeasurableSet::new(r.intervals)
    }
}

impl From<MeasurableSet> for SetRepr {
    fn from(s: MeasurableSet) -> Self {
        SetRepr {
            intervals: s.intervals,
        }
    }
}

impl MeasurableSet {
    /// Intervals may come in any order but must not overlap.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Precondition(
                "a set needs at least one interval".into(),
            ));
        }
        if let Some(&(a, b)) = intervals
            .iter()
            .find(|&&(a, b)| !(a >= 0.0 && a < b && b <= 1.0))
        {
            return Err(Error::Precondition(format!(
                "interval ({a}, {b}] is not inside (0, 1]"
            )));
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        if intervals.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::Precondition("intervals overlap".into()));
        }
        Ok(MeasurableSet { intervals })
    }

    /// `(0, k]`.
    pub fn initial(k: f64) -> Result<Self> {
        if !(k > 0.0 && k <= 1.0) {
            return Err(domain("k", k, "(0, 1]"));
        }
        Ok(MeasurableSet {
            intervals: vec![(0.0, k)],
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < t && t <= b)
    }
}

/// `M φ` on the leaves together with its decreasing rearrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalResult {
    leaf_values: Vec<f64>,
    leaf_measures: Vec<f64>,
    rearrangement: MonotoneProfile,
}

impl MaximalResult {
    /// Indexed like the tree's leaves.
    pub fn leaf_values(&self) -> &[f64] {
        &self.leaf_values
    }

    pub fn leaf_measures(&self) -> &[f64] {
        &self.leaf_measures
    }

    /// `(M φ)*` as a step profile.
    pub fn rearrangement(&self) -> &MonotoneProfile {
        &self.rearrangement
    }
}

/// `(1/μ(I)) ∫_I φ` for every node, in node order. Leaves report their value as is.
pub fn node_averages(phi: &TreeFunction) -> Vec<f64> {
    let tree = phi.tree();
    let n = tree.len();
    let mut integrals = vec![0.0; n];
    let mut averages = vec![0.0; n];
    for (leaf, &v) in tree.leaves().zip(phi.values()) {
        integrals[leaf] = v * tree.measure(leaf);
        averages[leaf] = v;
    }
    for i in (0..n).rev() {
        if !tree.is_leaf(i) {
            integrals[i] = tree.children(i).map(|c| integrals[c]).sum();
            averages[i] = integrals[i] / tree.measure(i);
        }
    }
    averages
}

/// `M φ(x) = sup { Av_I(φ) : x ∈ I ∈ T }`, evaluated as a running maximum from the root down.
///
/// Below the leaves every average equals the leaf value, so the finite tree gives
/// the exact maximal function of a leaf-constant `φ`.
pub fn maximal_function(phi: &TreeFunction) -> MaximalResult {
    let tree = phi.tree();
    let averages = node_averages(phi);
    let mut running = averages.clone();
    for i in 1..tree.len() {
        let p = tree.parent(i).expect("every non-root node has a parent");
        if running[p] > running[i] {
            running[i] = running[p];
        }
    }
    let leaf_values: Vec<f64> = tree.leaves().map(|l| running[l]).collect();
    let leaf_measures = tree.leaf_measures();
    let pairs: Vec<(f64, f64)> = leaf_values
        .iter()
        .copied()
        .zip(leaf_measures.iter().copied())
        .collect();
    let rearrangement =
        MonotoneProfile::from_distribution(&pairs).expect("leaf measures of a valid tree sum to 1");
    MaximalResult {
        leaf_values,
        leaf_measures,
        rearrangement,
    }
}

/// `∫_K G((M φ)*(t)) h(t) dt`, exact: `(M φ)*` is a step function, so each piece
/// contributes `G(v) ∫_{K ∩ piece} h`.
pub fn lhs_integral(
    result: &MaximalResult,
    set: &MeasurableSet,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
) -> f64 {
    let step = result
        .rearrangement
        .as_step()
        .expect("maximal rearrangements are step profiles");
    step.pieces()
        .map(|(a, b, v)| {
            let weight: f64 = set
                .intervals()
                .iter()
                .filter_map(|&(s, t)| {
                    let lo = a.max(s);
                    let hi = b.min(t);
                    (hi > lo).then(|| h.integrate(lo, hi))
                })
                .sum();
            if weight == 0.0 {
                0.0
            } else {
                transform.apply(v) * weight
            }
        })
        .sum()
}

/// `∫_0^k G((M φ)*(t)) h(t) dt`, the largest value of [`lhs_integral`] over sets of measure `k`.
pub fn lhs_integral_initial(
    result: &MaximalResult,
    k: f64,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
) -> Result<f64> {
    Ok(lhs_integral(
        result,
        &MeasurableSet::initial(k)?,
        h,
        transform,
    ))
}

/// Both sides of `∫_{E_λ} φ ≥ λ μ(E_λ)`, where `E_λ = {M φ ≥ λ}` is the union of
/// the maximal nodes with average at least `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakTypeCheck {
    pub measure: f64,
    pub integral: f64,
    /// The maximal nodes making up `E_λ`.
    pub nodes: Vec<usize>,
    /// `λ ≤ ∫φ`, so `E_λ` is the whole space.
    pub degenerate: bool,
}

impl WeakTypeCheck {
    pub fn holds(&self, level: f64, rel_tol: f64) -> bool {
        self.integral >= level * self.measure * (1.0 - rel_tol)
    }
}

pub fn weak_type_check(phi: &TreeFunction, level: f64) -> Result<WeakTypeCheck> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(domain("lambda", level, "(0, ∞)"));
    }
    let tree = phi.tree();
    let averages = node_averages(phi);
    let mut covered = vec![false; tree.len()];
    let mut nodes = Vec::new();
    for i in 0..tree.len() {
        if let Some(p) = tree.parent(i) {
            covered[i] = covered[p];
        }
        if !covered[i] && averages[i] >= level {
            nodes.push(i);
            covered[i] = true;
        }
    }
    let measure = nodes.iter().map(|&i| tree.measure(i)).sum();
    let integral = nodes.iter().map(|&i| averages[i] * tree.measure(i)).sum();
    Ok(WeakTypeCheck {
        measure,
        integral,
        degenerate: level <= averages[0],
        nodes,
    })
}

//! Finite-depth trees of subintervals of `(0, 1]` and functions constant on their leaves.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::profile::{merged_distribution, MonotoneProfile};

/// Largest number of leaves a tree may have.
pub const LEAF_CAP: u128 = 1 << 24;

const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Regular,
    /// The leftmost cell `A_I` of measure `a·μ(I)` kept aside by a split tree.
    Reserved,
}

/// Nodes are stored in level order, left to right within a level, so the
/// children of every node occupy a contiguous index range.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    measures: Vec<f64>,
    parents: Vec<u32>,
    first_child: Vec<u32>,
    child_count: Vec<u32>,
    levels: Vec<u32>,
    intervals: Vec<(f64, f64)>,
    kinds: Vec<NodeKind>,
    ranks: Vec<u32>,
    leaves: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    measures: Vec<f64>,
    parents: Vec<Option<u32>>,
    levels: Vec<u32>,
    intervals: Vec<(f64, f64)>,
    kinds: Vec<NodeKind>,
    ranks: Vec<u32>,
}

impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeRepr {
            measures: self.measures.clone(),
            parents: self
                .parents
                .iter()
                .map(|&p| (p != NO_PARENT).then_some(p))
                .collect(),
            levels: self.levels.clone(),
            intervals: self.intervals.clone(),
            kinds: self.kinds.clone(),
            ranks: self.ranks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TreeRepr::deserialize(d)?;
        let n = r.measures.len();
        if [
            r.parents.len(),
            r.levels.len(),
            r.intervals.len(),
            r.kinds.len(),
            r.ranks.len(),
        ]
        .iter()
        .any(|&l| l != n)
        {
            return Err(serde::de::Error::custom("tree arrays differ in length"));
        }
        let nodes = (0..n).map(|i| RawNode {
            measure: r.measures[i],
            parent: r.parents[i],
            interval: r.intervals[i],
            kind: r.kinds[i],
            rank: r.ranks[i],
        });
        Tree::from_nodes(nodes.collect()).map_err(serde::de::Error::custom)
    }
}

struct RawNode {
    measure: f64,
    parent: Option<u32>,
    interval: (f64, f64),
    kind: NodeKind,
    rank: u32,
}

impl Tree {
    /// Assembles a tree from level-ordered nodes and checks the tree axioms.
    fn from_nodes(nodes: Vec<RawNode>) -> Result<Self> {
        let n = nodes.len();
        if n == 0 || nodes[0].parent.is_some() {
            return Err(Error::InvalidTree("node 0 must be the root".into()));
        }
        if (nodes[0].measure - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTree("the root must have measure 1".into()));
        }
        let mut t = Tree {
            measures: Vec::with_capacity(n),
            parents: Vec::with_capacity(n),
            first_child: vec![0; n],
            child_count: vec![0; n],
            levels: Vec::with_capacity(n),
            intervals: Vec::with_capacity(n),
            kinds: Vec::with_capacity(n),
            ranks: Vec::with_capacity(n),
            leaves: Vec::new(),
        };
        let mut last_parent = 0u32;
        for (i, node) in nodes.into_iter().enumerate() {
            if !(node.measure > 0.0 && node.measure.is_finite()) {
                return Err(Error::InvalidTree(format!(
                    "node {i} has measure {}",
                    node.measure
                )));
            }
            let level = match node.parent {
                None if i == 0 => 0,
                None => return Err(Error::InvalidTree(format!("node {i} has no parent"))),
                Some(p) => {
                    if p as usize >= i || p < last_parent {
                        return Err(Error::InvalidTree(format!(
                            "node {i} breaks level order (parent {p})"
                        )));
                    }
                    last_parent = p;
                    let p = p as usize;
                    if t.child_count[p] == 0 {
                        t.first_child[p] = i as u32;
                    }
                    t.child_count[p] += 1;
                    t.levels[p] + 1
                }
            };
            if let Some(&prev) = t.levels.last() {
                if level < prev {
                    return Err(Error::InvalidTree(format!("node {i} breaks level order")));
                }
            }
            let (lo, hi) = node.interval;
            if !(lo >= 0.0 && lo < hi && hi <= 1.0) {
                return Err(Error::InvalidTree(format!(
                    "node {i} has interval ({lo}, {hi}]"
                )));
            }
            t.measures.push(node.measure);
            t.parents.push(node.parent.unwrap_or(NO_PARENT));
            t.levels.push(level);
            t.intervals.push(node.interval);
            t.kinds.push(node.kind);
            t.ranks.push(node.rank);
        }
        for i in 0..n {
            match t.child_count[i] {
                0 => t.leaves.push(i as u32),
                1 => {
                    return Err(Error::InvalidTree(format!("node {i} has a single child")));
                }
                _ => {
                    let sum: f64 = t.children(i).map(|c| t.measures[c]).sum();
                    if (sum - t.measures[i]).abs() > 1e-12 {
                        return Err(Error::InvalidTree(format!(
                            "children of node {i} have total measure {sum}, expected {}",
                            t.measures[i]
                        )));
                    }
                }
            }
        }
        let max_by_level = t.max_measure_by_level();
        if max_by_level.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidTree(
                "the largest measure must strictly decrease with the level".into(),
            ));
        }
        if t.leaves.len() as u128 > LEAF_CAP {
            return Err(Error::SizeCap {
                leaves: t.leaves.len() as u128,
                cap: LEAF_CAP,
            });
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn depth(&self) -> u32 {
        *self.levels.last().unwrap()
    }

    pub fn measure(&self, node: usize) -> f64 {
        self.measures[node]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        let p = self.parents[node];
        (p != NO_PARENT).then_some(p as usize)
    }

    pub fn children(&self, node: usize) -> std::ops::Range<usize> {
        let start = self.first_child[node] as usize;
        start..start + self.child_count[node] as usize
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.child_count[node] == 0
    }

    pub fn level(&self, node: usize) -> u32 {
        self.levels[node]
    }

    pub fn interval(&self, node: usize) -> (f64, f64) {
        self.intervals[node]
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kinds[node]
    }

    /// Rank in a split tree: the number of regular proper ancestors of a regular
    /// node, or the rank of the owner for a reserved cell. Equal to the level in
    /// uniform trees.
    pub fn rank(&self, node: usize) -> u32 {
        self.ranks[node]
    }

    /// Leaf node indices in level order.
    pub fn leaves(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.leaves.iter().map(|&l| l as usize)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaf_measures(&self) -> Vec<f64> {
        self.leaves().map(|l| self.measures[l]).collect()
    }

    /// Nodes at `level`, left to right.
    pub fn level_nodes(&self, level: u32) -> std::ops::Range<usize> {
        let start = self.levels.partition_point(|&l| l < level);
        let end = self.levels.partition_point(|&l| l <= level);
        start..end
    }

    pub fn max_measure_by_level(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for (&l, &m) in self.levels.iter().zip(&self.measures) {
            let l = l as usize;
            if out.len() <= l {
                out.push(m);
            } else if m > out[l] {
                out[l] = m;
            }
        }
        out
    }

    /// Whether `a` is `b` or one of its ancestors.
    pub fn is_ancestor_or_self(&self, a: usize, mut b: usize) -> bool {
        loop {
            if a == b {
                return true;
            }
            if self.levels[b] <= self.levels[a] {
                return false;
            }
            match self.parent(b) {
                Some(p) => b = p,
                None => return false,
            }
        }
    }
}

fn check_cap(branching: u64, depth: u32) -> Result<()> {
    let leaves = (branching as u128).checked_pow(depth).unwrap_or(u128::MAX);
    if leaves > LEAF_CAP {
        return Err(Error::SizeCap {
            leaves,
            cap: LEAF_CAP,
        });
    }
    Ok(())
}

/// The complete `branching`-ary tree of depth `depth` over `(0, 1]`.
pub fn build_uniform_tree(depth: u32, branching: u32) -> Result<Tree> {
    if depth == 0 {
        return Err(domain("depth", 0.0, "{1, 2, ...}"));
    }
    if branching < 2 {
        return Err(domain("branching", branching as f64, "{2, 3, ...}"));
    }
    check_cap(branching as u64, depth)?;
    let mut nodes = Vec::new();
    let b = branching as u64;
    let mut count = 1u64;
    for level in 0..=depth {
        let measure = 1.0 / count as f64;
        for i in 0..count {
            nodes.push(RawNode {
                measure,
                parent: (level > 0).then(|| (level_start(b, level - 1) + i / b) as u32),
                interval: (
                    i as f64 / count as f64,
                    if i + 1 == count {
                        1.0
                    } else {
                        (i + 1) as f64 / count as f64
                    },
                ),
                kind: NodeKind::Regular,
                rank: level,
            });
        }
        count *= b;
    }
    Tree::from_nodes(nodes)
}

/// Index of the first node at `level` in a complete `b`-ary tree.
fn level_start(b: u64, level: u32) -> u64 {
    (0..level).map(|l| b.pow(l)).sum()
}

/// A tree where each regular node `I` of rank below `levels` has a reserved
/// leftmost leaf of measure `a·μ(I)` followed by `fanout` regular children of
/// measure `(1 - a)μ(I)/fanout`. Regular nodes of rank `levels` are leaves.
pub fn build_split_tree(a: f64, levels: u32, fanout: u32) -> Result<Tree> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("a", a, "(0, 1)"));
    }
    if levels == 0 {
        return Err(domain("levels", 0.0, "{1, 2, ...}"));
    }
    if fanout < 2 {
        return Err(domain("fanout", fanout as f64, "{2, 3, ...}"));
    }
    check_cap(fanout as u64, levels)?;
    let mut nodes = vec![RawNode {
        measure: 1.0,
        parent: None,
        interval: (0.0, 1.0),
        kind: NodeKind::Regular,
        rank: 0,
    }];
    let mut frontier: Vec<u32> = vec![0];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &p in &frontier {
            let (lo, hi) = nodes[p as usize].interval;
            let mu = nodes[p as usize].measure;
            let rank = nodes[p as usize].rank;
            if nodes[p as usize].kind == NodeKind::Reserved || rank == levels {
                continue;
            }
            let reserved = a * mu;
            let child = (1.0 - a) * mu / fanout as f64;
            let mut left = lo + reserved;
            nodes.push(RawNode {
                measure: reserved,
                parent: Some(p),
                interval: (lo, left),
                kind: NodeKind::Reserved,
                rank,
            });
            for j in 0..fanout {
                let right = if j + 1 == fanout {
                    hi
                } else {
                    lo + reserved + (j + 1) as f64 * child
                };
                next.push(nodes.len() as u32);
                nodes.push(RawNode {
                    measure: child,
                    parent: Some(p),
                    interval: (left, right),
                    kind: NodeKind::Regular,
                    rank: rank + 1,
                });
                left = right;
            }
        }
        frontier = next;
    }
    Tree::from_nodes(nodes)
}

/// Disjoint proper descendants of `node` whose measures add up to `(1 - a)μ(node)`
/// within `tol`, picked greedily from the coarsest level down.
pub fn select_subfamily(tree: &Tree, node: usize, a: f64, tol: f64) -> Result<Vec<usize>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("a", a, "(0, 1)"));
    }
    if node >= tree.len() {
        return Err(Error::InvalidTree(format!("no node {node}")));
    }
    let target = (1.0 - a) * tree.measure(node);
    let mut remaining = target;
    let mut chosen = Vec::new();
    let mut queue: VecDeque<usize> = tree.children(node).collect();
    while let Some(j) = queue.pop_front() {
        if remaining <= tol {
            break;
        }
        let m = tree.measure(j);
        if m <= remaining {
            chosen.push(j);
            remaining -= m;
        } else {
            queue.extend(tree.children(j));
        }
    }
    if remaining > tol {
        return Err(Error::Resolution {
            target,
            tol,
            residual: remaining,
        });
    }
    Ok(chosen)
}

/// A nonnegative function constant on each leaf of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFunction<'t> {
    tree: &'t Tree,
    values: Vec<f64>,
}

impl<'t> TreeFunction<'t> {
    /// `values` are indexed like [`Tree::leaves`].
    pub fn new(tree: &'t Tree, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.leaf_count() {
            return Err(Error::InvalidTree(format!(
                "{} values for {} leaves",
                values.len(),
                tree.leaf_count()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidTree(format!(
                "leaf values must be finite and nonnegative, got {v}"
            )));
        }
        Ok(TreeFunction { tree, values })
    }

    pub fn tree(&self) -> &'t Tree {
        self.tree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        self.tree
            .leaves()
            .zip(&self.values)
            .map(|(l, v)| v * self.tree.measure(l))
            .sum()
    }

    pub fn power_integral(&self, p: f64) -> f64 {
        self.tree
            .leaves()
            .zip(&self.values)
            .map(|(l, v)| v.powf(p) * self.tree.measure(l))
            .sum()
    }

    /// `(value, measure)` pairs merged by value, largest value first.
    pub fn distribution(&self) -> Vec<(f64, f64)> {
        merged_distribution(
            self.values
                .iter()
                .zip(self.tree.leaves())
                .map(|(&v, l)| (v, self.tree.measure(l))),
        )
    }

    /// The decreasing rearrangement as a step profile on `(0, 1]`.
    pub fn rearrangement(&self) -> Result<MonotoneProfile> {
        MonotoneProfile::from_distribution(&self.distribution())
    }
}

/// Assigns the leaf-count quantile block averages of `g` to the leaves of a
/// uniform tree in a seeded random order.
pub fn tree_rearrangement<'t>(
    g: &MonotoneProfile,
    tree: &'t Tree,
    seed: u64,
) -> Result<TreeFunction<'t>> {
    let n = tree.leaf_count();
    let width = 1.0 / n as f64;
    if tree
        .leaves()
        .any(|l| (tree.measure(l) - width).abs() > 1e-12 * width)
    {
        return Err(Error::Unsupported(
            "quantile allocation needs leaves of equal measure".into(),
        ));
    }
    let mut values: Vec<f64> = (0..n)
        .map(|j| {
            let lo = j as f64 / n as f64;
            let hi = if j + 1 == n {
                1.0
            } else {
                (j + 1) as f64 / n as f64
            };
            g.integrate(lo, hi) / (hi - lo)
        })
        .collect();
    values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    TreeFunction::new(tree, values)
}

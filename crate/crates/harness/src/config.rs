//! Suite configurations. Every field has a default, so `{}` is a valid config
//! file for any suite.

use dyadic_core::extremal::ExtremalConfig;
use dyadic_core::profile::{MonotoneProfile, MonotoneTransform};
use serde::{Deserialize, Serialize};

use crate::error::{config_error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Inequality,
    Sharpness,
    Bellman,
    Delta,
    TripleNorm,
    Lorentz,
    Allocation,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Inequality => "inequality",
            Suite::Sharpness => "sharpness",
            Suite::Bellman => "bellman",
            Suite::Delta => "delta",
            Suite::TripleNorm => "triple_norm",
            Suite::Lorentz => "lorentz",
            Suite::Allocation => "allocation",
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(format!("{name} must be positive, got {v}")))
    }
}

fn at_least_one(name: &str, n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(config_error(format!("{name} must be at least 1")))
    }
}

fn exponents(name: &str, grid: &[f64]) -> Result<()> {
    at_least_one(name, grid.len())?;
    match grid.iter().find(|&&p| !(p > 1.0 && p.is_finite())) {
        Some(p) => Err(config_error(format!(
            "{name} entries must exceed 1, got {p}"
        ))),
        None => Ok(()),
    }
}

fn unit_interval(name: &str, grid: &[f64], closed_right: bool) -> Result<()> {
    at_least_one(name, grid.len())?;
    let ok = |v: f64| v > 0.0 && (v < 1.0 || closed_right && v == 1.0);
    match grid.iter().find(|&&v| !ok(v)) {
        Some(v) => Err(config_error(format!(
            "{name} entry {v} is outside the unit interval"
        ))),
        None => Ok(()),
    }
}

/// Random instances of the main inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InequalityConfig {
    pub instances: usize,
    pub max_pieces: usize,
    pub max_h_pieces: usize,
    pub max_value: f64,
    pub max_depth: u32,
    pub max_set_pieces: usize,
    pub transforms: Vec<MonotoneTransform>,
    pub tol: f64,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        InequalityConfig {
            instances: 1000,
            max_pieces: 16,
            max_h_pieces: 6,
            max_value: 4.0,
            max_depth: 10,
            max_set_pieces: 4,
            transforms: vec![
                MonotoneTransform::Identity,
                MonotoneTransform::Power(1.1),
                MonotoneTransform::Power(2.0),
                MonotoneTransform::Power(3.0),
            ],
            tol: 1e-8,
        }
    }
}

impl InequalityConfig {
    pub fn validate(&self) -> Result<()> {
        at_least_one("instances", self.instances)?;
        at_least_one("max_pieces", self.max_pieces)?;
        at_least_one("max_h_pieces", self.max_h_pieces)?;
        at_least_one("max_set_pieces", self.max_set_pieces)?;
        at_least_one("transforms", self.transforms.len())?;
        positive("max_value", self.max_value)?;
        positive("tol", self.tol)?;
        if !(1..=20).contains(&self.max_depth) {
            return Err(config_error("max_depth must be in 1..=20"));
        }
        Ok(())
    }
}

/// One extremal instance swept over a grid of `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    pub a_grid: Vec<f64>,
    pub g: MonotoneProfile,
    pub h: MonotoneProfile,
    #[serde(rename = "G")]
    pub transform: MonotoneTransform,
    pub k: f64,
    pub levels: u32,
    pub fanout: u32,
    /// Allowed decrease of the ratio between consecutive grid points.
    pub slack: f64,
    /// Required ratio at the last grid point.
    pub target: f64,
    /// Tolerance for `ratio <= 1`.
    pub upper_tol: f64,
    /// Tolerance for the built tree against the analytic staircase.
    pub concrete_tol: f64,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        SharpnessConfig {
            a_grid: vec![0.5, 0.2, 0.1, 0.05, 0.01],
            g: MonotoneProfile::power(1.0, -0.25, 1.0).expect("valid power profile"),
            h: MonotoneProfile::constant(1.0).expect("valid constant"),
            transform: MonotoneTransform::Power(2.0),
            k: 0.5,
            levels: 12,
            fanout: 2,
            slack: 1e-3,
            target: 0.99,
            upper_tol: 1e-8,
            concrete_tol: 1e-9,
        }
    }
}

impl SharpnessConfig {
    pub fn validate(&self) -> Result<()> {
        unit_interval("a_grid", &self.a_grid, false)?;
        unit_interval("k", &[self.k], true)?;
        positive("slack", self.slack)?;
        positive("upper_tol", self.upper_tol)?;
        positive("concrete_tol", self.concrete_tol)?;
        if !(self.target > 0.0 && self.target <= 1.0) {
            return Err(config_error("target must be in (0, 1]"));
        }
        if self.fanout < 2 || self.levels < 1 {
            return Err(config_error(
                "fanout must be at least 2 and levels at least 1",
            ));
        }
        Ok(())
    }

    pub fn extremal(&self, a: f64) -> ExtremalConfig {
        ExtremalConfig {
            a,
            g: self.g.clone(),
            h: self.h.clone(),
            transform: self.transform.clone(),
            k: self.k,
            levels: self.levels,
            fanout: self.fanout,
        }
    }
}

/// Bellman function witnesses, random upper-bound checks and the `ω_p` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellmanConfig {
    pub witness_p: Vec<f64>,
    /// Exponents β of the witnesses `t^{-β}`; each needs `β p < 1`.
    pub betas: Vec<f64>,
    pub witness_tol: f64,
    pub random_instances: usize,
    pub random_p: Vec<f64>,
    pub max_pieces: usize,
    pub random_tol: f64,
    pub omega_p: Vec<f64>,
    pub omega_points: usize,
    pub omega_tol: f64,
}

impl Default for BellmanConfig {
    fn default() -> Self {
        BellmanConfig {
            witness_p: vec![2.0],
            betas: vec![0.1, 0.2, 0.3],
            witness_tol: 1e-6,
            random_instances: 500,
            random_p: vec![1.5, 2.0, 3.0],
            max_pieces: 16,
            random_tol: 1e-8,
            omega_p: vec![1.5, 2.0, 3.0, 10.0],
            omega_points: 250,
            omega_tol: 1e-12,
        }
    }
}

impl BellmanConfig {
    pub fn validate(&self) -> Result<()> {
        exponents("witness_p", &self.witness_p)?;
        exponents("random_p", &self.random_p)?;
        exponents("omega_p", &self.omega_p)?;
        unit_interval("betas", &self.betas, false)?;
        for &p in &self.witness_p {
            if let Some(b) = self.betas.iter().find(|&&b| b * p >= 1.0) {
                return Err(config_error(format!(
                    "beta {b} with p {p}: t^(-beta p) is not integrable"
                )));
            }
        }
        at_least_one("random_instances", self.random_instances)?;
        at_least_one("max_pieces", self.max_pieces)?;
        at_least_one("omega_points", self.omega_points)?;
        positive("witness_tol", self.witness_tol)?;
        positive("random_tol", self.random_tol)?;
        positive("omega_tol", self.omega_tol)
    }
}

/// The `(p, q, f, k)` grid for the closed form of `∫_0^k min(f/t, t^{-1/p})^q dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaConfig {
    pub p_grid: Vec<f64>,
    /// `q = 1 + s (p - 1)` for each `s` here, so that `1 < q < p`.
    pub q_fractions: Vec<f64>,
    pub f_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub tol: f64,
    pub junction_tol: f64,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig {
            p_grid: vec![1.5, 2.0, 3.0, 5.0],
            q_fractions: vec![1.0 / 3.0, 2.0 / 3.0],
            f_grid: vec![0.05, 0.2, 0.4, 0.7, 1.0],
            k_grid: vec![0.01, 0.1, 0.3, 0.6, 1.0],
            tol: 1e-6,
            junction_tol: 1e-12,
        }
    }
}

impl DeltaConfig {
    pub fn validate(&self) -> Result<()> {
        exponents("p_grid", &self.p_grid)?;
        unit_interval("q_fractions", &self.q_fractions, false)?;
        unit_interval("f_grid", &self.f_grid, true)?;
        unit_interval("k_grid", &self.k_grid, true)?;
        positive("tol", self.tol)?;
        positive("junction_tol", self.junction_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TripleNormConfig {
    pub p_grid: Vec<f64>,
    /// Integral of the witness.
    pub f: f64,
    /// Evaluation points as fractions of the witness cutoff.
    pub k0_fractions: Vec<f64>,
    pub witness_tol: f64,
    pub sandwich_instances: usize,
    pub sandwich_tol: f64,
    pub chain_instances: usize,
    pub chain_tol: f64,
    pub max_pieces: usize,
    pub max_depth: u32,
}

impl Default for TripleNormConfig {
    fn default() -> Self {
        TripleNormConfig {
            p_grid: vec![1.5, 2.0, 3.0],
            f: 0.5,
            k0_fractions: vec![1.0, 0.5, 0.1],
            witness_tol: 1e-9,
            sandwich_instances: 500,
            sandwich_tol: 1e-9,
            chain_instances: 500,
            chain_tol: 1e-8,
            max_pieces: 16,
            max_depth: 10,
        }
    }
}

impl TripleNormConfig {
    pub fn validate(&self) -> Result<()> {
        exponents("p_grid", &self.p_grid)?;
        unit_interval("f", &[self.f], true)?;
        unit_interval("k0_fractions", &self.k0_fractions, true)?;
        at_least_one("sandwich_instances", self.sandwich_instances)?;
        at_least_one("chain_instances", self.chain_instances)?;
        at_least_one("max_pieces", self.max_pieces)?;
        if !(1..=20).contains(&self.max_depth) {
            return Err(config_error("max_depth must be in 1..=20"));
        }
        positive("witness_tol", self.witness_tol)?;
        positive("sandwich_tol", self.sandwich_tol)?;
        positive("chain_tol", self.chain_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LorentzConfig {
    pub p: f64,
    /// Each must lie in `(0, p)`.
    pub q_grid: Vec<f64>,
    pub bound_instances: usize,
    pub bound_tol: f64,
    pub max_pieces: usize,
    pub max_depth: u32,
    /// Witness exponents `α = -s/p` for each `s` here.
    pub alpha_fractions: Vec<f64>,
    pub witness_tol: f64,
    /// Distance of the boundary witness from `-1/p`.
    pub boundary_offset: f64,
    /// Relative shortfall allowed against `(p/(p-1))^q` at the boundary witness.
    pub boundary_shortfall: f64,
}

impl Default for LorentzConfig {
    fn default() -> Self {
        LorentzConfig {
            p: 2.0,
            q_grid: vec![1.0, 1.5],
            bound_instances: 500,
            bound_tol: 1e-8,
            max_pieces: 16,
            max_depth: 10,
            alpha_fractions: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            witness_tol: 1e-6,
            boundary_offset: 1e-3,
            boundary_shortfall: 5e-3,
        }
    }
}

impl LorentzConfig {
    pub fn validate(&self) -> Result<()> {
        exponents("p", &[self.p])?;
        at_least_one("q_grid", self.q_grid.len())?;
        if let Some(q) = self.q_grid.iter().find(|&&q| !(q > 0.0 && q < self.p)) {
            return Err(config_error(format!("q = {q} must lie in (0, p)")));
        }
        at_least_one("bound_instances", self.bound_instances)?;
        at_least_one("max_pieces", self.max_pieces)?;
        if !(1..=20).contains(&self.max_depth) {
            return Err(config_error("max_depth must be in 1..=20"));
        }
        unit_interval("alpha_fractions", &self.alpha_fractions, false)?;
        if !(self.boundary_offset > 0.0 && self.boundary_offset < 1.0 / self.p) {
            return Err(config_error("boundary_offset must lie in (0, 1/p)"));
        }
        positive("bound_tol", self.bound_tol)?;
        positive("witness_tol", self.witness_tol)?;
        positive("boundary_shortfall", self.boundary_shortfall)
    }
}

/// Random instances of the equal-average splitting of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AllocationConfig {
    pub instances: usize,
    pub max_pieces: usize,
    pub max_parts: usize,
    pub average_tol: f64,
    pub measure_tol: f64,
}

impl Default for AllocationConfig {
    fn default() -> Self {
        AllocationConfig {
            instances: 200,
            max_pieces: 10,
            max_parts: 6,
            average_tol: 1e-9,
            measure_tol: 1e-12,
        }
    }
}

impl AllocationConfig {
    pub fn validate(&self) -> Result<()> {
        at_least_one("instances", self.instances)?;
        at_least_one("max_pieces", self.max_pieces)?;
        at_least_one("max_parts", self.max_parts)?;
        positive("average_tol", self.average_tol)?;
        positive("measure_tol", self.measure_tol)
    }
}

/// A suite together with its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum SuiteConfig {
    Inequality(InequalityConfig),
    Sharpness(SharpnessConfig),
    Bellman(BellmanConfig),
    Delta(DeltaConfig),
    TripleNorm(TripleNormConfig),
    Lorentz(LorentzConfig),
    Allocation(AllocationConfig),
}

impl SuiteConfig {
    pub fn default_for(suite: Suite) -> Self {
        match suite {
            Suite::Inequality => SuiteConfig::Inequality(Default::default()),
            Suite::Sharpness => SuiteConfig::Sharpness(Default::default()),
            Suite::Bellman => SuiteConfig::Bellman(Default::default()),
            Suite::Delta => SuiteConfig::Delta(Default::default()),
            Suite::TripleNorm => SuiteConfig::TripleNorm(Default::default()),
            Suite::Lorentz => SuiteConfig::Lorentz(Default::default()),
            Suite::Allocation => SuiteConfig::Allocation(Default::default()),
        }
    }

    /// Parses the body of a config file for the given suite.
    pub fn from_json(suite: Suite, json: &str) -> serde_json::Result<Self> {
        Ok(match suite {
            Suite::Inequality => SuiteConfig::Inequality(serde_json::from_str(json)?),
            Suite::Sharpness => SuiteConfig::Sharpness(serde_json::from_str(json)?),
            Suite::Bellman => SuiteConfig::Bellman(serde_json::from_str(json)?),
            Suite::Delta => SuiteConfig::Delta(serde_json::from_str(json)?),
            Suite::TripleNorm => SuiteConfig::TripleNorm(serde_json::from_str(json)?),
            Suite::Lorentz => SuiteConfig::Lorentz(serde_json::from_str(json)?),
            Suite::Allocation => SuiteConfig::Allocation(serde_json::from_str(json)?),
        })
    }

    /// The config body as pretty JSON, in the form [`SuiteConfig::from_json`] reads.
    pub fn body_json(&self) -> String {
        let body = match self {
            SuiteConfig::Inequality(c) => serde_json::to_string_pretty(c),
            SuiteConfig::Sharpness(c) => serde_json::to_string_pretty(c),
            SuiteConfig::Bellman(c) => serde_json::to_string_pretty(c),
            SuiteConfig::Delta(c) => serde_json::to_string_pretty(c),
            SuiteConfig::TripleNorm(c) => serde_json::to_string_pretty(c),
            SuiteConfig::Lorentz(c) => serde_json::to_string_pretty(c),
            SuiteConfig::Allocation(c) => serde_json::to_string_pretty(c),
        };
        body.expect("configs serialize to JSON")
    }

    pub fn suite(&self) -> Suite {
        match self {
            SuiteConfig::Inequality(_) => Suite::Inequality,
            SuiteConfig::Sharpness(_) => Suite::Sharpness,
            SuiteConfig::Bellman(_) => Suite::Bellman,
            SuiteConfig::Delta(_) => Suite::Delta,
            SuiteConfig::TripleNorm(_) => Suite::TripleNorm,
            SuiteConfig::Lorentz(_) => Suite::Lorentz,
            SuiteConfig::Allocation(_) => Suite::Allocation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SuiteConfig::Inequality(c) => c.validate(),
            SuiteConfig::Sharpness(c) => c.validate(),
            SuiteConfig::Bellman(c) => c.validate(),
            SuiteConfig::Delta(c) => c.validate(),
            SuiteConfig::TripleNorm(c) => c.validate(),
            SuiteConfig::Lorentz(c) => c.validate(),
            SuiteConfig::Allocation(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub config: SuiteConfig,
}

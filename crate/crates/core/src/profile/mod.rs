//! Nonincreasing profiles on `(0, 1]`, the Hardy averaging operator, and the
//! rearrangement machinery built on top of them.

mod allocate;
mod hardy;
mod step;
mod transform;

pub use allocate::{allocate_equal_averages, rearrange_with_averages, SlicedProfile};
pub use hardy::{hardy_eval, hardy_level, rhs_integral, rhs_integral_identity_exact, RHS_REL_TOL};
pub use step::StepFunction;
pub use transform::{MonotoneTransform, PiecewiseLinear};

pub(crate) use hardy::check_integrable_near_zero;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `c·t^alpha` on `(0, cutoff]` and `0` on `(cutoff, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPower {
    c: f64,
    alpha: f64,
    cutoff: f64,
}

impl TruncatedPower {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
}

/// A nonincreasing, nonnegative, integrable function on `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub enum MonotoneProfile {
    Step(StepFunction),
    TruncatedPower(TruncatedPower),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ProfileRepr {
    Step {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Power {
        c: f64,
        alpha: f64,
        cutoff: f64,
    },
}

impl TryFrom<ProfileRepr> for MonotoneProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        match r {
            ProfileRepr::Step {
                breakpoints,
                values,
            } => MonotoneProfile::step(breakpoints, values),
            ProfileRepr::Power { c, alpha, cutoff } => MonotoneProfile::power(c, alpha, cutoff),
        }
    }
}

impl From<MonotoneProfile> for ProfileRepr {
    fn from(p: MonotoneProfile) -> Self {
        match p {
            MonotoneProfile::Step(s) => ProfileRepr::Step {
                breakpoints: s.breakpoints().to_vec(),
                values: s.values().to_vec(),
            },
            MonotoneProfile::TruncatedPower(tp) => ProfileRepr::Power {
                c: tp.c,
                alpha: tp.alpha,
                cutoff: tp.cutoff,
            },
        }
    }
}

/// `∫_lo^hi u^e du` for `0 ≤ lo ≤ hi`, with `e` the antiderivative exponent minus one.
///
/// Written through `expm1` so that exponents close to `-1` keep full precision.
pub(crate) fn power_antiderivative(e: f64, lo: f64, hi: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let k = e + 1.0;
    if lo == 0.0 {
        if k > 0.0 {
            return Ok(hi.powf(k) / k);
        }
        return Err(Error::Divergence(format!(
            "∫_0 u^{e} du is not integrable at 0"
        )));
    }
    let log_ratio = (hi / lo).ln();
    if k == 0.0 {
        return Ok(log_ratio);
    }
    Ok(lo.powf(k) * (k * log_ratio).exp_m1() / k)
}

impl MonotoneProfile {
    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_step(StepFunction::new(breakpoints, values)?)
    }

    pub fn from_step(s: StepFunction) -> Result<Self> {
        if !s.is_nonincreasing() {
            return Err(Error::InvalidProfile(
                "step values must be nonincreasing".into(),
            ));
        }
        Ok(MonotoneProfile::Step(s))
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::from_step(StepFunction::constant(c)?)
    }

    /// `c·t^alpha` on `(0, cutoff]`, zero afterwards.
    pub fn power(c: f64, alpha: f64, cutoff: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(domain("c", c, "[0, ∞)"));
        }
        if !(alpha > -1.0 && alpha <= 0.0) {
            return Err(domain("alpha", alpha, "(-1, 0]"));
        }
        if !(cutoff > 0.0 && cutoff <= 1.0) {
            return Err(domain("cutoff", cutoff, "(0, 1]"));
        }
        Ok(MonotoneProfile::TruncatedPower(TruncatedPower {
            c,
            alpha,
            cutoff,
        }))
    }

    /// The nonincreasing step profile with the given `(value, measure)` multiset.
    ///
    /// Equal values are merged; measures must total 1 within `1e-9`.
    pub fn from_distribution(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut sorted: Vec<(f64, f64)> = pairs.iter().copied().filter(|&(_, m)| m > 0.0).collect();
        if let Some(&(v, m)) = sorted
            .iter()
            .find(|(v, m)| !(v.is_finite() && *v >= 0.0 && m.is_finite()))
        {
            return Err(Error::InvalidStep(format!(
                "bad distribution entry ({v}, {m})"
            )));
        }
        let total: f64 = sorted.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidStep(format!(
                "distribution measures sum to {total}, expected 1"
            )));
        }
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (v, m) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        let mut breakpoints = vec![0.0];
        let mut values = Vec::with_capacity(merged.len());
        let mut acc = 0.0;
        let n = merged.len();
        for (i, (v, m)) in merged.into_iter().enumerate() {
            acc += m;
            let end = if i + 1 == n { 1.0 } else { acc.min(1.0) };
            if end > *breakpoints.last().unwrap() {
                breakpoints.push(end);
                values.push(v);
            } else if i + 1 == n {
                // A sliver too thin to register at the top end; fold it into the last piece.
                *breakpoints.last_mut().unwrap() = 1.0;
            }
        }
        if values.is_empty() {
            return Err(Error::InvalidStep("empty distribution".into()));
        }
        Self::step(breakpoints, values)
    }

    pub fn as_step(&self) -> Option<&StepFunction> {
        match self {
            MonotoneProfile::Step(s) => Some(s),
            MonotoneProfile::TruncatedPower(_) => None,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            MonotoneProfile::Step(s) => s.value(t),
            MonotoneProfile::TruncatedPower(tp) => {
                if t <= 0.0 {
                    if tp.alpha < 0.0 {
                        f64::INFINITY
                    } else {
                        tp.c
                    }
                } else if t <= tp.cutoff {
                    tp.c * t.powf(tp.alpha)
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫_s^t g(u) du`, exact per piece.
    pub fn integrate(&self, s: f64, t: f64) -> f64 {
        match self {
            MonotoneProfile::Step(f) => f.integrate(s, t),
            MonotoneProfile::TruncatedPower(tp) => {
                let lo = s.clamp(0.0, tp.cutoff);
                let hi = t.clamp(0.0, tp.cutoff);
                // alpha > -1, so this never diverges.
                tp.c * power_antiderivative(tp.alpha, lo, hi).unwrap_or(f64::INFINITY)
            }
        }
    }

    pub fn integral(&self) -> f64 {
        self.integrate(0.0, 1.0)
    }

    /// `∫_s^t g(u)^p du`, or a divergence error.
    pub fn power_integral(&self, p: f64, s: f64, t: f64) -> Result<f64> {
        match self {
            MonotoneProfile::Step(f) => Ok(f.power_integral(p, s, t)),
            MonotoneProfile::TruncatedPower(tp) => {
                let lo = s.clamp(0.0, tp.cutoff);
                let hi = t.clamp(0.0, tp.cutoff);
                if tp.c == 0.0 || hi <= lo {
                    return Ok(0.0);
                }
                Ok(tp.c.powf(p) * power_antiderivative(p * tp.alpha, lo, hi)?)
            }
        }
    }

    /// Breakpoints strictly inside `(0, 1)` where the formula changes.
    pub fn interior_breakpoints(&self) -> Vec<f64> {
        match self {
            MonotoneProfile::Step(s) => {
                let b = s.breakpoints();
                b[1..b.len() - 1].to_vec()
            }
            MonotoneProfile::TruncatedPower(tp) if tp.cutoff < 1.0 => vec![tp.cutoff],
            MonotoneProfile::TruncatedPower(_) => Vec::new(),
        }
    }

    /// `(coef, exponent, extent)` such that `g(t) = coef·t^exponent` on `(0, extent]`.
    pub fn leading_power(&self) -> (f64, f64, f64) {
        match self {
            MonotoneProfile::Step(s) => (s.values()[0], 0.0, s.breakpoints()[1]),
            MonotoneProfile::TruncatedPower(tp) => (tp.c, tp.alpha, tp.cutoff),
        }
    }

    /// `g(0+)`, the essential supremum; infinite for singular power profiles.
    pub fn sup(&self) -> f64 {
        match self {
            MonotoneProfile::Step(s) => s.values()[0],
            MonotoneProfile::TruncatedPower(tp) if tp.alpha < 0.0 && tp.c > 0.0 => f64::INFINITY,
            MonotoneProfile::TruncatedPower(tp) => tp.c,
        }
    }

    /// `c·g`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        match self {
            MonotoneProfile::Step(s) => Ok(MonotoneProfile::Step(s.scaled(c)?)),
            MonotoneProfile::TruncatedPower(tp) => Self::power(tp.c * c, tp.alpha, tp.cutoff),
        }
    }
}

/// The nonincreasing function on `(0, 1]` equimeasurable with `f`.
pub fn decreasing_rearrangement(f: &StepFunction) -> MonotoneProfile {
    if f.is_nonincreasing() {
        return MonotoneProfile::Step(f.clone());
    }
    MonotoneProfile::from_distribution(&f.distribution())
        .expect("a valid step function has a valid distribution")
}

/// Sums measures per distinct value; the result is sorted by decreasing value.
pub fn merged_distribution(pairs: impl IntoIterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = pairs.into_iter().filter(|p| p.1 > 0.0).collect();
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (value, m) in v {
        match out.last_mut() {
            Some(last) if last.0 == value => last.1 += m,
            _ => out.push((value, m)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_profile_integral() {
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        assert!((g.integrate(0.0, 1.0) - 2.0).abs() < 1e-15);
        let psi = MonotoneProfile::power(0.5, -0.5, 0.25).unwrap();
        // ∫_0^{1/4} t^{-1/2}/2 = 1/2, and nothing past the cutoff.
        assert!((psi.integral() - 0.5).abs() < 1e-15);
        assert!((psi.integrate(0.1, 1.0) - psi.integrate(0.1, 0.25)).abs() < 1e-16);
    }

    #[test]
    fn power_profile_domain() {
        assert!(MonotoneProfile::power(1.0, -1.0, 1.0).is_err());
        assert!(MonotoneProfile::power(1.0, 0.1, 1.0).is_err());
        assert!(MonotoneProfile::power(1.0, -0.5, 0.0).is_err());
        assert!(MonotoneProfile::power(-1.0, -0.5, 1.0).is_err());
    }

    #[test]
    fn step_profile_must_be_nonincreasing() {
        assert!(MonotoneProfile::step(vec![0.0, 0.5, 1.0], vec![1.0, 3.0]).is_err());
        assert!(MonotoneProfile::step(vec![0.0, 0.5, 1.0], vec![3.0, 3.0]).is_ok());
    }

    #[test]
    fn power_integral_divergence() {
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        assert!(matches!(
            g.power_integral(2.0, 0.0, 1.0),
            Err(Error::Divergence(_))
        ));
        assert!((g.power_integral(2.0, 0.5, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        let g = MonotoneProfile::power(1.0, -0.25, 1.0).unwrap();
        assert!((g.power_integral(2.0, 0.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn antiderivative_near_log_case() {
        // e = -1 + 1e-9 against the log limit.
        let v = power_antiderivative(-1.0 + 1e-9, 0.5, 1.0).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rearrangement_sorts_two_pieces() {
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 3.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(
            r,
            MonotoneProfile::step(vec![0.0, 0.5, 1.0], vec![3.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn rearrangement_is_idempotent() {
        let f = StepFunction::new(vec![0.0, 0.2, 0.7, 1.0], vec![5.0, 2.0, 2.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.as_step().unwrap(), &f);
        let again = decreasing_rearrangement(r.as_step().unwrap());
        assert_eq!(again, r);
    }

    #[test]
    fn rearrangement_merges_ties() {
        let f = StepFunction::uniform(vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(
            r,
            MonotoneProfile::step(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap()
        );
    }

    #[test]
    fn json_shapes() {
        let g: MonotoneProfile =
            serde_json::from_str(r#"{"type":"step","breakpoints":[0,0.5,1],"values":[2,1]}"#)
                .unwrap();
        assert_eq!(g.integral(), 1.5);
        let p: MonotoneProfile =
            serde_json::from_str(r#"{"type":"power","c":1,"alpha":-0.25,"cutoff":1}"#).unwrap();
        assert!((p.integral() - 4.0 / 3.0).abs() < 1e-15);
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(
            back,
            r#"{"type":"power","c":1.0,"alpha":-0.25,"cutoff":1.0}"#
        );
        assert!(serde_json::from_str::<MonotoneProfile>(
            r#"{"type":"step","breakpoints":[0,0.5,1],"values":[1,2]}"#
        )
        .is_err());
    }
}

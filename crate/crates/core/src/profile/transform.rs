use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Continuous nondecreasing piecewise-linear map on `[0, ∞)`.
///
/// The first knot sits at `x = 0`; beyond the last knot the value is held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidTransform("no knots".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::InvalidTransform(
                "the first knot must be at x = 0".into(),
            ));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidTransform("knots must be finite".into()));
        }
        if knots[0].1 < 0.0 {
            return Err(Error::InvalidTransform(
                "value at 0 must be nonnegative".into(),
            ));
        }
        if knots
            .windows(2)
            .any(|w| !(w[0].0 < w[1].0) || w[1].1 < w[0].1)
        {
            return Err(Error::InvalidTransform(
                "knot x must increase and y must not decrease".into(),
            ));
        }
        Ok(PiecewiseLinear { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn apply(&self, x: f64) -> f64 {
        let k = &self.knots;
        let j = k.partition_point(|&(kx, _)| kx <= x);
        if j == 0 {
            return k[0].1;
        }
        if j == k.len() {
            return k[k.len() - 1].1;
        }
        let (x0, y0) = k[j - 1];
        let (x1, y1) = k[j];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// A nondecreasing `G: [0, ∞) → [0, ∞)` from a closed family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformRepr", into = "TransformRepr")]
pub enum MonotoneTransform {
    Identity,
    /// `x^q`, `q > 0`.
    Power(f64),
    PiecewiseLinear(PiecewiseLinear),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum TransformRepr {
    Identity,
    Power { q: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl TryFrom<TransformRepr> for MonotoneTransform {
    type Error = Error;

    fn try_from(r: TransformRepr) -> Result<Self> {
        match r {
            TransformRepr::Identity => Ok(MonotoneTransform::Identity),
            TransformRepr::Power { q } => MonotoneTransform::power(q),
            TransformRepr::PiecewiseLinear { knots } => Ok(MonotoneTransform::PiecewiseLinear(
                PiecewiseLinear::new(knots)?,
            )),
        }
    }
}

impl From<MonotoneTransform> for TransformRepr {
    fn from(t: MonotoneTransform) -> Self {
        match t {
            MonotoneTransform::Identity => TransformRepr::Identity,
            MonotoneTransform::Power(q) => TransformRepr::Power { q },
            MonotoneTransform::PiecewiseLinear(pl) => {
                TransformRepr::PiecewiseLinear { knots: pl.knots }
            }
        }
    }
}

impl MonotoneTransform {
    pub fn power(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(domain("q", q, "(0, ∞)"));
        }
        Ok(MonotoneTransform::Power(q))
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        Ok(MonotoneTransform::PiecewiseLinear(PiecewiseLinear::new(
            knots,
        )?))
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MonotoneTransform::Identity => x,
            MonotoneTransform::Power(q) => {
                if *q == 1.0 {
                    x
                } else if *q == 2.0 {
                    x * x
                } else {
                    x.powf(*q)
                }
            }
            MonotoneTransform::PiecewiseLinear(pl) => pl.apply(x),
        }
    }

    /// x-coordinates where `G` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            MonotoneTransform::PiecewiseLinear(pl) => pl.knots.iter().map(|k| k.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Short human-readable label, used in report rows.
    pub fn label(&self) -> String {
        match self {
            MonotoneTransform::Identity => "identity".to_string(),
            MonotoneTransform::Power(q) => format!("x^{q}"),
            MonotoneTransform::PiecewiseLinear(pl) => format!("pl{}", pl.knots.len()),
        }
    }
}

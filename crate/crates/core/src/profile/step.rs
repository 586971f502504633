use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A nonnegative step function on `(0, 1]` with left-open pieces.
///
/// Piece `i` is `(t_i, t_{i+1}]` and carries `values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    /// `cumulative[i] = ∫_0^{t_i}`.
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;

    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.breakpoints, r.values)
    }
}

impl From<StepFunction> for StepRepr {
    fn from(s: StepFunction) -> Self {
        StepRepr {
            breakpoints: s.breakpoints,
            values: s.values,
        }
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidStep("at least one piece is required".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidStep(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidStep(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidStep(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidStep(format!(
                "values must be finite and nonnegative, got {v}"
            )));
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for (w, v) in breakpoints.windows(2).zip(&values) {
            acc += v * (w[1] - w[0]);
            cumulative.push(acc);
        }
        Ok(StepFunction {
            breakpoints,
            values,
            cumulative,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c])
    }

    /// Equal-width pieces with the given values.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let breakpoints = (0..=n)
            .map(|i| if i == n { 1.0 } else { i as f64 / n as f64 })
            .collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(left, right, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// Index of the piece `(t_i, t_{i+1}]` containing `t`; `t = 0` maps to piece 0.
    pub fn piece_index(&self, t: f64) -> usize {
        let j = self.breakpoints.partition_point(|&b| b < t);
        j.saturating_sub(1).min(self.values.len() - 1)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.values[self.piece_index(t)]
    }

    pub fn integral(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// `∫_s^t f(u) du` for `0 ≤ s ≤ t ≤ 1`; arguments are clamped into `[0, 1]`.
    pub fn integrate(&self, s: f64, t: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let t = t.clamp(0.0, 1.0);
        if t <= s {
            return 0.0;
        }
        let i = self.piece_index(s);
        let j = self.piece_index(t);
        if i == j {
            return self.values[i] * (t - s);
        }
        let head = self.values[i] * (self.breakpoints[i + 1] - s);
        let middle = self.cumulative[j] - self.cumulative[i + 1];
        let tail = self.values[j] * (t - self.breakpoints[j]);
        head + middle + tail
    }

    /// `∫_s^t f(u)^p du`.
    pub fn power_integral(&self, p: f64, s: f64, t: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let t = t.clamp(0.0, 1.0);
        if t <= s {
            return 0.0;
        }
        self.pieces()
            .filter_map(|(a, b, v)| {
                let lo = a.max(s);
                let hi = b.min(t);
                (hi > lo).then(|| v.powf(p) * (hi - lo))
            })
            .sum()
    }

    /// The `(value, measure)` pairs of the pieces, unmerged and in piece order.
    pub fn distribution(&self) -> Vec<(f64, f64)> {
        self.pieces().map(|(a, b, v)| (v, b - a)).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(domain("scale", c, "[0, ∞)"));
        }
        Self::new(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_input() {
        assert!(StepFunction::new(vec![0.0, 0.5], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
    }

    #[test]
    fn integrate_constant() {
        let f = StepFunction::constant(2.0).unwrap();
        assert_eq!(f.integrate(0.0, 0.5), 1.0);
        assert_eq!(f.integrate(0.3, 0.3), 0.0);
    }

    #[test]
    fn integrate_across_pieces() {
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0]).unwrap();
        assert_eq!(f.integrate(0.25, 0.75), 0.5);
        // Piecewise-sum oracle on a finer example.
        let g =
            StepFunction::new(vec![0.0, 0.1, 0.35, 0.6, 1.0], vec![4.0, 3.0, 1.5, 0.25]).unwrap();
        let oracle = |s: f64, t: f64| -> f64 {
            g.pieces()
                .map(|(a, b, v)| v * (b.min(t) - a.max(s)).max(0.0))
                .sum()
        };
        for &(s, t) in &[
            (0.0, 1.0),
            (0.05, 0.07),
            (0.05, 0.95),
            (0.35, 0.6),
            (0.2, 0.61),
        ] {
            assert!((g.integrate(s, t) - oracle(s, t)).abs() < 1e-15);
        }
    }

    #[test]
    fn left_open_pieces() {
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(f.value(0.5), 2.0);
        assert_eq!(f.value(0.5000001), 1.0);
        assert_eq!(f.value(1.0), 1.0);
    }
}

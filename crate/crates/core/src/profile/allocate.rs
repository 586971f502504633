use super::{merged_distribution, MonotoneProfile};
use crate::bisect::bisect_boundary;
use crate::error::{Error, Result};

/// Remainders thinner than this are folded into the last part.
const MIN_REMAINDER: f64 = 1e-9;

/// A profile restricted to finitely many disjoint intervals of `(0, 1]`, read as
/// one function on `(0, measure]` by laying the intervals end to end.
///
/// Intervals are kept in increasing order, so the concatenation of a
/// nonincreasing base is again nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedProfile<'a> {
    base: &'a MonotoneProfile,
    slices: Vec<(f64, f64)>,
    /// `offsets[i]` is the concatenated coordinate where slice `i` starts.
    offsets: Vec<f64>,
}

impl<'a> SlicedProfile<'a> {
    pub fn new(base: &'a MonotoneProfile, slices: Vec<(f64, f64)>) -> Result<Self> {
        if slices
            .iter()
            .any(|&(a, b)| !(a >= 0.0 && a < b && b <= 1.0))
        {
            return Err(Error::Precondition(
                "slices must be nonempty intervals inside [0, 1]".into(),
            ));
        }
        if slices.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::Precondition(
                "slices must be sorted and disjoint".into(),
            ));
        }
        Ok(Self::from_sorted(base, slices))
    }

    pub fn whole(base: &'a MonotoneProfile) -> Self {
        Self::from_sorted(base, vec![(0.0, 1.0)])
    }

    fn from_sorted(base: &'a MonotoneProfile, slices: Vec<(f64, f64)>) -> Self {
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(slices.len());
        for (a, b) in slices {
            if b <= a {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => merged.push((a, b)),
            }
        }
        let mut offsets = Vec::with_capacity(merged.len());
        let mut acc = 0.0;
        for &(a, b) in &merged {
            offsets.push(acc);
            acc += b - a;
        }
        SlicedProfile {
            base,
            slices: merged,
            offsets,
        }
    }

    pub fn base(&self) -> &'a MonotoneProfile {
        self.base
    }

    pub fn slices(&self) -> &[(f64, f64)] {
        &self.slices
    }

    pub fn measure(&self) -> f64 {
        self.slices.iter().map(|(a, b)| b - a).sum()
    }

    pub fn integral(&self) -> f64 {
        self.slices
            .iter()
            .map(|&(a, b)| self.base.integrate(a, b))
            .sum()
    }

    pub fn average(&self) -> f64 {
        self.integral() / self.measure()
    }

    /// Base-coordinate intervals covering the concatenated window `[s, t]`.
    fn pieces_of(&self, s: f64, t: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if t <= s || self.slices.is_empty() {
            return out;
        }
        let start = self.offsets.partition_point(|&o| o <= s).saturating_sub(1);
        for i in start..self.slices.len() {
            let (a, b) = self.slices[i];
            let off = self.offsets[i];
            if off >= t {
                break;
            }
            let lo = if s > off { a + (s - off) } else { a };
            let hi = if t < off + (b - a) { a + (t - off) } else { b };
            let lo = lo.min(b);
            let hi = hi.min(b);
            if hi > lo {
                out.push((lo, hi));
            }
        }
        out
    }

    /// `∫_s^t` of the concatenated function.
    pub fn integrate(&self, s: f64, t: f64) -> f64 {
        self.pieces_of(s, t)
            .into_iter()
            .map(|(a, b)| self.base.integrate(a, b))
            .sum()
    }

    /// The concatenated window `[s, t]` as its own sliced profile.
    pub fn window(&self, s: f64, t: f64) -> SlicedProfile<'a> {
        Self::from_sorted(self.base, self.pieces_of(s, t))
    }

    /// Everything outside the concatenated window `[s, t]`.
    pub fn without(&self, s: f64, t: f64) -> SlicedProfile<'a> {
        let total = self.measure();
        let mut rest = self.pieces_of(0.0, s);
        rest.extend(self.pieces_of(t, total));
        Self::from_sorted(self.base, rest)
    }

    /// `(value, measure)` pairs, merged by value. Only step bases have one.
    pub fn distribution(&self) -> Option<Vec<(f64, f64)>> {
        let step = self.base.as_step()?;
        let pairs = self.slices.iter().flat_map(|&(s, t)| {
            step.pieces().filter_map(move |(a, b, v)| {
                let lo = a.max(s);
                let hi = b.min(t);
                (hi > lo).then_some((v, hi - lo))
            })
        });
        Some(merged_distribution(pairs))
    }
}

/// Splits `source` into parts of the given measures, each with average `target`.
///
/// For every part but the last, the window `[r, r + μ]` of the current remainder
/// whose average is `target` is found by bisection on `r` and cut out; the last
/// part takes whatever is left. `target` must be the average of `source`.
pub fn allocate_equal_averages<'a>(
    source: &SlicedProfile<'a>,
    parts: &[f64],
    target: f64,
) -> Result<Vec<SlicedProfile<'a>>> {
    if parts.is_empty() || parts.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::Precondition("part measures must be positive".into()));
    }
    let total = source.measure();
    let sum: f64 = parts.iter().sum();
    if (sum - total).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "part measures sum to {sum}, the source has measure {total}"
        )));
    }
    let mut rest = source.clone();
    let mut out = Vec::with_capacity(parts.len());
    for (j, &mu) in parts.iter().enumerate() {
        let rem = rest.measure();
        let is_last = j + 1 == parts.len() || rem - mu < MIN_REMAINDER;
        if is_last {
            out.push(rest);
            // Any parts still pending would be empty.
            if j + 1 < parts.len() {
                return Err(Error::Allocation(format!(
                    "nothing left for the {} remaining parts",
                    parts.len() - j - 1
                )));
            }
            return Ok(out);
        }
        let meets = |r: f64| rest.integrate(r, r + mu) >= target * mu;
        let span = rem - mu;
        let r = if !meets(0.0) {
            0.0
        } else if meets(span) {
            span
        } else {
            bisect_boundary(0.0, span, 0.0, 256, meets).0
        };
        out.push(rest.window(r, r + mu));
        rest = rest.without(r, r + mu);
    }
    unreachable!("the last part always returns")
}

/// Splits `g` into parts of the given measures (summing to 1), each with average `f = ∫g`.
pub fn rearrange_with_averages<'a>(
    g: &'a MonotoneProfile,
    part_measures: &[f64],
    f: f64,
) -> Result<Vec<SlicedProfile<'a>>> {
    let integral = g.integral();
    if (f - integral).abs() > 1e-12 * f.abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "target average {f} differs from ∫g = {integral}"
        )));
    }
    allocate_equal_averages(&SlicedProfile::whole(g), part_measures, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_splits_into_copies() {
        let g = MonotoneProfile::constant(3.0).unwrap();
        let parts = rearrange_with_averages(&g, &[0.5, 0.5], 3.0).unwrap();
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert!((p.measure() - 0.5).abs() < 1e-15);
            assert_eq!(p.distribution().unwrap(), vec![(3.0, 0.5)]);
        }
    }

    #[test]
    fn two_level_step_cuts_the_middle() {
        let g = MonotoneProfile::step(vec![0.0, 0.5, 1.0], vec![2.0, 0.0]).unwrap();
        let parts = rearrange_with_averages(&g, &[0.5, 0.5], 1.0).unwrap();
        assert_eq!(parts[0].slices(), &[(0.25, 0.75)]);
        for p in &parts {
            let d = p.distribution().unwrap();
            assert_eq!(d.len(), 2);
            assert!((d[0].0 - 2.0).abs() < 1e-15 && (d[0].1 - 0.25).abs() < 1e-15);
            assert!(d[1].0 == 0.0 && (d[1].1 - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_wrong_target() {
        let g = MonotoneProfile::constant(1.0).unwrap();
        assert!(matches!(
            rearrange_with_averages(&g, &[0.5, 0.5], 1.1),
            Err(Error::Precondition(_))
        ));
        assert!(rearrange_with_averages(&g, &[0.5, 0.4], 1.0).is_err());
    }

    #[test]
    fn power_profile_parts() {
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        let parts = rearrange_with_averages(&g, &[0.25, 0.25, 0.5], 2.0).unwrap();
        let mut slices: Vec<(f64, f64)> = parts.iter().flat_map(|p| p.slices().to_vec()).collect();
        slices.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(slices.first().unwrap().0, 0.0);
        assert_eq!(slices.last().unwrap().1, 1.0);
        assert!(slices.windows(2).all(|w| w[0].1 == w[1].0));
        for p in &parts {
            assert!((p.average() - 2.0).abs() < 1e-9, "{}", p.average());
        }
    }

    #[test]
    fn sliced_integrate_and_window() {
        let g = MonotoneProfile::step(vec![0.0, 0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let s = SlicedProfile::new(&g, vec![(0.1, 0.3), (0.6, 0.9)]).unwrap();
        assert!((s.measure() - 0.5).abs() < 1e-15);
        assert!((s.integrate(0.0, 0.5) - (0.4 + 0.3)).abs() < 1e-15);
        // Window straddling the junction: base (0.2, 0.3] ∪ (0.6, 0.7].
        let w = s.window(0.1, 0.3);
        assert_eq!(w.slices().len(), 2);
        assert!((w.integral() - 0.3).abs() < 1e-15);
        let rest = s.without(0.1, 0.3);
        assert!((rest.integral() + w.integral() - s.integral()).abs() < 1e-15);
        assert!(SlicedProfile::new(&g, vec![(0.5, 0.6), (0.1, 0.2)]).is_err());
    }
}

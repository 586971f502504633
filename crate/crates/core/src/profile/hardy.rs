use super::{power_antiderivative, MonotoneProfile, MonotoneTransform, StepFunction};
use crate::bisect::bisect_boundary;
use crate::error::{domain, Error, Result};
use crate::quadrature::adaptive_gauss_legendre;

/// Relative tolerance of the adaptive quadrature behind [`rhs_integral`].
pub const RHS_REL_TOL: f64 = 1e-10;

/// `A g(t) = (1/t) ∫_0^t g(u) du`.
pub fn hardy_eval(g: &MonotoneProfile, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain("t", t, "(0, 1]"));
    }
    Ok(g.integrate(0.0, t) / t)
}

/// The point `t` with `A g(t) = level`.
///
/// Valid levels lie in `(∫g, g(0+)]`; the upper end is included when `g` is
/// bounded. Where `A g` is flat at `level` the rightmost such point is returned.
pub fn hardy_level(g: &MonotoneProfile, level: f64) -> Result<f64> {
    let f = g.integral();
    let upper = g.sup();
    if !(level > f && level <= upper) {
        return Err(Error::LevelRange {
            level,
            lower: f,
            upper,
        });
    }
    let (coef, alpha, extent) = g.leading_power();
    let at_extent = g.integrate(0.0, extent) / extent;
    if level >= at_extent {
        if alpha < 0.0 {
            // A g(t) = coef/(alpha+1) · t^alpha on (0, extent].
            let t = (level * (alpha + 1.0) / coef).powf(1.0 / alpha);
            return Ok(t.min(extent));
        }
        return Ok(extent);
    }
    let (lo, _) = bisect_boundary(extent, 1.0, 0.0, 256, |t| g.integrate(0.0, t) / t >= level);
    Ok(lo)
}

/// Breakpoints of `t ↦ G(A g(t)) h(t)` strictly inside `(0, k)`, sorted.
fn rhs_breakpoints(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    k: f64,
) -> Vec<f64> {
    let f = g.integral();
    let upper = g.sup();
    let mut pts: Vec<f64> = g
        .interior_breakpoints()
        .into_iter()
        .chain(h.interior_breakpoints())
        .chain(
            transform
                .kinks()
                .into_iter()
                .filter(|&x| x > f && x <= upper)
                .filter_map(|x| hardy_level(g, x).ok()),
        )
        .filter(|&t| t > 0.0 && t < k)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫_0^{t1} G(A g(t)) h(t) dt` in closed form.
///
/// Requires `(0, t1]` to lie inside the leading pieces of `g` and `h` and below
/// every knot crossing of `G`, so the integrand is `K·t^β` there.
fn leading_rhs_term(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    t1: f64,
) -> Result<f64> {
    let (cg, ag, _) = g.leading_power();
    let (ch, ah, _) = h.leading_power();
    let avg_coef = cg / (ag + 1.0);
    let (coef, exponent) = match transform {
        MonotoneTransform::Identity => (avg_coef * ch, ag + ah),
        MonotoneTransform::Power(q) => (avg_coef.powf(*q) * ch, q * ag + ah),
        MonotoneTransform::PiecewiseLinear(pl) => {
            // A g sits above the last crossed knot here, so G is constant.
            let a = if ag < 0.0 {
                avg_coef * t1.powf(ag)
            } else {
                avg_coef
            };
            (pl.apply(a) * ch, ah)
        }
    };
    if coef == 0.0 {
        return Ok(0.0);
    }
    power_antiderivative(exponent, 0.0, t1)
        .map(|v| coef * v)
        .map_err(|_| Error::Divergence(format!("G(A g(t)) h(t) behaves like t^{exponent} near 0")))
}

/// Whether `G(A g(t)) h(t)` is integrable near `0`; a divergence error otherwise.
pub(crate) fn check_integrable_near_zero(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    k: f64,
) -> Result<()> {
    let t1 = rhs_breakpoints(g, h, transform, k)
        .first()
        .copied()
        .unwrap_or(k);
    leading_rhs_term(g, h, transform, t1).map(|_| ())
}

/// `∫_0^k G(A g(t)) h(t) dt`.
///
/// The leading piece is integrated in closed form (it carries any singularity at
/// 0); every other piece of the common refinement of `g`, `h` and the knot
/// crossings of `G` goes through adaptive Gauss-Legendre at [`RHS_REL_TOL`].
pub fn rhs_integral(
    g: &MonotoneProfile,
    h: &MonotoneProfile,
    transform: &MonotoneTransform,
    k: f64,
) -> Result<f64> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(domain("k", k, "(0, 1]"));
    }
    let pts = rhs_breakpoints(g, h, transform, k);
    let t1 = pts.first().copied().unwrap_or(k);
    let mut total = leading_rhs_term(g, h, transform, t1)?;
    let integrand = |t: f64| transform.apply(g.integrate(0.0, t) / t) * h.value(t);
    let mut lo = t1;
    for hi in pts.iter().skip(1).copied().chain(std::iter::once(k)) {
        total += adaptive_gauss_legendre(&integrand, lo, hi, RHS_REL_TOL, 0.0)?;
        lo = hi;
    }
    Ok(total)
}

/// Closed form of `∫_0^k A g(t) h(t) dt` for step `g` and `h`.
///
/// On a common piece `(a, b]` with `g = v`, `h = w`:
/// `A g(t) = v + (I - v·t_g)/t`, where `I = ∫_0^{t_g} g` and `t_g` is the left
/// end of the `g` piece, which integrates to `w·(v(b-a) + (I - v·t_g) ln(b/a))`.
pub fn rhs_integral_identity_exact(g: &StepFunction, h: &StepFunction, k: f64) -> Result<f64> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(domain("k", k, "(0, 1]"));
    }
    let mut pts: Vec<f64> = g
        .breakpoints()
        .iter()
        .chain(h.breakpoints())
        .copied()
        .filter(|&t| t > 0.0 && t < k)
        .collect();
    pts.push(k);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    let mut a = 0.0;
    for b in pts {
        let mid = 0.5 * (a + b);
        let i = g.piece_index(mid);
        let tg = g.breakpoints()[i];
        let v = g.values()[i];
        let w = h.value(mid);
        let offset = g.integrate(0.0, tg) - v * tg;
        let piece = if a == 0.0 {
            v * b
        } else {
            v * (b - a) + offset * (b / a).ln()
        };
        total += w * piece;
        a = b;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::midpoint;

    fn step(b: &[f64], v: &[f64]) -> MonotoneProfile {
        MonotoneProfile::step(b.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn hardy_eval_examples() {
        let c = MonotoneProfile::constant(3.0).unwrap();
        assert!((hardy_eval(&c, 0.37).unwrap() - 3.0).abs() < 1e-15);
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        for t in [0.01, 0.25, 1.0] {
            assert!((hardy_eval(&g, t).unwrap() - 2.0 * t.powf(-0.5)).abs() < 1e-13);
        }
        let g = step(&[0.0, 0.5, 1.0], &[2.0, 1.0]);
        assert_eq!(hardy_eval(&g, 1.0).unwrap(), 1.5);
        assert!(hardy_eval(&g, 0.0).is_err());
        assert!(hardy_eval(&g, 1.5).is_err());
    }

    #[test]
    fn hardy_level_examples() {
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        assert!((hardy_level(&g, 4.0).unwrap() - 0.25).abs() < 1e-12);
        let g = step(&[0.0, 0.5, 1.0], &[2.0, 1.0]);
        assert_eq!(hardy_level(&g, 2.0).unwrap(), 0.5);
        let c = MonotoneProfile::constant(1.5).unwrap();
        assert!(matches!(
            hardy_level(&c, 2.5),
            Err(Error::LevelRange { .. })
        ));
        // At or below the mean there is no unique level.
        assert!(hardy_level(&g, 1.5).is_err());
    }

    #[test]
    fn hardy_level_bisection_branch() {
        let g = step(&[0.0, 0.25, 0.5, 1.0], &[4.0, 2.0, 1.0]);
        // On (1/2, 1], A g(t) = 1 + 1/t.
        let t = hardy_level(&g, 2.5).unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rhs_examples() {
        let one = MonotoneProfile::constant(1.0).unwrap();
        let c = MonotoneProfile::constant(2.5).unwrap();
        let v = rhs_integral(&c, &one, &MonotoneTransform::Identity, 0.4).unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        let v = rhs_integral(&g, &one, &MonotoneTransform::Identity, 1.0).unwrap();
        assert!((v - 4.0).abs() < 1e-13);

        // Midpoint oracle with 10^6 cells.
        let g = step(&[0.0, 0.25, 1.0], &[3.0, 1.0]);
        let sq = MonotoneTransform::power(2.0).unwrap();
        let v = rhs_integral(&g, &one, &sq, 1.0).unwrap();
        let oracle = midpoint(
            &|t: f64| {
                let a = g.integrate(0.0, t) / t;
                a * a
            },
            0.0,
            1.0,
            1_000_000,
        );
        assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
    }

    #[test]
    fn rhs_divergence() {
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        let one = MonotoneProfile::constant(1.0).unwrap();
        let cube = MonotoneTransform::power(3.0).unwrap();
        assert!(matches!(
            rhs_integral(&g, &one, &cube, 0.5),
            Err(Error::Divergence(_))
        ));
        assert!(rhs_integral(&g, &one, &MonotoneTransform::Identity, 0.0).is_err());
    }

    #[test]
    fn rhs_matches_exact_identity_form() {
        let g = step(&[0.0, 0.1, 0.4, 0.55, 1.0], &[5.0, 2.0, 1.25, 0.5]);
        let h = step(&[0.0, 0.3, 0.7, 1.0], &[3.0, 1.0, 0.2]);
        for k in [0.05, 0.3, 0.5, 0.77, 1.0] {
            let q = rhs_integral(&g, &h, &MonotoneTransform::Identity, k).unwrap();
            let e =
                rhs_integral_identity_exact(g.as_step().unwrap(), h.as_step().unwrap(), k).unwrap();
            assert!((q - e).abs() <= 1e-12 * e, "k={k}: {q} vs {e}");
        }
    }

    #[test]
    fn rhs_with_piecewise_linear_transform() {
        let g = MonotoneProfile::power(1.0, -0.5, 1.0).unwrap();
        let h = step(&[0.0, 0.5, 1.0], &[2.0, 1.0]);
        let pl =
            MonotoneTransform::piecewise_linear(vec![(0.0, 0.0), (2.5, 1.0), (4.0, 4.0)]).unwrap();
        let v = rhs_integral(&g, &h, &pl, 0.9).unwrap();
        let k1 = 1.0 / 4.0; // A g = 4 at t = 1/4
        let k2 = 4.0 / 6.25; // A g = 2.5 at t = 0.64
        let f = |t: f64| pl.apply(2.0 / t.sqrt()) * h.value(t);
        let parts = [(0.0, k1), (k1, 0.5), (0.5, k2), (k2, 0.9)];
        let exact: f64 = parts
            .iter()
            .map(|&(a, b)| crate::quadrature::tanh_sinh(&f, a, b, 1e-13).unwrap())
            .sum();
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }
}

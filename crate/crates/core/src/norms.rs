//! `L^p`, weak-`L^p`, the triple norm `sup_E μ(E)^{-1+1/p} ∫_E φ`, and the
//! Lorentz quasi-norm, all evaluated on a decreasing profile.

use crate::error::{domain, Error, Result};
use crate::profile::MonotoneProfile;

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("p", p, "(1, ∞)"));
    }
    Ok(())
}

/// `(∫_0^1 g^p)^{1/p}`.
pub fn lp_norm(g: &MonotoneProfile, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(g.power_integral(p, 0.0, 1.0)?.powf(1.0 / p))
}

/// `sup_{t} t^{1/p} c t^e` on `(0, s]`, attained at `s` when `e > 0`.
fn power_sup(c: f64, e: f64, s: f64, what: &str) -> Result<f64> {
    if c == 0.0 {
        Ok(0.0)
    } else if e > 0.0 {
        Ok(c * s.powf(e))
    } else if e == 0.0 {
        Ok(c)
    } else {
        Err(Error::Divergence(format!(
            "{what} is unbounded: t^{e} as t → 0"
        )))
    }
}

/// `sup_{λ>0} λ μ({g ≥ λ})^{1/p} = sup_t t^{1/p} g(t)`.
pub fn weak_norm(g: &MonotoneProfile, p: f64) -> Result<f64> {
    check_p(p)?;
    match g {
        MonotoneProfile::Step(s) => Ok(s
            .pieces()
            .map(|(_, b, v)| v * b.powf(1.0 / p))
            .fold(0.0, f64::max)),
        MonotoneProfile::TruncatedPower(tp) => {
            power_sup(tp.c(), tp.alpha() + 1.0 / p, tp.cutoff(), "the weak norm")
        }
    }
}

/// `sup_{t ∈ (0,1]} t^{-1+1/p} ∫_0^t g`.
///
/// On a step piece the function is `A t^{-β} + v t^{1-β}` with `A ≥ 0`, whose
/// only critical point is a minimum, so the supremum sits at a right endpoint.
pub fn triple_norm(g: &MonotoneProfile, p: f64) -> Result<f64> {
    check_p(p)?;
    let e = 1.0 / p - 1.0;
    match g {
        MonotoneProfile::Step(s) => Ok(s
            .pieces()
            .map(|(_, b, _)| b.powf(e) * s.integrate(0.0, b))
            .fold(0.0, f64::max)),
        MonotoneProfile::TruncatedPower(tp) => power_sup(
            tp.c() / (tp.alpha() + 1.0),
            tp.alpha() + 1.0 / p,
            tp.cutoff(),
            "the triple norm",
        ),
    }
}

/// `(∫_0^1 (g(t) t^{1/p})^q dt/t)^{1/q}`.
pub fn lorentz_norm(g: &MonotoneProfile, p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    if !(q > 0.0 && q.is_finite()) {
        return Err(domain("q", q, "(0, ∞)"));
    }
    let r = q / p;
    let total = match g {
        MonotoneProfile::Step(s) => s
            .pieces()
            .map(|(a, b, v)| v.powf(q) * (b.powf(r) - a.powf(r)) / r)
            .sum(),
        MonotoneProfile::TruncatedPower(tp) => {
            if tp.c() == 0.0 {
                0.0
            } else {
                let e = q * tp.alpha() + r;
                if e <= 0.0 {
                    return Err(Error::Divergence(format!(
                        "the Lorentz integrand behaves like t^{} near 0",
                        e - 1.0
                    )));
                }
                tp.c().powf(q) * tp.cutoff().powf(e) / e
            }
        }
    };
    Ok(total.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_step() -> MonotoneProfile {
        MonotoneProfile::step(vec![0.0, 0.25, 1.0], vec![3.0, 1.0]).unwrap()
    }

    #[test]
    fn constants() {
        let c = MonotoneProfile::constant(1.7).unwrap();
        assert!((lp_norm(&c, 3.0).unwrap() - 1.7).abs() < 1e-15);
        assert_eq!(weak_norm(&c, 2.0).unwrap(), 1.7);
        assert_eq!(triple_norm(&c, 2.0).unwrap(), 1.7);
        assert!((lorentz_norm(&c, 2.0, 1.0).unwrap() - 3.4).abs() < 1e-15);
    }

    #[test]
    fn power_examples() {
        let g = MonotoneProfile::power(1.0, -0.25, 1.0).unwrap();
        assert!((lp_norm(&g, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        for p in [1.5, 2.0, 4.0] {
            let f: f64 = 0.6;
            let psi =
                MonotoneProfile::power((p - 1.0) / p, -1.0 / p, f.powf(p / (p - 1.0))).unwrap();
            assert!((weak_norm(&psi, p).unwrap() - (p - 1.0) / p).abs() < 1e-15);
            assert!((triple_norm(&psi, p).unwrap() - 1.0).abs() < 1e-15);
        }
        for (p, q, alpha) in [(2.0, 1.0, -0.25), (3.0, 2.0, -0.1), (4.0, 0.5, 0.0)] {
            let g = MonotoneProfile::power(1.0, alpha, 1.0).unwrap();
            let expected = 1.0 / (q * (alpha + 1.0 / p));
            let got = lorentz_norm(&g, p, q).unwrap().powf(q);
            assert!((got - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn step_examples() {
        let g = two_step();
        assert_eq!(weak_norm(&g, 2.0).unwrap(), 1.5);
        assert_eq!(triple_norm(&g, 2.0).unwrap(), 1.5);
    }

    #[test]
    fn divergence() {
        let g = MonotoneProfile::power(1.0, -0.6, 1.0).unwrap();
        assert!(matches!(weak_norm(&g, 2.0), Err(Error::Divergence(_))));
        assert!(matches!(triple_norm(&g, 2.0), Err(Error::Divergence(_))));
        assert!(matches!(
            lorentz_norm(&g, 2.0, 1.0),
            Err(Error::Divergence(_))
        ));
        assert!(matches!(lp_norm(&g, 2.0), Err(Error::Divergence(_))));
        assert!(lp_norm(&g, 1.0).is_err());
    }
}

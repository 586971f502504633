//! Closed forms for the sharp constants: `H_p`, its inverse `ω_p`, the Bellman
//! function `B_p(f, F)`, the weak-type bound `Δ`, the triple-norm constant and
//! the Lorentz witness ratio.

use crate::bisect::bisect_boundary;
use crate::error::{domain, Error, Result};

const EDGE_TOL: f64 = 1e-12;

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("p", p, "(1, ∞)"));
    }
    Ok(())
}

/// `p/(p-1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// `H_p(z) = -(p-1) z^p + p z^{p-1}` on `[1, p/(p-1)]`, decreasing from 1 to 0.
pub fn h_p(p: f64, z: f64) -> Result<f64> {
    check_p(p)?;
    let top = conjugate(p);
    if !(z >= 1.0 - EDGE_TOL && z <= top + EDGE_TOL) {
        return Err(domain("z", z, format!("[1, {top}]")));
    }
    let v = z.powf(p - 1.0) * (p - (p - 1.0) * z);
    Ok(v.clamp(0.0, 1.0))
}

/// `ω_p = H_p^{-1}: [0, 1] → [1, p/(p-1)]`, by bisection.
///
/// `H_p'` vanishes at `z = 1`, so near `y = 1` the inverse is only as accurate
/// as `y` itself allows.
pub fn omega(p: f64, y: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&y) {
        return Err(domain("y", y, "[0, 1]"));
    }
    let top = conjugate(p);
    if y == 1.0 {
        return Ok(1.0);
    }
    if y == 0.0 {
        return Ok(top);
    }
    let (lo, hi) = bisect_boundary(1.0, top, 0.0, 200, |z| {
        h_p(p, z).map(|h| h >= y).unwrap_or(false)
    });
    // Return the bracket end whose image is closer to y.
    let dl = (h_p(p, lo)? - y).abs();
    let dh = (h_p(p, hi)? - y).abs();
    Ok(if dh < dl { hi } else { lo })
}

/// `B_p(f, F) = F ω_p(f^p/F)^p` for `0 < f^p ≤ F`.
pub fn bellman_b(p: f64, f: f64, big_f: f64) -> Result<f64> {
    check_p(p)?;
    if !(f > 0.0 && f.is_finite()) {
        return Err(domain("f", f, "(0, ∞)"));
    }
    let fp = f.powf(p);
    if !(big_f.is_finite() && fp <= big_f * (1.0 + EDGE_TOL)) {
        return Err(Error::Precondition(format!(
            "need 0 < f^p ≤ F, got f^p = {fp}, F = {big_f}"
        )));
    }
    let y = (fp / big_f).min(1.0);
    Ok(big_f * omega(p, y)?.powf(p))
}

fn check_delta(p: f64, q: f64, f: f64, k: f64) -> Result<()> {
    check_p(p)?;
    if !(q > 1.0 && q < p) {
        return Err(domain("q", q, format!("(1, {p})")));
    }
    if !(f > 0.0 && f <= 1.0) {
        return Err(domain("f", f, "(0, 1]"));
    }
    if !(k > 0.0 && k <= 1.0) {
        return Err(domain("k", k, "(0, 1]"));
    }
    Ok(())
}

/// Both closed-form branches of `Δ(f, (p-1)/p, k)`, evaluated at the same `k`
/// regardless of which one applies: `(small_k, large_k)`.
pub fn delta_branches(p: f64, q: f64, f: f64, k: f64) -> Result<(f64, f64)> {
    check_delta(p, q, f, k)?;
    let small = p / (p - q) * k.powf(1.0 - q / p);
    let large = q * (p - 1.0) / ((p - q) * (q - 1.0)) * f.powf((p - q) / (p - 1.0))
        - k.powf(1.0 - q) * f.powf(q) / (q - 1.0);
    Ok((small, large))
}

/// `Δ(f, (p-1)/p, k)`: the sharp bound for `sup ∫_K (M φ)^q` over `φ` with
/// `∫φ = f` and weak norm `(p-1)/p`, `|K| = k`.
pub fn delta(p: f64, q: f64, f: f64, k: f64) -> Result<f64> {
    let (small, large) = delta_branches(p, q, f, k)?;
    Ok(if k <= delta_junction(p, f) {
        small
    } else {
        large
    })
}

/// `f^{p/(p-1)}`, where the two branches of [`delta`] meet.
pub fn delta_junction(p: f64, f: f64) -> f64 {
    f.powf(conjugate(p))
}

/// `(p/(p-1))^2 F`, the sharp triple-norm bound for `M φ` given weak norm `F`.
pub fn e_constant(p: f64, big_f: f64) -> Result<f64> {
    check_p(p)?;
    if !(big_f >= 0.0 && big_f.is_finite()) {
        return Err(domain("F", big_f, "[0, ∞)"));
    }
    Ok(conjugate(p).powi(2) * big_f)
}

/// `p/(p-1)`, the norm of `M` on `L^{p,q}` for `q < p`.
pub fn lorentz_operator_norm(p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    if !(q > 0.0 && q < p) {
        return Err(domain("q", q, format!("(0, {p})")));
    }
    Ok(conjugate(p))
}

/// `(1/(1+α))^q`, the ratio of `∫(A g_α)^q t^{q/p-1}` to `∫g_α^q t^{q/p-1}`
/// for `g_α(t) = t^α`, `-1/p < α ≤ 0`.
pub fn lorentz_witness_ratio(p: f64, q: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    if !(q > 0.0 && q.is_finite()) {
        return Err(domain("q", q, "(0, ∞)"));
    }
    if !(alpha > -1.0 / p && alpha <= 0.0) {
        return Err(domain("alpha", alpha, format!("({}, 0]", -1.0 / p)));
    }
    Ok((1.0 + alpha).powf(-q))
}

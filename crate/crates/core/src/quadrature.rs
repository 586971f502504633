//! One-dimensional quadrature.
//!
//! Three independent rules live here:
//!
//! * [`adaptive_gauss_legendre`] is the production rule used by the Hardy-side
//!   integrals. It expects a smooth integrand on a closed interval; callers split
//!   at every breakpoint before calling it.
//! * [`tanh_sinh`] is a double-exponential rule that tolerates integrable
//!   algebraic endpoint singularities. It serves as an oracle for integrands that
//!   blow up at `0`.
//! * [`midpoint`] is the plain composite midpoint Riemann sum, the coarsest oracle.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const GAUSS_ORDER: usize = 12;
const MAX_DEPTH: u32 = 48;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Roots are found by Newton iteration on the three-term Legendre recurrence,
/// seeded with the Tricomi approximation.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let dn = n as f64 * (x * pn - p0) / (x * x - 1.0);
    (pn, dn)
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(GAUSS_ORDER))
}

/// Fixed-order Gauss-Legendre estimate of `∫_a^b f`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = default_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive Gauss-Legendre quadrature of `∫_a^b f` to relative tolerance `rel_tol`.
///
/// Each interval is accepted when the one-panel and two-panel estimates agree to
/// `rel_tol` relative to the two-panel value, or to `abs_tol` absolutely.
pub fn adaptive_gauss_legendre<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let whole = gauss_legendre(f, a, b);
    refine(f, a, b, whole, rel_tol, abs_tol, 0)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = gauss_legendre(f, a, m);
    let right = gauss_legendre(f, m, b);
    let split = left + right;
    if !split.is_finite() {
        return Err(Error::Divergence(format!(
            "non-finite integrand values on [{a}, {b}]"
        )));
    }
    if (split - whole).abs() <= (rel_tol * split.abs()).max(abs_tol) {
        return Ok(split);
    }
    if depth >= MAX_DEPTH || m <= a || m >= b {
        return Err(Error::Quadrature { a, b });
    }
    // Halve the absolute budget; the relative one is local on nonnegative integrands.
    let l = refine(f, a, m, left, rel_tol, 0.5 * abs_tol, depth + 1)?;
    let r = refine(f, m, b, right, rel_tol, 0.5 * abs_tol, depth + 1)?;
    Ok(l + r)
}

/// Tanh-sinh (double exponential) quadrature of `∫_a^b f`.
///
/// The integrand is never evaluated at the endpoints, and abscissae close to an
/// endpoint are formed from the endpoint distance directly, so integrable
/// singularities like `t^{-0.9}` at `a = 0` are handled.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    const U_MAX: f64 = 5.0;
    const MAX_LEVEL: u32 = 12;
    let width = b - a;
    let half_pi = std::f64::consts::FRAC_PI_2;

    // Contribution of abscissa u (and the mirrored -u) scaled by the step.
    let term = |u: f64| -> f64 {
        let y = half_pi * u.sinh();
        let weight = half_pi * u.cosh() / (y.cosh() * y.cosh()) * 0.5 * width;
        if weight == 0.0 || !weight.is_finite() {
            return 0.0;
        }
        let mut s = 0.0;
        // Distance from a for -u, distance from b for +u.
        let d = width / (1.0 + (2.0 * y).exp());
        if d > 0.0 {
            let left = a + d;
            let right = b - d;
            if left > a {
                s += f(left);
            }
            if right < b {
                s += f(right);
            }
        }
        if u == 0.0 {
            s *= 0.5;
        }
        s * weight
    };

    let mut h = 1.0;
    let mut sum: f64 = 0.0;
    let mut k = 0.0;
    while k <= U_MAX {
        sum += term(k);
        k += h;
    }
    let mut estimate = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut u = h;
        while u <= U_MAX {
            sum += term(u);
            u += 2.0 * h;
        }
        let next = sum * h;
        if !next.is_finite() {
            return Err(Error::Divergence(format!(
                "non-finite integrand values on [{a}, {b}]"
            )));
        }
        if (next - estimate).abs() <= rel_tol * next.abs() {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::Quadrature { a, b })
}

/// Composite midpoint rule with `cells` equal cells.
pub fn midpoint<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cells: usize) -> f64 {
    if b <= a || cells == 0 {
        return 0.0;
    }
    let h = (b - a) / cells as f64;
    (0..cells).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_rule(GAUSS_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Degree 2n-1 polynomials are exact.
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_integrands() {
        let v = adaptive_gauss_legendre(&|t: f64| t.exp(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = adaptive_gauss_legendre(&|t: f64| 1.0 / t, 1e-3, 1.0, 1e-12, 0.0).unwrap();
        assert!((v - 1e3f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let v = tanh_sinh(&|t: f64| t.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v = tanh_sinh(&|t: f64| t.powf(-0.9), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 10.0).abs() < 1e-7, "{v}");
        let v = tanh_sinh(&|t: f64| (1.0 - t).ln().abs(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn midpoint_is_second_order() {
        let v = midpoint(&|t: f64| t * t, 0.0, 1.0, 1000);
        assert!((v - 1.0 / 3.0).abs() < 1e-7);
    }
}

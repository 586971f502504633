/// Bisection on a monotone predicate.
///
/// `keep_low(lo)` must hold and `keep_low(hi)` must fail. Returns the final
/// bracket `(lo, hi)`, where `keep_low(lo)` still holds. Stops when the bracket is
/// no wider than `tol`, when the midpoint can no longer be represented strictly
/// inside the bracket, or after `max_iter` halvings. `lo` may be greater than `hi`.
pub fn bisect_boundary<P>(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: u32,
    mut keep_low: P,
) -> (f64, f64)
where
    P: FnMut(f64) -> bool,
{
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid == lo || mid == hi {
            break;
        }
        if keep_low(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let (lo, hi) = bisect_boundary(0.0, 2.0, 0.0, 200, |x| x * x <= 2.0);
        assert!(lo * lo <= 2.0);
        assert!((lo - 2f64.sqrt()).abs() <= 4e-16);
        assert!(hi >= lo);
    }

    #[test]
    fn works_with_reversed_bracket() {
        let (lo, _) = bisect_boundary(1.0, 0.0, 1e-12, 200, |x| x >= 0.3);
        assert!((lo - 0.3).abs() <= 1e-12);
    }
}

//! Bracketed inversion of monotone functions.

/// Solves `f(x) = target` for a non-decreasing `f` on `[lo, hi]` by bisection.
///
/// Stops once the bracket is narrower than `xtol` or can no longer be split in
/// floating point (`xtol = 0`). The caller guarantees
/// `f(lo) <= target <= f(hi)`.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, target: f64, xtol: f64) -> f64 {
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= xtol {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

//! Scalar root-finding helpers: sign-bracketing scans and bisection.

use crate::scalar::{lit, Real};

/// Maximum bisection iterations; enough to exhaust an `f64` mantissa on any
/// bracket that fits in the unit interval.
pub(crate) const MAX_BISECT_ITER: u32 = 200;
/// Grid resolution used when scanning for sign changes.
pub(crate) const BRACKET_GRID_POINTS: usize = 64;

/// Bisect `f` on `[lo, hi]`, which must bracket a sign change. Stops when the
/// interval is narrower than `xtol` or after [`MAX_BISECT_ITER`] halvings and
/// returns the midpoint.
pub(crate) fn bisect<F: Real>(f: impl Fn(F) -> F, mut lo: F, mut hi: F, xtol: F) -> F {
    let two = lit::<F>(2.0);
    let mut flo = f(lo);
    for _ in 0..MAX_BISECT_ITER {
        let mid = (lo + hi) / two;
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return mid;
        }
        let fmid = f(mid);
        if fmid == F::zero() {
            return mid;
        }
        if (flo < F::zero()) == (fmid < F::zero()) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// Scan a log-spaced grid over `[lo, hi]` (both positive) and collect every
/// consecutive pair where `f` changes sign. Non-finite samples are skipped.
pub(crate) fn brackets_on_log_grid<F: Real>(
    f: impl Fn(F) -> F,
    lo: F,
    hi: F,
) -> Vec<(F, F)> {
    let n = BRACKET_GRID_POINTS;
    let llo = lo.ln();
    let lhi = hi.ln();
    let step = (lhi - llo) / F::from_usize(n - 1).unwrap();
    let mut out = Vec::new();
    let mut prev: Option<(F, F)> = None;
    for i in 0..n {
        let x = (llo + step * F::from_usize(i).unwrap()).exp();
        let y = f(x);
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if (py < F::zero()) != (y < F::zero()) || y == F::zero() {
                out.push((px, x));
            }
        }
        prev = Some((x, y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let root = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn log_grid_brackets_single_root() {
        let b = brackets_on_log_grid(|x: f64| x.ln(), 0.1, 10.0);
        assert_eq!(b.len(), 1);
        assert!(b[0].0 < 1.0 && 1.0 < b[0].1);
    }
}

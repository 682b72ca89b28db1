//! Bracketing root finders.

use crate::error::{Error, Result};

/// Sign-change brackets of `f` on a uniform grid of `n` intervals over `[lo, hi]`.
///
/// A grid point where `f` vanishes exactly yields a degenerate bracket `(x, x)`.
pub fn scan_brackets<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let step = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..=n {
        let x = if i == n { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if f_prev != 0.0 && f_prev.signum() != fx.signum() {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

/// Bisection on a sign-changing bracket.
///
/// With `tol = 0` the interval is halved until it can no longer shrink in
/// floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::RootNotBracketed {
            what: "bisection".into(),
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) || (hi - lo).abs() <= tol {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximum of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(&|x| x * x - 2.0, 0.0, 2.0, 0.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert!(bisect(&|x| x * x + 1.0, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn scan_reports_exact_grid_zero() {
        let b = scan_brackets(&|x: f64| x, -1.0, 1.0, 2);
        assert_eq!(b, vec![(0.0, 0.0)]);
    }

    #[test]
    fn scan_counts_sine_zeros() {
        let b = scan_brackets(&|x: f64| x.sin(), 0.5, 10.0, 1000);
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn golden_section_on_parabola() {
        let x = golden_max(&|x| -(x - 0.3) * (x - 0.3), -2.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }
}

//! Bessel functions of the first kind for integer order, and their zeros.
//!
//! Small arguments use the ascending power series. Moderate arguments use
//! Miller's backward recurrence normalised by `J0 + 2 Σ J_2k = 1`, and very
//! large arguments the Hankel asymptotic expansion.

use std::f64::consts::PI;

use super::roots::{bisect, scan_brackets};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 500.0;

/// `J_n(x)` for integer `n >= 0` and any real `x`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax < SERIES_LIMIT {
        bessel_j_series(n, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        bessel_j_miller(n, ax)
    } else {
        bessel_j_asymptotic(n, ax)
    };
    if x < 0.0 && n % 2 == 1 {
        -value
    } else {
        value
    }
}

/// `d/dx J_n(x)`.
pub fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

pub(crate) fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) || k > 200 {
            break;
        }
    }
    sum
}

pub(crate) fn bessel_j_miller(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // Start well above both the order and the argument so the dominant
    // (Y-like) solution has died out by the time we reach order n.
    let start = {
        let base = (x.max(n as f64) + 40.0 + 10.0 * x.sqrt()) as u32;
        base + base % 2
    };
    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    let mut k = start;
    while k > 0 {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        k -= 1;
        if k == n {
            wanted = j_cur;
        }
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += j_cur;
    if n == 0 {
        wanted = j_cur;
    }
    wanted / norm
}

pub(crate) fn bessel_j_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Which family of zeros to locate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BesselZeroKind {
    /// `p_nm`: the m-th positive zero of `J_n`.
    Function,
    /// `q_nm`: the m-th positive zero of `J_n'` (x = 0 excluded).
    Derivative,
}

/// m-th positive zero (`m >= 1`) of `J_n` or `J_n'`.
///
/// Zeros are bracketed by a uniform scan (step 0.1, well below the ~π
/// spacing of consecutive zeros) and refined by bisection to machine
/// precision.
pub fn bessel_zero(kind: BesselZeroKind, n: u32, m: u32) -> f64 {
    assert!(m >= 1, "Bessel zero index starts at 1");
    let f = |x: f64| match kind {
        BesselZeroKind::Function => bessel_j(n, x),
        BesselZeroKind::Derivative => bessel_j_prime(n, x),
    };
    // McMahon-type upper estimate of the m-th zero with generous margin.
    let upper = (m as f64 + 0.5 * n as f64 + 1.0) * PI + 10.0;
    let mut lo = 1e-6;
    let mut found = 0u32;
    loop {
        let hi = lo + upper;
        for (a, b) in scan_brackets(&f, lo, hi, ((hi - lo) / 0.1).ceil() as usize) {
            found += 1;
            if found == m {
                return bisect(&f, a, b, 0.0).expect("bracket carries a sign change");
            }
        }
        lo = hi;
    }
}

//! Zeroth-order Bessel function of the first kind.
//!
//! Three regimes:
//! - `|x| <= 2`: ascending power series (all terms below one in magnitude, no cancellation).
//! - `2 < |x| <= 25`: Miller backward recurrence normalized with
//!   `J0 + 2 (J2 + J4 + ...) = 1`.
//! - `|x| > 25`: Hankel asymptotic expansion, truncated at the smallest term.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 2.0;
const RECURRENCE_LIMIT: f64 = 25.0;

/// `J0(x)` with a domain check on the argument.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("bessel_j0 argument must be finite, got {x}")));
    }
    Ok(j0(x))
}

/// Unchecked `J0(x)`; returns NaN for non-finite input.
pub fn j0(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        series(ax)
    } else if ax <= RECURRENCE_LIMIT {
        miller(ax)
    } else {
        hankel(ax)
    }
}

fn series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn miller(x: f64) -> f64 {
    // Even start index comfortably above x so the seed error decays away.
    let mut m = (x as usize) + 40;
    m += m % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-30; // J_n
    let mut norm = 0.0;
    for n in (1..=m).rev() {
        let prev = n as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds J_{n-1}.
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    cur / norm
}

fn hankel(x: f64) -> f64 {
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd * inv8x / k as f64;
        if term >= last || term < 1e-18 {
            break;
        }
        last = term;
        // k odd feeds Q, k even feeds P; signs alternate within each series.
        match k % 4 {
            1 => q -= term,
            2 => p -= term,
            3 => q += term,
            _ => p += term,
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

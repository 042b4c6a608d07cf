//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection on a sign-changing bracket until the bracket width falls below
/// `x_tol` (absolute) or `rel_tol·|x|`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64, rel_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::RootBracketFailure { lo, hi });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol.max(rel_tol * mid.abs()) || mid == lo || mid == hi {
            return Ok(mid);
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

/// Bisection down to a coarse bracket, then Newton iterations that fall back
/// to bisection whenever an iterate leaves the bracket. `f` returns the value
/// and derivative.
pub fn bisect_then_newton<F: FnMut(f64) -> (f64, f64)>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::RootBracketFailure { lo, hi });
    }
    let rising = f_hi > 0.0;
    let mut x = bisect(|x| f(x).0, lo, hi, 0.0, 1e-3)?;
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= rel_tol * x.abs() || hi - lo <= rel_tol * x.abs() {
            return Ok(x);
        }
    }
    Ok(x)
}

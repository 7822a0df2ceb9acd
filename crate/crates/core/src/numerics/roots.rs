//! Bracketing and polishing of scalar roots.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scans a logarithmic grid on `[lo, hi]` from the top down and returns the
/// highest adjacent pair `(a, b)` with `f(a) <= 0 < f(b)`.
pub fn bracket_largest_upcrossing<T, F>(f: F, lo: T, hi: T, points: usize) -> Option<(T, T)>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    assert!(lo > T::zero() && hi > lo && points >= 2);
    let ratio = (hi / lo).ln() / T::from_usize_lossy(points - 1);
    let node = |k: usize| lo * (ratio * T::from_usize_lossy(k)).exp();
    let mut upper = hi;
    let mut f_upper = f(upper);
    for k in (0..points - 1).rev() {
        let lower = node(k);
        let f_lower = f(lower);
        if f_lower <= T::zero() && f_upper > T::zero() {
            return Some((lower, upper));
        }
        upper = lower;
        f_upper = f_lower;
    }
    None
}

/// Plain bisection on a sign-changing bracket.
///
/// Runs until the bracket is narrower than `rel_tol * |x|` or can no longer
/// shrink in floating point, then returns whichever endpoint has the smaller
/// residual.
pub fn bisect<T, F>(f: F, mut lo: T, mut hi: T, rel_tol: T, max_iter: usize) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if (f_lo < T::zero()) == (f_hi < T::zero()) {
        return Err(Error::NonConvergent(format!(
            "bisection bracket [{lo:e}, {hi:e}] has no sign change"
        )));
    }
    let two = T::lit(2.0);
    for _ in 0..max_iter {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * mid.abs() {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Newton iteration kept inside a bracket; a step that leaves the bracket is
/// replaced by a bisection step.
pub fn newton_bracketed<T, F>(f: F, mut lo: T, mut hi: T, tol: T, max_iter: usize) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> (T, T),
{
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if (f_lo < T::zero()) == (f_hi < T::zero()) && f_lo != T::zero() && f_hi != T::zero() {
        return Err(Error::NonConvergent(format!(
            "Newton bracket [{lo:e}, {hi:e}] has no sign change"
        )));
    }
    let lo_negative = f_lo < T::zero();
    let two = T::lit(2.0);
    let mut x = lo + (hi - lo) / two;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx < T::zero()) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != T::zero() && newton > lo && newton < hi {
            newton
        } else {
            lo + (hi - lo) / two
        };
        if (next - x).abs() <= tol * next.abs().max(T::min_positive_value()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergent(format!("Newton iteration did not settle near {x:e}")))
}

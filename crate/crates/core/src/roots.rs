//! Bracketed root finding for increasing functions.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const MAX_EXPANSIONS: usize = 200;

/// Finds a bracket `[lo, hi]` with `f(lo) ≤ 0 ≤ f(hi)` for an increasing `f`, by
/// geometric expansion to the right of `start`.
///
/// `f(start)` must already be ≤ 0. The right end never exceeds `end`.
pub(crate) fn expand_bracket<F>(f: &F, start: f64, end: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut lo = start;
    let mut step = start.abs().max(1.0);
    for _ in 0..MAX_EXPANSIONS {
        let hi = (start + step).min(end);
        let fh = f(hi);
        if fh.is_nan() {
            return Err(Error::Convergence(format!("function is NaN at {hi}")));
        }
        if fh >= 0.0 {
            return Ok((lo, hi));
        }
        if hi >= end {
            return Err(Error::Convergence(format!(
                "no sign change before domain end {end}"
            )));
        }
        lo = hi;
        step *= 2.0;
    }
    Err(Error::Convergence(format!(
        "bracket expansion exceeded {MAX_EXPANSIONS} doublings"
    )))
}

/// Solves `f(x) = 0` for an increasing `f` inside `[lo, hi]` with `f(lo) ≤ 0 ≤ f(hi)`.
///
/// Secant steps are taken inside the bracket; whenever a step fails to halve the
/// bracket the next one is a bisection. Returns once `|f(x)| ≤ tol`, or the best
/// endpoint when the bracket has shrunk to floating-point resolution.
pub(crate) fn solve_increasing<F>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Convergence(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }

    let mut force_bisect = false;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        let secant = lo - f_lo * width / (f_hi - f_lo);
        let x = if force_bisect || !(secant > lo && secant < hi) {
            0.5 * (lo + hi)
        } else {
            secant
        };
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Convergence(format!("function is NaN at {x}")));
        }
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        force_bisect = hi - lo > 0.5 * width;

        let resolution = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        if hi - lo <= resolution || x == lo && x == hi {
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }
    }
    Err(Error::Convergence(format!(
        "no convergence after {MAX_ITER} iterations on [{lo}, {hi}]"
    )))
}

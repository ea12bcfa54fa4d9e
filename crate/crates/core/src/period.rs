//! Forward and backward variable periods, and residual checks of the identities
//! they satisfy.
//!
//! For a phase `g` the forward period solves `g(x + T(x)) = g(x) + 2π` and the
//! backward period solves `g(x − T⁻(x)) = g(x) − 2π`. The two are tied together by
//! `T(x) = T⁻(x + T(x))` and `T⁻(x) = T(x − T⁻(x))`, and an admissible period has
//! `T′(x) > −1`.

use crate::error::{Error, Result};
use crate::phase::{PhaseFunction, PhaseKind, Wave, DEFAULT_INVERSION_TOL};
use crate::TWO_PI;

/// Default bound on `|f(x ± T) − f(x)|`.
pub const PERIODICITY_TOL: f64 = 1e-8;
/// Default bound on the forward/backward consistency residuals.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A period value at `x`, together with the periodicity residual
/// `|sin g(x ± T) − sin g(x)|` observed with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodResult {
    pub x: f64,
    pub value: f64,
    pub direction: Direction,
    pub residual: f64,
}

impl PeriodResult {
    /// The point where the function value repeats: `x + T` or `x − T⁻`.
    pub fn partner(&self) -> f64 {
        match self.direction {
            Direction::Forward => self.x + self.value,
            Direction::Backward => self.x - self.value,
        }
    }
}

fn check_power_args(alpha: f64, x: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exponent must be positive and finite, got {alpha}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::OutOfDomain {
            x,
            start: 0.0,
            end: f64::INFINITY,
        });
    }
    Ok(())
}

fn sine_residual(alpha: f64, x: f64, partner: f64) -> f64 {
    (partner.powf(alpha).sin() - x.powf(alpha).sin()).abs()
}

/// Closed-form forward period of `sin x^α`: `T(x) = (x^α + 2π)^{1/α} − x`.
pub fn forward_period_power(alpha: f64, x: f64) -> Result<PeriodResult> {
    check_power_args(alpha, x)?;
    let value = if alpha == 1.0 {
        TWO_PI
    } else {
        (x.powf(alpha) + TWO_PI).powf(1.0 / alpha) - x
    };
    Ok(PeriodResult {
        x,
        value,
        direction: Direction::Forward,
        residual: sine_residual(alpha, x, x + value),
    })
}

/// Closed-form backward period of `sin x^α`: `T⁻(x) = x − (x^α − 2π)^{1/α}`,
/// defined for `x ≥ (2π)^{1/α}`.
pub fn backward_period_power(alpha: f64, x: f64) -> Result<PeriodResult> {
    check_power_args(alpha, x)?;
    if alpha == 1.0 {
        if x < TWO_PI {
            return Err(Error::BackwardUndefined { x });
        }
        return Ok(PeriodResult {
            x,
            value: TWO_PI,
            direction: Direction::Backward,
            residual: sine_residual(1.0, x, x - TWO_PI),
        });
    }
    if x < TWO_PI.powf(1.0 / alpha) {
        return Err(Error::BackwardUndefined { x });
    }
    // x^α can land a few ulps under 2π at the threshold itself
    let shifted = (x.powf(alpha) - TWO_PI).max(0.0);
    let partner = shifted.powf(1.0 / alpha);
    Ok(PeriodResult {
        x,
        value: x - partner,
        direction: Direction::Backward,
        residual: sine_residual(alpha, x, partner),
    })
}

/// `T_g(x) = g⁻¹(g(x) + 2π) − x`.
pub fn forward_period_general(phase: &PhaseFunction, x: f64, tol: f64) -> Result<PeriodResult> {
    let gx = phase.eval(x)?;
    let value = match phase.kind() {
        PhaseKind::Identity => TWO_PI,
        _ => phase.inverse(gx + TWO_PI, tol)? - x,
    };
    let partner = x + value;
    Ok(PeriodResult {
        x,
        value,
        direction: Direction::Forward,
        residual: (phase.eval(partner)?.sin() - gx.sin()).abs(),
    })
}

/// `T⁻_g(x) = x − g⁻¹(g(x) − 2π)`, defined when `g(x) − 2π` is in the range of `g`.
pub fn backward_period_general(phase: &PhaseFunction, x: f64, tol: f64) -> Result<PeriodResult> {
    let gx = phase.eval(x)?;
    let (start, _) = phase.domain();
    let target = gx - TWO_PI;
    let value = match phase.kind() {
        PhaseKind::Identity => TWO_PI,
        // x sits on the first period boundary up to rounding
        _ if target < phase.eval(start)? && target >= phase.eval(start)? - tol => x - start,
        _ => match phase.inverse(target, tol) {
            Ok(partner) => x - partner,
            Err(Error::NoPreimage { .. }) => return Err(Error::BackwardUndefined { x }),
            Err(e) => return Err(e),
        },
    };
    let partner = x - value;
    Ok(PeriodResult {
        x,
        value,
        direction: Direction::Backward,
        residual: (phase.eval(partner)?.sin() - gx.sin()).abs(),
    })
}

/// `|sin g(x + T(x)) − sin g(x)|`.
pub fn check_periodicity(phase: &PhaseFunction, x: f64) -> Result<f64> {
    check_periodicity_wave(phase, x, Wave::Sine)
}

/// Periodicity residual for `sin∘g` or `cos∘g`.
pub fn check_periodicity_wave(phase: &PhaseFunction, x: f64, wave: Wave) -> Result<f64> {
    let t = forward_period_general(phase, x, DEFAULT_INVERSION_TOL)?;
    let here = wave.apply(phase.eval(x)?);
    let there = wave.apply(phase.eval(x + t.value)?);
    Ok((there - here).abs())
}

/// Residuals of the two forward/backward relations at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyResiduals {
    /// `|T(x) − T⁻(x + T(x))|`.
    pub forward: f64,
    /// `|T⁻(x) − T(x − T⁻(x))|`; `None` where `T⁻(x)` is undefined.
    pub backward: Option<f64>,
}

pub fn check_period_consistency(phase: &PhaseFunction, x: f64) -> Result<ConsistencyResiduals> {
    let tol = DEFAULT_INVERSION_TOL;
    let t = forward_period_general(phase, x, tol)?;
    let t_back_ahead = backward_period_general(phase, x + t.value, tol)?;
    let forward = (t.value - t_back_ahead.value).abs();

    let backward = match backward_period_general(phase, x, tol) {
        Ok(tb) => {
            let t_behind = forward_period_general(phase, x - tb.value, tol)?;
            Some((tb.value - t_behind.value).abs())
        }
        Err(Error::BackwardUndefined { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ConsistencyResiduals { forward, backward })
}

/// Minimum of `T′` over `n` uniform points of `[x_lo, x_hi]`.
///
/// `T′` is a central difference of the general forward period with step
/// `1e-5·(1 + |x|)`, one-sided where the stencil would leave the domain.
pub fn check_derivative_bound(
    phase: &PhaseFunction,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {n}")));
    }
    if !(x_lo < x_hi) {
        return Err(Error::InvalidParameter(format!(
            "empty range [{x_lo}, {x_hi}]"
        )));
    }
    for x in [x_lo, x_hi] {
        if !phase.contains(x) {
            let (start, end) = phase.domain();
            return Err(Error::OutOfDomain { x, start, end });
        }
    }
    let tol = DEFAULT_INVERSION_TOL;
    let period = |x: f64| forward_period_general(phase, x, tol).map(|r| r.value);
    let (start, end) = phase.domain();
    let step = (x_hi - x_lo) / (n - 1) as f64;

    let mut min = f64::INFINITY;
    for i in 0..n {
        let x = if i == n - 1 { x_hi } else { x_lo + step * i as f64 };
        let h = 1e-5 * (1.0 + x.abs());
        let (a, b) = match (x - h >= start, x + h <= end) {
            (true, true) => (x - h, x + h),
            (false, true) => (x, x + h),
            (true, false) => (x - h, x),
            (false, false) => {
                return Err(Error::InvalidParameter(format!(
                    "domain too narrow for a difference stencil at {x}"
                )))
            }
        };
        let slope = (period(b)? - period(a)?) / (b - a);
        min = min.min(slope);
    }
    Ok(min)
}

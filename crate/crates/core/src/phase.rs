//! Phase functions `g(x)` and their inversion.
//!
//! A phase function is a continuous, strictly increasing map. The warped system
//! `sin(m·g(x))`, `cos(m·g(x))` repeats whenever `g` advances by `2π`, so everything
//! downstream only needs `g`, `g′` and `g⁻¹`.
//!
//! Strict monotonicity and continuity are the only admissibility conditions checked.
//! Further conditions on `g` may well be needed for a complete theory; none are
//! enforced here.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots;

/// Default inversion tolerance, in phase units.
pub const DEFAULT_INVERSION_TOL: f64 = 1e-12;

/// Grid size used to certify monotonicity at construction.
const MONOTONE_GRID: usize = 10_000;
/// Length of the window (from the domain start) over which monotonicity is certified.
const MONOTONE_WINDOW: f64 = 100.0;

/// A sine or cosine carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wave {
    Sine,
    Cosine,
}

impl Wave {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Wave::Sine => t.sin(),
            Wave::Cosine => t.cos(),
        }
    }
}

impl FromStr for Wave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" | "sin" => Ok(Wave::Sine),
            "cosine" | "cos" => Ok(Wave::Cosine),
            _ => Err(Error::InvalidParameter(format!(
                "unknown wave kind `{s}` (expected sine or cosine)"
            ))),
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user supplied phase: a closure for `g` and optionally one for `g′`.
#[derive(Clone)]
pub struct CustomPhase {
    name: String,
    g: RealFn,
    derivative: Option<RealFn>,
}

impl fmt::Debug for CustomPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPhase")
            .field("name", &self.name)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum PhaseKind {
    /// `g(x) = x` on the whole real line.
    Identity,
    /// `g(x) = x^α` on `x ≥ 0`.
    PowerLaw { alpha: f64 },
    /// `g(x) = x^α + A·sin(ωx)` on `x ≥ 0`.
    PowerPlusSine {
        alpha: f64,
        amplitude: f64,
        frequency: f64,
    },
    Custom(CustomPhase),
}

/// A strictly increasing phase map together with its domain.
///
/// Values are immutable once built; cloning is cheap.
#[derive(Debug, Clone)]
pub struct PhaseFunction {
    kind: PhaseKind,
    domain_start: f64,
    domain_end: f64,
}

impl PartialEq for PhaseFunction {
    fn eq(&self, other: &Self) -> bool {
        let same_kind = match (&self.kind, &other.kind) {
            (PhaseKind::Identity, PhaseKind::Identity) => true,
            (PhaseKind::PowerLaw { alpha: a }, PhaseKind::PowerLaw { alpha: b }) => a == b,
            (
                PhaseKind::PowerPlusSine {
                    alpha: a1,
                    amplitude: a2,
                    frequency: a3,
                },
                PhaseKind::PowerPlusSine {
                    alpha: b1,
                    amplitude: b2,
                    frequency: b3,
                },
            ) => a1 == b1 && a2 == b2 && a3 == b3,
            (PhaseKind::Custom(a), PhaseKind::Custom(b)) => Arc::ptr_eq(&a.g, &b.g),
            _ => false,
        };
        same_kind && self.domain_start == other.domain_start && self.domain_end == other.domain_end
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "exponent must be positive and finite, got {alpha}"
        )))
    }
}

impl PhaseFunction {
    pub fn identity() -> Self {
        PhaseFunction {
            kind: PhaseKind::Identity,
            domain_start: f64::NEG_INFINITY,
            domain_end: f64::INFINITY,
        }
    }

    /// `g(x) = x^α` on `[0, ∞)`.
    pub fn power_law(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(PhaseFunction {
            kind: PhaseKind::PowerLaw { alpha },
            domain_start: 0.0,
            domain_end: f64::INFINITY,
        })
    }

    /// `g(x) = x^α + A·sin(ωx)` on `[0, ∞)`.
    ///
    /// Rejected unless `g′ > 0` on a dense grid over `[0, 100]`.
    pub fn power_plus_sine(alpha: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !amplitude.is_finite() || !frequency.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "perturbation must be finite, got amplitude {amplitude}, frequency {frequency}"
            )));
        }
        let phase = PhaseFunction {
            kind: PhaseKind::PowerPlusSine {
                alpha,
                amplitude,
                frequency,
            },
            domain_start: 0.0,
            domain_end: f64::INFINITY,
        };
        phase.validate_monotone()?;
        Ok(phase)
    }

    /// A phase given by closures. `derivative`, when absent, is approximated by
    /// central differences with step `max(1e-6, 1e-8·|x|)`.
    pub fn custom<G>(
        name: impl Into<String>,
        g: G,
        derivative: Option<RealFn>,
        domain_start: f64,
        domain_end: f64,
    ) -> Result<Self>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !domain_start.is_finite() || domain_end.is_nan() || domain_end <= domain_start {
            return Err(Error::InvalidParameter(format!(
                "custom phase needs a finite start and end > start, got [{domain_start}, {domain_end}]"
            )));
        }
        let phase = PhaseFunction {
            kind: PhaseKind::Custom(CustomPhase {
                name: name.into(),
                g: Arc::new(g),
                derivative,
            }),
            domain_start,
            domain_end,
        };
        phase.validate_monotone()?;
        Ok(phase)
    }

    /// Piecewise-linear phase through tabulated points `(xs[i], gs[i])`.
    ///
    /// Both sequences must be strictly increasing.
    pub fn tabulated(xs: Vec<f64>, gs: Vec<f64>) -> Result<Self> {
        if xs.len() != gs.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated phase needs at least two (x, g) pairs of equal length".into(),
            ));
        }
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[1] > w[0]) || !(gs[i + 1] > gs[i]) || !w[0].is_finite() || !gs[i].is_finite()
            {
                return Err(Error::NonMonotone {
                    x: w[0],
                    derivative: (gs[i + 1] - gs[i]) / (w[1] - w[0]),
                });
            }
        }
        let (start, end) = (xs[0], xs[xs.len() - 1]);
        let xs: Arc<[f64]> = xs.into();
        let gs: Arc<[f64]> = gs.into();
        let slope = {
            let (xs, gs) = (xs.clone(), gs.clone());
            move |x: f64| {
                let i = segment_index(&xs, x);
                (gs[i + 1] - gs[i]) / (xs[i + 1] - xs[i])
            }
        };
        let g = move |x: f64| {
            let i = segment_index(&xs, x);
            let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
            gs[i] + t * (gs[i + 1] - gs[i])
        };
        PhaseFunction::custom("tabulated", g, Some(Arc::new(slope)), start, end)
    }

    pub fn kind(&self) -> &PhaseKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_start, self.domain_end)
    }

    /// Exponent of the power part: `α` for `x^α` and `x^α + A·sin(ωx)`, `1` for the
    /// identity, `None` for custom phases.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            PhaseKind::Identity => Some(1.0),
            PhaseKind::PowerLaw { alpha } | PhaseKind::PowerPlusSine { alpha, .. } => Some(alpha),
            PhaseKind::Custom(_) => None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain_start && x <= self.domain_end
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                start: self.domain_start,
                end: self.domain_end,
            })
        }
    }

    /// `g(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match &self.kind {
            PhaseKind::Identity => x,
            PhaseKind::PowerLaw { alpha } => power(x, *alpha),
            PhaseKind::PowerPlusSine {
                alpha,
                amplitude,
                frequency,
            } => power(x, *alpha) + amplitude * (frequency * x).sin(),
            PhaseKind::Custom(c) => (c.g)(x),
        }
    }

    /// `g′(x)`.
    ///
    /// Fails with [`Error::Singularity`] at `x = 0` for power parts with `α < 1`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        match &self.kind {
            PhaseKind::Identity => Ok(1.0),
            PhaseKind::PowerLaw { alpha } => {
                if x == 0.0 && *alpha < 1.0 {
                    return Err(Error::Singularity { x });
                }
                Ok(power_derivative(x, *alpha))
            }
            PhaseKind::PowerPlusSine {
                alpha,
                amplitude,
                frequency,
            } => {
                if x == 0.0 && *alpha < 1.0 {
                    return Err(Error::Singularity { x });
                }
                Ok(power_derivative(x, *alpha) + amplitude * frequency * (frequency * x).cos())
            }
            PhaseKind::Custom(c) => match &c.derivative {
                Some(d) => Ok(d(x)),
                None => Ok(self.finite_difference(x)),
            },
        }
    }

    fn finite_difference(&self, x: f64) -> f64 {
        let h = (1e-8 * x.abs()).max(1e-6);
        let lo = (x - h).max(self.domain_start);
        let hi = (x + h).min(self.domain_end);
        (self.eval_unchecked(hi) - self.eval_unchecked(lo)) / (hi - lo)
    }

    /// `g⁻¹(y)`, accurate to `|g(x) − y| ≤ tol`.
    ///
    /// Power laws and the identity invert analytically; other phases use a bracket
    /// grown geometrically from the domain start and refined by bisection/secant.
    pub fn inverse(&self, y: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if !y.is_finite() {
            return Err(Error::InvalidParameter(format!("cannot invert y = {y}")));
        }
        match &self.kind {
            PhaseKind::Identity => Ok(y),
            PhaseKind::PowerLaw { alpha } => {
                if y < 0.0 {
                    return Err(self.no_preimage(y));
                }
                Ok(if *alpha == 1.0 { y } else { y.powf(1.0 / alpha) })
            }
            _ => {
                let lowest = self.eval_unchecked(self.domain_start);
                if y < lowest {
                    return Err(self.no_preimage(y));
                }
                if self.domain_end.is_finite() && y > self.eval_unchecked(self.domain_end) {
                    return Err(self.no_preimage(y));
                }
                let f = |x: f64| self.eval_unchecked(x) - y;
                let (lo, hi) = roots::expand_bracket(&f, self.domain_start, self.domain_end)?;
                roots::solve_increasing(&f, lo, hi, tol)
            }
        }
    }

    fn no_preimage(&self, y: f64) -> Error {
        let lowest = self.eval_unchecked(self.domain_start.max(-f64::MAX));
        let highest = if self.domain_end.is_finite() {
            self.eval_unchecked(self.domain_end)
        } else {
            f64::INFINITY
        };
        Error::NoPreimage {
            y,
            lowest: if self.domain_start.is_finite() { lowest } else { f64::NEG_INFINITY },
            highest,
        }
    }

    /// `sin(m·g(x))` or `cos(m·g(x))`.
    pub fn wave(&self, wave: Wave, m: u32, x: f64) -> Result<f64> {
        Ok(wave.apply(f64::from(m) * self.eval(x)?))
    }

    /// Certifies `g′ > 0` on a uniform grid over the first 100 units of the domain.
    fn validate_monotone(&self) -> Result<()> {
        let start = self.domain_start;
        let end = self.domain_end.min(start + MONOTONE_WINDOW);
        let step = (end - start) / (MONOTONE_GRID - 1) as f64;
        for i in 0..MONOTONE_GRID {
            let x = if i == MONOTONE_GRID - 1 { end } else { start + step * i as f64 };
            let value = self.eval_unchecked(x);
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!("g({x}) = {value} is not finite")));
            }
            let d = match self.derivative(x) {
                Ok(d) => d,
                // an infinite slope at a power-law origin is still increasing
                Err(Error::Singularity { .. }) => continue,
                Err(e) => return Err(e),
            };
            // a flat tangent at the very start (x^α, α > 1) is still increasing
            let flat_start_ok = i == 0 && d == 0.0;
            if !(d > 0.0) && !flat_start_ok {
                return Err(Error::NonMonotone { x, derivative: d });
            }
        }
        Ok(())
    }
}

fn power(x: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        x
    } else {
        x.powf(alpha)
    }
}

fn power_derivative(x: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        1.0
    } else {
        alpha * x.powf(alpha - 1.0)
    }
}

fn segment_index(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.binary_search_by(|p| p.total_cmp(&x)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    }
}

/// Parses an exponent written as a decimal (`0.75`) or a ratio (`3/4`).
pub fn parse_exponent(s: &str) -> Result<f64> {
    let bad = || Error::InvalidParameter(format!("invalid exponent `{s}`"));
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    check_alpha(value)?;
    Ok(value)
}

impl FromStr for PhaseFunction {
    type Err = Error;

    /// Accepts `id`, `pow:ALPHA` and `powsin:ALPHA:AMP:FREQ`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let real = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("invalid number `{t}` in `{s}`")))
        };
        match parts.as_slice() {
            ["id"] => Ok(PhaseFunction::identity()),
            ["pow", alpha] => PhaseFunction::power_law(parse_exponent(alpha)?),
            ["powsin", alpha, amp, freq] => {
                PhaseFunction::power_plus_sine(parse_exponent(alpha)?, real(amp)?, real(freq)?)
            }
            _ => Err(Error::InvalidParameter(format!(
                "unknown phase `{s}` (expected id, pow:ALPHA or powsin:ALPHA:AMP:FREQ)"
            ))),
        }
    }
}

impl fmt::Display for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PhaseKind::Identity => write!(f, "id"),
            PhaseKind::PowerLaw { alpha } => write!(f, "pow:{alpha}"),
            PhaseKind::PowerPlusSine {
                alpha,
                amplitude,
                frequency,
            } => write!(f, "powsin:{alpha}:{amplitude}:{frequency}"),
            PhaseKind::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

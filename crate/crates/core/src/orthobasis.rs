//! The warped trigonometric system `{1, sin m·g, cos m·g}` and its weighted inner
//! products over one period segment `[x₀, x₀ + T(x₀)]`.
//!
//! Weight conventions:
//! - `g(x) = x^α` (and the identity, `α = 1`): `ρ(x) = x^{α−1}`. Substituting
//!   `u = x^α` turns every inner product into a classical one over a `2π` window,
//!   scaled by `1/α`; so `‖sin m·g‖² = ‖cos m·g‖² = π/α` and `‖1‖² = 2π/α`.
//! - any other phase: `ρ(x) = g′(x)`, giving norms `π` and `2π`. On power laws the
//!   two conventions differ only by the constant factor `α`.
//!
//! Inner products are available two ways: [`Method::ClosedForm`] evaluates the
//! product-to-sum antiderivatives in `u`, and [`Method::Quadrature`] integrates
//! `ρ·b₁·b₂` adaptively in `x`. The two are independent and used to check each other.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::period::forward_period_general;
use crate::phase::{PhaseFunction, PhaseKind, Wave};
use crate::quad::AdaptiveSimpson;
use crate::TWO_PI;

/// Target absolute error of every quadrature inner product.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// Fraction of the segment integrated in `u = x^α` when the segment starts at the
/// power-law origin.
const SINGULAR_PANEL_FRACTION: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Constant,
    Sine,
    Cosine,
}

/// One element of the warped trigonometric system.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    kind: BasisKind,
    m: u32,
    phase: PhaseFunction,
}

impl BasisFunction {
    pub fn constant(phase: &PhaseFunction) -> Self {
        BasisFunction {
            kind: BasisKind::Constant,
            m: 0,
            phase: phase.clone(),
        }
    }

    pub fn sine(phase: &PhaseFunction, m: u32) -> Result<Self> {
        Self::harmonic(phase, BasisKind::Sine, m)
    }

    pub fn cosine(phase: &PhaseFunction, m: u32) -> Result<Self> {
        Self::harmonic(phase, BasisKind::Cosine, m)
    }

    fn harmonic(phase: &PhaseFunction, kind: BasisKind, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "harmonic index must be at least 1".into(),
            ));
        }
        Ok(BasisFunction {
            kind,
            m,
            phase: phase.clone(),
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Harmonic index; `0` for the constant.
    pub fn harmonic_index(&self) -> u32 {
        self.m
    }

    pub fn phase(&self) -> &PhaseFunction {
        &self.phase
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.kind {
            BasisKind::Constant => {
                self.phase.eval(x)?;
                Ok(1.0)
            }
            BasisKind::Sine => self.phase.wave(Wave::Sine, self.m, x),
            BasisKind::Cosine => self.phase.wave(Wave::Cosine, self.m, x),
        }
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        let t = f64::from(self.m) * self.phase.eval_unchecked(x);
        match self.kind {
            BasisKind::Constant => 1.0,
            BasisKind::Sine => t.sin(),
            BasisKind::Cosine => t.cos(),
        }
    }

    /// `‖b‖²` over any period segment.
    pub fn squared_norm(&self) -> f64 {
        let full = match self.kind {
            BasisKind::Constant => TWO_PI,
            _ => std::f64::consts::PI,
        };
        full * norm_scale(&self.phase)
    }
}

impl fmt::Display for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BasisKind::Constant => write!(f, "1"),
            BasisKind::Sine => write!(f, "sin{}", self.m),
            BasisKind::Cosine => write!(f, "cos{}", self.m),
        }
    }
}

/// The basis `[1, sin 1·g, cos 1·g, …, sin M·g, cos M·g]`.
pub fn basis_system(phase: &PhaseFunction, harmonics: u32) -> Vec<BasisFunction> {
    let mut out = Vec::with_capacity(2 * harmonics as usize + 1);
    out.push(BasisFunction::constant(phase));
    for m in 1..=harmonics {
        out.push(BasisFunction {
            kind: BasisKind::Sine,
            m,
            phase: phase.clone(),
        });
        out.push(BasisFunction {
            kind: BasisKind::Cosine,
            m,
            phase: phase.clone(),
        });
    }
    out
}

/// One variable-period segment `[x₀, x₀ + T(x₀)]` of a phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    phase: PhaseFunction,
    x0: f64,
    length: f64,
}

impl Segment {
    pub fn one_period(phase: &PhaseFunction, x0: f64, tol: f64) -> Result<Self> {
        let t = forward_period_general(phase, x0, tol)?;
        Ok(Segment {
            phase: phase.clone(),
            x0,
            length: t.value,
        })
    }

    pub fn phase(&self) -> &PhaseFunction {
        &self.phase
    }

    pub fn start(&self) -> f64 {
        self.x0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn end(&self) -> f64 {
        self.x0 + self.length
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x0 && x <= self.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// `1/α` for power laws, `1` otherwise.
fn norm_scale(phase: &PhaseFunction) -> f64 {
    match phase.kind() {
        PhaseKind::PowerLaw { alpha } => 1.0 / alpha,
        _ => 1.0,
    }
}

/// Weight `ρ(x)` of the inner product.
pub fn weight(phase: &PhaseFunction, x: f64) -> Result<f64> {
    match phase.kind() {
        PhaseKind::Identity => {
            phase.eval(x)?;
            Ok(1.0)
        }
        PhaseKind::PowerLaw { alpha } => {
            phase.eval(x)?;
            if *alpha == 1.0 {
                Ok(1.0)
            } else if x == 0.0 && *alpha < 1.0 {
                Err(Error::Singularity { x })
            } else {
                Ok(x.powf(alpha - 1.0))
            }
        }
        _ => phase.derivative(x),
    }
}

/// `∫ ρ(x)·f(x) dx` over the segment, by adaptive quadrature in `x`.
///
/// When the segment starts at the origin of a power part `x^α` (`α ≠ 1`), the weight
/// is not smooth there; the first panel then integrates the `x^{α−1}` part of the
/// weight in `u = x^α`, where it becomes a constant, and the rest of the weight in `x`.
pub fn weighted_integral<F>(seg: &Segment, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let phase = &seg.phase;
    let q = AdaptiveSimpson::with_tol(QUADRATURE_TOL);
    let (a, b) = (seg.x0, seg.end());
    let rho = |x: f64| weight(phase, x).unwrap_or(f64::NAN);

    let alpha = match phase.kind() {
        PhaseKind::PowerLaw { alpha } | PhaseKind::PowerPlusSine { alpha, .. }
            if a == 0.0 && *alpha != 1.0 =>
        {
            *alpha
        }
        _ => return q.integrate(|x| rho(x) * f(x), a, b),
    };

    let split = a + SINGULAR_PANEL_FRACTION * seg.length;
    let inv = 1.0 / alpha;
    // ∫₀^s x^{α−1} F dx = (1/α) ∫₀^{s^α} F(u^{1/α}) du
    let power_head = inv * q.integrate(|u: f64| f(u.powf(inv)), 0.0, split.powf(alpha))?;
    let head = match phase.kind() {
        PhaseKind::PowerLaw { .. } => power_head,
        PhaseKind::PowerPlusSine {
            amplitude,
            frequency,
            ..
        } => {
            // g′ = α·x^{α−1} + Aω·cos(ωx); the power part is α·power_head
            let smooth = q.integrate(
                |x: f64| amplitude * frequency * (frequency * x).cos() * f(x),
                0.0,
                split,
            )?;
            alpha * power_head + smooth
        }
        _ => unreachable!(),
    };
    let tail = q.integrate(|x| rho(x) * f(x), split, b)?;
    Ok(head + tail)
}

fn check_compatible(b1: &BasisFunction, b2: &BasisFunction, seg: &Segment) -> Result<()> {
    if b1.phase != b2.phase || b1.phase != seg.phase {
        return Err(Error::IncompatibleBasis);
    }
    Ok(())
}

/// `⟨b₁, b₂⟩ = ∫ ρ·b₁·b₂ dx` over one period segment.
pub fn inner_product(
    b1: &BasisFunction,
    b2: &BasisFunction,
    seg: &Segment,
    method: Method,
) -> Result<f64> {
    check_compatible(b1, b2, seg)?;
    match method {
        Method::ClosedForm => closed_form(b1, b2, seg),
        Method::Quadrature => {
            weighted_integral(seg, |x| b1.eval_unchecked(x) * b2.eval_unchecked(x))
        }
    }
}

/// With `u = g(x)` the segment maps onto `[g(x₀), g(x₀) + 2π]` and the weight onto
/// `scale·du`; the products are then integrated through product-to-sum identities.
fn closed_form(b1: &BasisFunction, b2: &BasisFunction, seg: &Segment) -> Result<f64> {
    use BasisKind::*;

    let u0 = seg.phase.eval(seg.x0)?;
    let u1 = u0 + TWO_PI;
    let (m, n) = (i64::from(b1.m), i64::from(b2.m));
    let raw = match (b1.kind, b2.kind) {
        (Constant, Constant) => u1 - u0,
        (Constant, Sine) => sin_integral(n, u0, u1),
        (Sine, Constant) => sin_integral(m, u0, u1),
        (Constant, Cosine) => cos_integral(n, u0, u1),
        (Cosine, Constant) => cos_integral(m, u0, u1),
        // sin a·cos b = ½[sin(a+b) + sin(a−b)]
        (Sine, Cosine) => 0.5 * (sin_integral(m + n, u0, u1) + sin_integral(m - n, u0, u1)),
        (Cosine, Sine) => 0.5 * (sin_integral(m + n, u0, u1) + sin_integral(n - m, u0, u1)),
        // sin a·sin b = ½[cos(a−b) − cos(a+b)]
        (Sine, Sine) => 0.5 * (cos_integral(m - n, u0, u1) - cos_integral(m + n, u0, u1)),
        // cos a·cos b = ½[cos(a−b) + cos(a+b)]
        (Cosine, Cosine) => 0.5 * (cos_integral(m - n, u0, u1) + cos_integral(m + n, u0, u1)),
    };
    Ok(norm_scale(&seg.phase) * raw)
}

/// `∫ sin(k·u) du` over `[u0, u1]`; zero for `k = 0`.
fn sin_integral(k: i64, u0: f64, u1: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    -((k * u1).cos() - (k * u0).cos()) / k
}

/// `∫ cos(k·u) du` over `[u0, u1]`; the `k = 0` limit is the interval length.
fn cos_integral(k: i64, u0: f64, u1: f64) -> f64 {
    if k == 0 {
        return u1 - u0;
    }
    let k = k as f64;
    ((k * u1).sin() - (k * u0).sin()) / k
}

/// Dense symmetric Gram matrix over [`basis_system`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    labels: Vec<String>,
    size: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.size)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size).map(|i| self.get(i, i)).collect()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.size {
            for j in 0..self.size {
                if i != j {
                    max = max.max(self.get(i, j).abs());
                }
            }
        }
        max
    }

    /// Largest entrywise `|self − other|`.
    pub fn max_abs_diff(&self, other: &GramMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `(2M+1)×(2M+1)` Gram matrix of the warped system over a segment.
///
/// Rows are computed in parallel; every entry depends only on its pair of basis
/// functions.
pub fn gram_matrix(
    phase: &PhaseFunction,
    harmonics: u32,
    seg: &Segment,
    method: Method,
) -> Result<GramMatrix> {
    if harmonics == 0 {
        return Err(Error::InvalidParameter(
            "need at least one harmonic".into(),
        ));
    }
    if *phase != seg.phase {
        return Err(Error::IncompatibleBasis);
    }
    let basis = basis_system(phase, harmonics);
    let size = basis.len();
    let upper: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|i| {
            (i..size)
                .map(|j| inner_product(&basis[i], &basis[j], seg, method))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let mut data = vec![0.0; size * size];
    for (i, row) in upper.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let j = i + k;
            data[i * size + j] = *v;
            data[j * size + i] = *v;
        }
    }
    Ok(GramMatrix {
        labels: basis.iter().map(ToString::to_string).collect(),
        size,
        data,
    })
}

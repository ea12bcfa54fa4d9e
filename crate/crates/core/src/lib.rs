//! Periodic functions with a variable period.
//!
//! A function `f` has variable period `T(x) > 0` when `f(x) = f(x + T(x))` on its
//! domain. For the warped sinusoids `sin(m·g(x))`, `cos(m·g(x))` with a strictly
//! increasing phase `g`, the period is `T(x) = g⁻¹(g(x) + 2π) − x` and the backward
//! period is `T⁻(x) = x − g⁻¹(g(x) − 2π)`.
//!
//! The crate is organised as:
//! - [`phase`]: phase functions `g` (power law `x^α`, `x^α + A·sin(ωx)`, identity,
//!   custom closures, tabulated data) and their bracketed inversion.
//! - [`period`]: forward/backward periods, closed form for `x^α` and general, plus
//!   residual checks of the identities relating them.
//! - [`orthobasis`]: weighted inner products and Gram matrices of the warped
//!   trigonometric system over one period segment, by closed form and by quadrature.
//! - [`series`]: warped Fourier analysis/synthesis on a period segment.
//! - [`signalio`]: sampled signals, generators, cycle counting and CSV I/O.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a < b)` is deliberate: it also rejects NaN.

pub mod error;
pub mod numfmt;
pub mod orthobasis;
pub mod period;
pub mod phase;
pub mod quad;
mod roots;
pub mod series;
pub mod signalio;

pub use error::{Error, Result};
pub use orthobasis::{
    basis_system, gram_matrix, inner_product, weight, weighted_integral, BasisFunction,
    BasisKind, GramMatrix, Method, Segment,
};
pub use period::{
    backward_period_general, backward_period_power, check_derivative_bound,
    check_period_consistency, check_periodicity, forward_period_general, forward_period_power,
    ConsistencyResiduals, Direction, PeriodResult,
};
pub use phase::{PhaseFunction, PhaseKind, Wave, DEFAULT_INVERSION_TOL};
pub use series::{expand, expand_chain, segment_chain, Spectrum, DEFAULT_HARMONICS};
pub use signalio::{count_cycles, generate, read_csv, write_csv, CycleCount, SampledSignal};

/// One full turn of phase; the amount `g` advances over one variable period.
pub const TWO_PI: f64 = std::f64::consts::TAU;

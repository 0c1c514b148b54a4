//! Simulator for below-band-gap harmonic generation from laser-driven
//! semiconductor intraband currents, with the driving field and its harmonics
//! treated as quantized modes.
//!
//! The crate is organized around two backends and a quantum-state layer:
//!
//! - [`analytic`] evaluates the closed-form evolution of the multimode field
//!   (nonlinear pump phase, position-quadrature-dependent coherent
//!   displacements of the harmonic modes, classical-limit emission spectra).
//! - [`smbe`] is the semiclassical single-band current baseline; its windowed
//!   Fourier spectrum provides an independent route to the same odd-harmonic
//!   comb.
//! - [`quantum`] represents the post-interaction state on a position-quadrature
//!   grid and computes observables, reduced density matrices, entanglement
//!   entropies, and the harmonic-conditioned state.
//! - [`special`] holds the numerical kernel both backends share: Bessel
//!   functions of the first kind and resonance-safe closed forms of the
//!   oscillatory time integrals.
//! - [`params`] converts SI inputs into the dimensionless groups everything
//!   downstream consumes; [`io`] provides the JSON config schema and CSV/JSON/
//!   SVG writers used by the `qhhg` CLI.
//!
//! All core math is generic over the scalar type through [`Real`]; concrete
//! `f64` aliases are exported at the crate root.

// Validations are written as `!(x > 0)` rather than `x <= 0` so that NaN
// inputs fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod io;
pub mod params;
pub mod quantum;
pub mod smbe;
pub mod special;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use error::{Error, Result};

/// Scalar type the core math is generic over (`f32`, `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum<Self>
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}

pub type C64 = num_complex::Complex<f64>;

pub type LaserInput64 = params::LaserInput<f64>;
pub type MaterialInput64 = params::MaterialInput<f64>;
pub type SimulationConfig64 = params::SimulationConfig<f64>;
pub type SystemParams64 = params::SystemParams<f64>;
pub type ResonantIntegral64 = special::ResonantIntegral<f64>;
pub type SpectrumSeries64 = analytic::SpectrumSeries<f64>;
pub type QuadratureGrid64 = quantum::QuadratureGrid<f64>;
pub type QuadratureState64 = quantum::QuadratureState<f64>;
pub type ReducedDensityMatrix64 = quantum::ReducedDensityMatrix<f64>;
pub type PulseShape64 = smbe::PulseShape<f64>;
pub type CurrentTrace64 = smbe::CurrentTrace<f64>;

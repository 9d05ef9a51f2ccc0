//! Blow-up calculus for semilinear wave equations with time-dependent
//! propagation speed and scale-invariant damping,
//!
//! ```text
//! u_tt - t^{-2 alpha} Δu + (mu/t) u_t = |u_t|^p   or   |∇u|^p,   t > 1,
//! ```
//!
//! which is the form taken by the wave equation on a spatially flat FLRW
//! background with `alpha = 2/(n(1+w))`, `mu = 2/(1+w)`.
//!
//! The crate provides the critical exponents ([`exponents`]), the lifespan
//! upper bounds and region diagrams ([`regions`]), the Bessel-type test
//! functions ([`specfun`]), executable Kato iteration lemmas ([`kato`]), a
//! radial method-of-lines solver ([`solver`]) and an ε-sweep harness
//! ([`sweep`]).
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the documented
//! tolerances assume.

// `!(x > y)` rejects NaN along with the failing comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exponents;
pub mod kato;
pub mod params;
pub mod quad;
pub mod regions;
mod scalar;
pub mod solver;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{FlrwParams, ModelParams, Nonlinearity, Regime};
pub use scalar::{approx_eq, Real};

pub type ModelParams64 = params::ModelParams<f64>;
pub type FlrwParams64 = params::FlrwParams<f64>;
pub type ExponentSet64 = exponents::ExponentSet<f64>;
pub type LifespanBound64 = regions::LifespanBound<f64>;
pub type KatoProblem64 = kato::KatoProblem<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type SimOutcome64 = solver::SimOutcome<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;

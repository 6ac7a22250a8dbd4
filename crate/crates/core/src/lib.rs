//! Spectral laboratory for the perturbation MHD system on the torus.
//!
//! The perturbation `(u, b)` about a constant background field `b̃` obeys
//!
//! ```text
//! ∂t u = μΔu − u·∇u − ∇p + b̃·∇b + b·∇b
//! ∂t b = νΔb − u·∇b + b̃·∇u + b·∇u
//! ```
//!
//! with `(μ, ν)` either `(0, 1)` or `(1, 0)`. The crate provides the exact
//! linear propagator, Diophantine tooling for `b̃`, a pseudospectral solver for
//! the full system and the diagnostics used to measure decay.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod diophantine;
pub mod error;
pub mod propagator;
pub mod solver;
pub mod spectral;

pub use diophantine::{
    classify_mode, estimate_constant, golden_vector, verify_poincare, BackgroundField, Certificate,
    Region,
};
pub use error::{Error, Result};
pub use propagator::{
    kernel_bound_check, kernel_values, mode_exponents, propagate_linear, solve_duhamel, Case,
    ForcingSamples, ModeExponents, Regime,
};
pub use solver::{SimState, Solver, SolverConfig};
pub use spectral::{SpectralField, SpectralTransform, TorusGrid};

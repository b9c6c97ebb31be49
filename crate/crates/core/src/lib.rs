//! Higher-order entanglement witnesses for Raman scattering.
//!
//! The crate evaluates two-, three- and four-mode entanglement witnesses of
//! the four-mode Raman Hamiltonian
//! `H = Σ ω_x x†x + g(a b†c† + h.c.) + χ(a c d† + h.c.)`
//! from a second-order perturbative operator solution, and checks them
//! against exact evolution in a truncated Fock space.
//!
//! * [`model`]: modes, amplitudes, couplings, presets and witness specs.
//! * [`coefficients`]: the time-dependent coefficients of the operator
//!   solution.
//! * [`witnesses`]: closed-form witnesses and moment-level definitions.
//! * [`oracle`]: sparse truncated-Fock evolution of the exact Hamiltonian.
//! * [`sweeps`]: time and phase sweeps, sign patterns and figure data.
//! * [`config`]: configuration files and validation plans.
//!
//! Closed-form layers are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix double precision.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod config;
pub mod error;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod scalar;
pub mod sweeps;
pub mod witnesses;

pub use error::{Error, Result};
pub use model::{Criterion, Mode, Pair, Preset, ScenarioOverrides, WitnessSeries, WitnessSpec};
pub use scalar::Real;

/// Double-precision coherent amplitudes.
pub type CoherentAmplitudes = model::CoherentAmplitudes<f64>;
/// Double-precision couplings and detunings.
pub type RamanParams = model::RamanParams<f64>;
/// Double-precision coefficient set.
pub type CoefficientSet = coefficients::CoefficientSet<f64>;
/// Double-precision witness value.
pub type WitnessValue = witnesses::WitnessValue<f64>;
/// Double-precision moment table.
pub type MomentTable = moments::MomentTable<f64>;
/// Single-precision coefficient set.
pub type CoefficientSet32 = coefficients::CoefficientSet<f32>;
/// Single-precision witness value.
pub type WitnessValue32 = witnesses::WitnessValue<f32>;

//! Vacuum Rabi oscillations of a two-level atom coupled to a lossy cavity mode.
//!
//! Two field quantizations are modelled side by side:
//!
//! * the standard irreducible harmonic-oscillator representation, where the
//!   commutator `[a, a†]` is a constant `𝒵·1`, and
//! * the reducible representation built from `N` indefinite-frequency
//!   oscillator wave packets, where `[a, a†]` has eigenvalues `s/N` and the
//!   dynamics splits into independent blocks labelled by `s`.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`]: physical parameters, renormalization and vacuum energy.
//! * [`dressed`]: the per-block Hamiltonian `Ω(s)` and its dressed states.
//! * [`lindblad`]: the zero-temperature master equation on a block, its
//!   damping basis, closed-form solution and an adaptive ODE oracle.
//! * [`aggregate`]: binomial aggregation over blocks, thermodynamic limit,
//!   Gaussian-mode correction, difference curves and energy decay.
//! * [`revival`]: collapse/revival forecasts and the `ς` threshold search.
//! * [`repcheck`]: explicit small-`N` tensor-product checks of the
//!   representation theory and the weak law of large numbers.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod binomial;
pub mod dressed;
pub mod error;
pub mod lindblad;
pub mod linalg;
pub mod ode;
pub mod params;
pub mod repcheck;
pub mod revival;
pub mod sum;

pub use error::{Error, Result};
pub use params::PhysicalParams;

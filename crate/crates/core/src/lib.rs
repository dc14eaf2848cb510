//! Weak asymptotic solutions of the Hopf equation `u_t + (u²)_x = 0` and of
//! its two-dimensional analog.
//!
//! The crate builds regularized shock and weak-discontinuity families from
//! mollifiers, evolves their phases and amplitudes through the interaction of
//! fronts, and checks the results against entropy-solution oracles and
//! empirical convergence orders of weak residuals.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernels;
pub mod ode;
pub mod quadrature;
pub mod dynamics1d;
pub mod weak_calculus;
pub mod reference;
pub mod fronts2d;

pub use error::{Error, Result};

use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e} after {intervals} subintervals")]
    Quadrature {
        achieved: f64,
        requested: f64,
        intervals: usize,
    },

    #[error("mollifier `{name}` is {actual}, expected {expected}")]
    WrongKind {
        name: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("unknown mollifier `{0}`")]
    UnknownMollifier(String),

    #[error("non-monotone mollifier pair: derivative of `{0}` takes negative values")]
    NonMonotone(String),

    #[error("no sign change of the root function on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ODE integration failed at t = {t}: {reason}")]
    Ode { t: f64, reason: String },

    #[error("solution did not converge to the target {target}: last value {last}")]
    NoConvergence { last: f64, target: f64 },

    #[error("front is not transversal to the drift field at ({x}, {y})")]
    Transversality { x: f64, y: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("initial data outside the supported scenario families: {0}")]
    UnsupportedData(String),

    #[error("CFL number {0} outside (0, 0.9]")]
    Cfl(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

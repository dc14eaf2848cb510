//! Regularized front dynamics for `u_t + (u²)_x = 0`: two interacting
//! shocks, merging weak discontinuities, a weak discontinuity running into a
//! shock, and the time-reversed decay of an unstable shock.

mod confluence;
mod decay;
mod residual;
mod rho;
pub(crate) mod shock_shock;
mod triangle;

use serde::Serialize;

pub use confluence::{Confluence, ConfluenceConfig, ConfluenceRun, ConfluenceState};
pub use decay::{Decay, DecayState};
pub use residual::{residual_study, sample_profile, weak_continuity_ratio, weak_residual, WeakAnsatz};
pub use rho::{solve_rho, solve_rho_for_pair, RhoSolution, DEFAULT_TAU_MAX, DEFAULT_TAU_MIN};
pub use shock_shock::{
    phase_correction, phase_offset, shock_shock_velocities, ShockShock, ShockShockConfig,
    ShockShockState,
};
pub use triangle::{Triangle, TriangleConfig, TriangleState};

/// One sample of a two-front evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
    /// `(φ₂ - φ₁)/ε`.
    pub rho: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub scenario: String,
    pub epsilon: f64,
    pub mollifier: String,
    /// Merge (or split) time when it falls inside the sampled range.
    pub t_star: Option<f64>,
    pub records: Vec<TrajectoryRecord>,
}

/// `n + 1` equally spaced times on `[t0, t1]`.
pub fn time_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| if i == n { t1 } else { t0 + (t1 - t0) * i as f64 / n as f64 })
        .collect()
}

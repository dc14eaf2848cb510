//! Shock fronts of `u_t + A₁(u²)_{x₁} + A₂(u²)_{x₂} = 0` given as level sets,
//! reduced to 1D interaction problems along the straight trajectories of
//! `⟨A, ∇⟩`.
//!
//! On a ray `x(ξ) = x₀(s) + ξ A/|A|` the phase equations read
//! `1 + |A| ψ_k'(ξ) v_k(Δψ/ε) = 0`, so `-ψ_k` is the arrival time of front
//! `k` at `ξ`.

mod geometry;
mod merge;
mod rays;
mod rho2d;
mod system;

pub use geometry::{FrontCurve, Point, Window};
pub use merge::{
    post_merge_front, simulate, snapshots, to_delimited, FrontPoint, Fronts2dResult, MergedFront,
    MergedRay,
};
pub use rays::{ray_trace, ExcludedRay, RayReduction, RayStatus, RayTrace, DEFAULT_RAYS};
pub use rho2d::{
    composite_at, composite_phase_2d, solve_rho_2d, InteractionProfile, RayAmplitudes,
};
pub use system::{noninteracting_phases, FrontSystem2D, PhaseFields, RhoForm};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::residual::WeakAnsatz;
use super::rho::{solve_rho_for_pair, RhoSolution};
use super::{time_grid, Trajectory, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::kernels::{KernelPair, MollifierKind, Orientation};
use crate::ode::{bisect, integrate, OdeOptions, OdeTrajectory};

/// Background level `u0`, step heights `u1`, `u2` and initial positions
/// `a2 < a1` of two stable shocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShockShockConfig {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ShockShockConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.u0, self.u1, self.u2, self.a1, self.a2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("shock-shock parameters must be finite".into()));
        }
        if self.u1 < 0.0 || self.u2 < 0.0 {
            return Err(Error::InvalidInput(
                "shock amplitudes u1, u2 must be nonnegative".into(),
            ));
        }
        if self.a2 >= self.a1 {
            return Err(Error::InvalidInput(format!(
                "shock-shock needs a2 < a1, got a1 = {}, a2 = {}",
                self.a1, self.a2
            )));
        }
        Ok(())
    }

    fn is_degenerate(&self) -> bool {
        self.u1 == 0.0 || self.u2 == 0.0
    }

    pub fn amplitude_sum(&self) -> f64 {
        self.u1 + self.u2
    }

    pub fn phi10(&self, t: f64) -> f64 {
        (2.0 * self.u0 + self.u1) * t + self.a1
    }

    pub fn phi20(&self, t: f64) -> f64 {
        (2.0 * self.u0 + 2.0 * self.u1 + self.u2) * t + self.a2
    }

    pub fn psi0(&self, t: f64) -> f64 {
        self.phi20(t) - self.phi10(t)
    }

    /// `(a1 - a2)/(u1 + u2)`; infinite when both amplitudes vanish.
    pub fn t_star(&self) -> f64 {
        (self.a1 - self.a2) / self.amplitude_sum()
    }

    pub fn merged_speed(&self) -> f64 {
        2.0 * self.u0 + self.u1 + self.u2
    }
}

/// `τ φ_{k1}(τ)`: the ε-scaled phase shift of front `k` in the composite
/// solution. Front 1 is pushed forward by `u2(τ - ρ)/(u1 + u2)`, front 2
/// held back by `u1(τ - ρ)/(u1 + u2)`.
pub fn phase_offset(u1: f64, u2: f64, rho: &RhoSolution, k: usize, tau: f64) -> f64 {
    let s = u1 + u2;
    let lag = rho.lag(tau) + rho.offset();
    match k {
        1 => u2 * lag / s,
        _ => -u1 * lag / s,
    }
}

/// `φ_{k1}(τ)`, singular at `τ = 0` where only the offset is defined.
pub fn phase_correction(u1: f64, u2: f64, rho: &RhoSolution, k: usize, tau: f64) -> Result<f64> {
    if k != 1 && k != 2 {
        return Err(Error::InvalidInput(format!("front index {k} must be 1 or 2")));
    }
    if tau == 0.0 {
        return Err(Error::InvalidInput(
            "phase correction is singular at τ = 0; use phase_offset".into(),
        ));
    }
    Ok(phase_offset(u1, u2, rho, k, tau) / tau)
}

#[derive(Clone, Debug)]
pub struct ShockShockState {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub epsilon: f64,
    pub t: f64,
    pub kernel: KernelPair,
    pub v1: f64,
    pub v2: f64,
}

/// Front velocities `2u0 + u_k + 2u_{3-k} B_k(Δφ/ε)`. With a vanishing
/// amplitude the fronts do not interact and keep their initial speeds.
pub fn shock_shock_velocities(s: &ShockShockState) -> Result<(f64, f64)> {
    velocities(s.u0, s.u1, s.u2, &s.kernel, (s.phi2 - s.phi1) / s.epsilon)
}

fn velocities(u0: f64, u1: f64, u2: f64, kernel: &KernelPair, rho: f64) -> Result<(f64, f64)> {
    if u1 == 0.0 || u2 == 0.0 {
        return Ok((2.0 * u0 + u1, 2.0 * u0 + 2.0 * u1 + u2));
    }
    let (b1, b2) = kernel.transfer_functions(rho)?;
    Ok((2.0 * u0 + u1 + 2.0 * u2 * b1, 2.0 * u0 + u2 + 2.0 * u1 * b2))
}

impl ShockShockState {
    fn h(&self, k: usize, x: f64) -> (f64, f64) {
        let (m, phi) = if k == 1 {
            (&self.kernel.left, self.phi1)
        } else {
            (&self.kernel.right, self.phi2)
        };
        let z = (phi - x) / self.epsilon;
        (m.value(z), m.derivative(z) / self.epsilon)
    }
}

impl WeakAnsatz for ShockShockState {
    fn value(&self, x: f64) -> f64 {
        self.u0 + self.u1 * self.h(1, x).0 + self.u2 * self.h(2, x).0
    }

    fn dt(&self, x: f64) -> f64 {
        self.u1 * self.h(1, x).1 * self.v1 + self.u2 * self.h(2, x).1 * self.v2
    }

    fn fronts(&self) -> Vec<f64> {
        vec![self.phi1, self.phi2]
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Two stable shocks catching up with each other.
#[derive(Clone, Debug)]
pub struct ShockShock {
    pub config: ShockShockConfig,
    pub kernel: KernelPair,
    rho: Option<Arc<RhoSolution>>,
}

pub(crate) fn check_kernel(kernel: &KernelPair) -> Result<()> {
    for m in [&kernel.left, &kernel.right] {
        if m.kind() != MollifierKind::HeavisideLike {
            return Err(Error::WrongKind {
                name: m.name().to_string(),
                expected: MollifierKind::HeavisideLike.as_str(),
                actual: m.kind().as_str(),
            });
        }
    }
    if kernel.orientation != Orientation::Section2a {
        return Err(Error::InvalidInput(
            "front interaction uses the section2a kernel orientation".into(),
        ));
    }
    Ok(())
}

impl ShockShock {
    pub fn new(config: ShockShockConfig, kernel: KernelPair, tau_max: f64) -> Result<Self> {
        config.validate()?;
        check_kernel(&kernel)?;
        let rho = if config.is_degenerate() {
            None
        } else {
            Some(Arc::new(solve_rho_for_pair(&kernel, tau_max)?))
        };
        Ok(Self { config, kernel, rho })
    }

    /// Reuse a separation profile already solved for this kernel pair.
    pub fn with_rho(config: ShockShockConfig, kernel: KernelPair, rho: Arc<RhoSolution>) -> Result<Self> {
        config.validate()?;
        check_kernel(&kernel)?;
        let rho = (!config.is_degenerate()).then_some(rho);
        Ok(Self { config, kernel, rho })
    }

    pub fn rho_solution(&self) -> Option<&Arc<RhoSolution>> {
        self.rho.as_ref()
    }

    /// Composite phases `φ_{k0}(t) + ε τφ_{k1}(τ)`, `τ = ψ₀(t)/ε`.
    pub fn state(&self, t: f64, epsilon: f64) -> Result<ShockShockState> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon = {epsilon} must be positive")));
        }
        let c = &self.config;
        let (mut phi1, mut phi2) = (c.phi10(t), c.phi20(t));
        if let Some(rho) = &self.rho {
            let tau = c.psi0(t) / epsilon;
            phi1 += epsilon * phase_offset(c.u1, c.u2, rho, 1, tau);
            phi2 += epsilon * phase_offset(c.u1, c.u2, rho, 2, tau);
        }
        let (v1, v2) = velocities(c.u0, c.u1, c.u2, &self.kernel, (phi2 - phi1) / epsilon)?;
        Ok(ShockShockState {
            u0: c.u0,
            u1: c.u1,
            u2: c.u2,
            phi1,
            phi2,
            epsilon,
            t,
            kernel: self.kernel.clone(),
            v1,
            v2,
        })
    }

    /// Zero of `ψ₀` on `[0, t_end]` by bisection to `1e-12`. A front of zero
    /// amplitude carries no jump, so nothing merges.
    pub fn detect_t_star(&self, t_end: f64) -> Result<Option<f64>> {
        let c = self.config;
        if c.u1 == 0.0 || c.u2 == 0.0 || c.psi0(0.0) * c.psi0(t_end) > 0.0 {
            return Ok(None);
        }
        bisect(|t| c.psi0(t), 0.0, t_end, 1e-12).map(Some)
    }

    pub fn evolve(&self, epsilon: f64, t_end: f64, samples: usize) -> Result<Trajectory> {
        if !(t_end > 0.0) {
            return Err(Error::InvalidInput(format!("t_end = {t_end} must be positive")));
        }
        let records = time_grid(0.0, t_end, samples)
            .into_iter()
            .map(|t| self.state(t, epsilon).map(|s| record(&s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            scenario: "shock_shock".into(),
            epsilon,
            mollifier: self.kernel.left.name().to_string(),
            t_star: self.detect_t_star(t_end)?,
            records,
        })
    }

    /// Direct integration of the velocity system in `t` from the composite
    /// phases at `t = 0`, as an independent check of the composite formula.
    pub fn evolve_direct(&self, epsilon: f64, t_end: f64) -> Result<OdeTrajectory<2>> {
        let s0 = self.state(0.0, epsilon)?;
        let c = self.config;
        integrate(
            |_, y: &[f64; 2]| {
                let (v1, v2) = velocities(c.u0, c.u1, c.u2, &self.kernel, (y[1] - y[0]) / epsilon)?;
                Ok([v1, v2])
            },
            0.0,
            [s0.phi1, s0.phi2],
            t_end,
            OdeOptions::default(),
        )
    }
}

fn record(s: &ShockShockState) -> TrajectoryRecord {
    TrajectoryRecord {
        t: s.t,
        phi1: s.phi1,
        phi2: s.phi2,
        u1: s.u1,
        u2: s.u2,
        v1: s.v1,
        v2: s.v2,
        rho: (s.phi2 - s.phi1) / s.epsilon,
    }
}

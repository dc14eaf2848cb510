use serde::Serialize;

use super::rays::RayReduction;
use super::system::{FrontSystem2D, RhoForm};
use crate::dynamics1d::{solve_rho, RhoSolution, DEFAULT_TAU_MIN};
use crate::error::Result;
use crate::kernels::KernelPair;
use crate::ode::{integrate, OdeOptions, OdeTrajectory};

/// Constants of the per-ray interaction problem.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RayAmplitudes {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub form: RhoForm,
}

impl RayAmplitudes {
    pub fn of(sys: &FrontSystem2D) -> Self {
        Self {
            u0: sys.u0,
            u1: sys.u1,
            u2: sys.u2,
            form: sys.rho_form,
        }
    }

    fn c1(&self) -> f64 {
        self.u1 + 2.0 * self.u0
    }

    fn c2(&self) -> f64 {
        self.u2 + 2.0 * self.u1 + 2.0 * self.u0
    }

    fn kappa(&self) -> f64 {
        1.0 / self.c1() - 1.0 / self.c2()
    }

    /// Front factors `(v₁, v₂)` at `B₂`, with `B₁ = 1 - B₂`.
    pub fn factors(&self, b2: f64) -> (f64, f64) {
        let b1 = 1.0 - b2;
        (
            self.c1() + 2.0 * self.u2 * b1,
            2.0 * self.u0 + self.u2 + 2.0 * self.u1 * b2,
        )
    }

    /// `dρ/dτ` as a function of `B₂(ρ)`.
    pub fn rhs(&self, b2: f64) -> f64 {
        match self.form {
            RhoForm::Derived => {
                let (v1, v2) = self.factors(b2);
                (1.0 / v1 - 1.0 / v2) / self.kappa()
            }
            RhoForm::Printed { u1_coef, u2_coef } => {
                let (u1, u2) = (self.u1, self.u2);
                let big = u1 + u2 + 2.0 * self.u0;
                let h = b2 - 0.5;
                let bracket = 2.0 * u2 * u2_coef / (big - 2.0 * u2 * h)
                    + 2.0 * u1 * u1_coef / (u1_coef + 2.0 * u1 * h);
                1.0 - (1.0 - b2) / (u1 + u2) * bracket
            }
        }
    }
}

/// The separation `ρ` on one ray; the same for every ray of a system.
pub fn solve_rho_2d(amps: &RayAmplitudes, kernel: &KernelPair, tau_max: f64) -> Result<RhoSolution> {
    solve_rho(|r| Ok(amps.rhs(kernel.b2(r)?)), DEFAULT_TAU_MIN, tau_max, 1e-6)
}

/// `ρ(τ)` together with `I₁(τ) = ∫_{-∞}^τ (1/c₁ - 1/v₁(ρ)) dτ'`, from which
/// both corrected phases follow.
#[derive(Clone, Debug)]
pub struct InteractionProfile {
    pub amps: RayAmplitudes,
    traj: OdeTrajectory<2>,
}

impl InteractionProfile {
    pub fn new(amps: RayAmplitudes, kernel: &KernelPair, tau_max: f64) -> Result<Self> {
        let c1 = amps.c1();
        let opts = OdeOptions {
            h_max: 0.25,
            ..OdeOptions::default()
        };
        let traj = integrate(
            |_, y: &[f64; 2]| {
                let b2 = kernel.b2(y[0])?;
                let (v1, _) = amps.factors(b2);
                Ok([amps.rhs(b2), 1.0 / c1 - 1.0 / v1])
            },
            DEFAULT_TAU_MIN,
            [DEFAULT_TAU_MIN, 0.0],
            tau_max,
            opts,
        )?;
        Ok(Self { amps, traj })
    }

    fn tau_range(&self) -> (f64, f64) {
        (self.traj.t[0], *self.traj.t.last().unwrap())
    }

    pub fn rho(&self, tau: f64) -> f64 {
        let (lo, hi) = self.tau_range();
        if tau <= lo {
            tau
        } else {
            self.traj.interpolate(tau.min(hi))[0]
        }
    }

    /// `(I₁, I₂)` with `I₂ - I₁ = κ(ρ - τ)`.
    pub fn integrals(&self, tau: f64) -> (f64, f64) {
        let (lo, hi) = self.tau_range();
        if tau <= lo {
            return (0.0, 0.0);
        }
        let [rho, mut i1] = self.traj.interpolate(tau.min(hi));
        if tau > hi {
            i1 += self.traj.dy.last().unwrap()[1] * (tau - hi);
        }
        (i1, i1 + self.amps.kappa() * (rho - tau))
    }
}

/// `ψ_k = ψ_k0 + φ₀ ψ_k1(φ₀/ε)` along the ray at `ξ`.
pub fn composite_at(ray: &RayReduction, profile: &InteractionProfile, epsilon: f64, xi: f64) -> (f64, f64) {
    let kappa = profile.amps.kappa();
    let tau = ray.phi0_at(xi) / epsilon;
    let (i1, i2) = profile.integrals(tau);
    (
        ray.psi10_at(xi) + epsilon * i1 / kappa,
        ray.psi20_at(xi) + epsilon * i2 / kappa,
    )
}

/// Composite phases on the ray's sample grid.
pub fn composite_phase_2d(
    ray: &RayReduction,
    profile: &InteractionProfile,
    epsilon: f64,
) -> Vec<(f64, f64)> {
    ray.xi_grid
        .iter()
        .map(|&xi| composite_at(ray, profile, epsilon, xi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fronts2d::rays::ray_trace;
    use crate::fronts2d::system::tests::planar_system;
    use crate::kernels::Mollifier;

    fn amps(form: RhoForm) -> RayAmplitudes {
        RayAmplitudes {
            u0: 0.5,
            u1: 1.0,
            u2: 0.75,
            form,
        }
    }

    #[test]
    fn root_has_half_transfer() {
        for m in [Mollifier::erf_step(), Mollifier::tanh_step()] {
            let k = KernelPair::symmetric(m);
            for form in [RhoForm::Derived, RhoForm::printed_default(0.5, 1.0, 0.75)] {
                let s = solve_rho_2d(&amps(form), &k, 200.0).unwrap();
                assert!((k.b2(s.rho0).unwrap() - 0.5).abs() < 1e-8);
                assert!(s.rho0.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn far_left_slope_is_one() {
        for form in [RhoForm::Derived, RhoForm::printed_default(0.5, 1.0, 0.75)] {
            assert_eq!(amps(form).rhs(1.0), 1.0);
            assert!(amps(form).rhs(0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn derived_form_differs_from_printed_inside() {
        let a = amps(RhoForm::Derived);
        let b = amps(RhoForm::printed_default(0.5, 1.0, 0.75));
        assert!((a.rhs(0.8) - b.rhs(0.8)).abs() > 1e-4);
    }

    #[test]
    fn composite_limits() {
        let sys = planar_system(0.0, 1.0, 1.0);
        let ray = ray_trace(&sys, 1).unwrap().rays.remove(0);
        let p = InteractionProfile::new(RayAmplitudes::of(&sys), &sys.kernel, 200.0).unwrap();
        let eps = 0.01;
        // far before the merge point
        let (a, b) = composite_at(&ray, &p, eps, 0.0);
        assert!((a - ray.psi10_at(0.0)).abs() < 1e-10);
        assert!((b - ray.psi20_at(0.0)).abs() < 1e-10);
        // well past it the fronts coincide to O(ε)
        let xi = ray.merge_xi() + 3.0;
        let (a, b) = composite_at(&ray, &p, eps, xi);
        assert!((a - b).abs() < 5.0 * eps, "{a} {b}");
    }

    #[test]
    fn corrected_phases_solve_the_ray_equations() {
        let sys = planar_system(0.25, 1.0, 0.5);
        let ray = ray_trace(&sys, 1).unwrap().rays.remove(0);
        let am = RayAmplitudes::of(&sys);
        let p = InteractionProfile::new(am, &sys.kernel, 200.0).unwrap();
        let eps = 0.05;
        let h = 1e-4;
        let xm = ray.merge_xi();
        for xi in [xm - 0.3, xm, xm + 0.2] {
            let (a0, b0) = composite_at(&ray, &p, eps, xi - h);
            let (a1, b1) = composite_at(&ray, &p, eps, xi + h);
            let rho = (b1 + b0 - a1 - a0) / (2.0 * eps);
            let (v1, v2) = am.factors(sys.kernel.b2(rho).unwrap());
            let s = ray.speed();
            let r1 = 1.0 + s * (a1 - a0) / (2.0 * h) * v1;
            let r2 = 1.0 + s * (b1 - b0) / (2.0 * h) * v2;
            assert!(r1.abs() < 1e-6 && r2.abs() < 1e-6, "{r1} {r2} at {xi}");
        }
    }
}

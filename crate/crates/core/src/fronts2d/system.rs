use serde::{Deserialize, Serialize};

use super::geometry::{along, dot, norm, FrontCurve, Point, Window};
use crate::dynamics1d::shock_shock::check_kernel;
use crate::error::{Error, Result};
use crate::kernels::KernelPair;

/// Right side used for the per-ray separation equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RhoForm {
    /// Obtained by dividing the two per-ray arrival-time equations.
    #[default]
    Derived,
    /// The bracketed closed form with free coefficients `U₁`, `U₂`.
    Printed { u1_coef: f64, u2_coef: f64 },
}

impl RhoForm {
    /// Printed form with `U₁ = U₂ = U₀`.
    pub fn printed_default(u0: f64, u1: f64, u2: f64) -> Self {
        let big = u1 + u2 + 2.0 * u0;
        RhoForm::Printed {
            u1_coef: big,
            u2_coef: big,
        }
    }
}

/// Two shock fronts `Γ⁰₁`, `Γ⁰₂` of `u_t + A₁(u²)_{x₁} + A₂(u²)_{x₂} = 0`.
///
/// Rays start on `Γ⁰₂` at tangential coordinate `s` and run along `+A`.
#[derive(Clone, Debug)]
pub struct FrontSystem2D {
    pub a: Point,
    pub gamma1: FrontCurve,
    pub gamma2: FrontCurve,
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub epsilon: f64,
    pub kernel: KernelPair,
    pub window: Window,
    pub s_range: (f64, f64),
    pub rho_form: RhoForm,
}

const TRANSVERSAL_MIN: f64 = 1e-8;
const TRANSVERSAL_SAMPLES: usize = 64;

impl FrontSystem2D {
    pub fn validate(&self) -> Result<()> {
        let [a1, a2] = self.a;
        if !(a1 > 0.0 && a2 > 0.0 && a1.is_finite() && a2.is_finite()) || a1 == a2 {
            return Err(Error::InvalidInput(format!(
                "drift A = ({a1}, {a2}) must have distinct positive components"
            )));
        }
        let amps = [self.u0, self.u1, self.u2];
        if amps.iter().any(|u| !(*u >= 0.0 && u.is_finite())) || self.u1 + self.u2 <= 0.0 {
            return Err(Error::InvalidInput(
                "amplitudes must be non-negative with u1 + u2 > 0".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !(self.s_range.0 <= self.s_range.1) {
            return Err(Error::InvalidInput("s_range must be ordered".into()));
        }
        check_kernel(&self.kernel)?;
        self.check_transversality()
    }

    pub fn speed(&self) -> f64 {
        norm(self.a)
    }

    pub fn direction(&self) -> Point {
        let n = self.speed();
        [self.a[0] / n, self.a[1] / n]
    }

    /// Amplitude factor of `Γ₁` before the interaction.
    pub fn c1(&self) -> f64 {
        self.u1 + 2.0 * self.u0
    }

    /// Amplitude factor of `Γ₂` before the interaction.
    pub fn c2(&self) -> f64 {
        self.u2 + 2.0 * self.u1 + 2.0 * self.u0
    }

    /// `U₀ = u₁ + u₂ + 2u₀`, the factor of the merged front.
    pub fn merged_factor(&self) -> f64 {
        self.u1 + self.u2 + 2.0 * self.u0
    }

    /// `1/c₁ - 1/c₂`, the rate of `φ₀` per unit of `ξ/|A|`.
    pub fn kappa(&self) -> f64 {
        1.0 / self.c1() - 1.0 / self.c2()
    }

    pub(crate) fn s_samples(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.s_range;
        (0..n)
            .map(|j| lo + (j as f64 + 0.5) / n as f64 * (hi - lo))
            .collect()
    }

    fn check_transversality(&self) -> Result<()> {
        let e = self.direction();
        let test = |c: &FrontCurve, x: Point| -> Result<()> {
            let g = c.gradient(x);
            if dot(e, g).abs() <= TRANSVERSAL_MIN * norm(g) {
                return Err(Error::Transversality { x: x[0], y: x[1] });
            }
            Ok(())
        };
        for s in self.s_samples(TRANSVERSAL_SAMPLES) {
            let x = self.gamma2.at(s);
            test(&self.gamma2, x)?;
            if let Some(h) = self.gamma1.nearest_hit(x, e) {
                test(&self.gamma1, along(x, e, h))?;
            }
        }
        Ok(())
    }
}

/// The pre-interaction phases `ψ₁₀`, `ψ₂₀` as fields on the plane.
#[derive(Clone, Debug)]
pub struct PhaseFields {
    gamma1: FrontCurve,
    gamma2: FrontCurve,
    e: Point,
    speed: f64,
    c1: f64,
    c2: f64,
}

fn phase(c: &FrontCurve, x: Point, e: Point, speed: f64, factor: f64) -> Result<f64> {
    c.nearest_hit(x, e)
        .map(|eta| eta / (speed * factor))
        .ok_or(Error::Transversality { x: x[0], y: x[1] })
}

impl PhaseFields {
    /// Solves `1 + ⟨A, ∇ψ₁₀⟩ c₁ = 0` with `ψ₁₀ = 0` on `Γ⁰₁`.
    pub fn psi10(&self, x: Point) -> Result<f64> {
        phase(&self.gamma1, x, self.e, self.speed, self.c1)
    }

    /// Solves `1 + ⟨A, ∇ψ₂₀⟩ c₂ = 0` with `ψ₂₀ = 0` on `Γ⁰₂`.
    pub fn psi20(&self, x: Point) -> Result<f64> {
        phase(&self.gamma2, x, self.e, self.speed, self.c2)
    }

    /// `φ₀ = ψ₂₀ - ψ₁₀`.
    pub fn phi0(&self, x: Point) -> Result<f64> {
        Ok(self.psi20(x)? - self.psi10(x)?)
    }
}

pub fn noninteracting_phases(sys: &FrontSystem2D) -> Result<PhaseFields> {
    sys.validate()?;
    Ok(PhaseFields {
        gamma1: sys.gamma1,
        gamma2: sys.gamma2,
        e: sys.direction(),
        speed: sys.speed(),
        c1: sys.c1(),
        c2: sys.c2(),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::kernels::Mollifier;

    pub(crate) fn planar_system(u0: f64, u1: f64, u2: f64) -> FrontSystem2D {
        FrontSystem2D {
            a: [1.0, 2.0],
            gamma1: FrontCurve::planar([0.0, 0.0], [1.0, 0.0]).unwrap(),
            gamma2: FrontCurve::planar([-1.0, 0.0], [1.0, 0.0]).unwrap(),
            u0,
            u1,
            u2,
            epsilon: 0.05,
            kernel: KernelPair::symmetric(Mollifier::erf_step()),
            window: Window::new((-2.0, 6.0), (-2.0, 12.0)).unwrap(),
            s_range: (-1.0, 1.0),
            rho_form: RhoForm::Derived,
        }
    }

    #[test]
    fn planar_phase_is_linear() {
        let f = noninteracting_phases(&planar_system(0.0, 1.0, 1.0)).unwrap();
        for x in [[0.3, -1.0], [-0.7, 4.0]] {
            assert!((f.psi10(x).unwrap() + x[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn finite_difference_residuals_vanish() {
        let mut sys = planar_system(0.25, 1.0, 0.0);
        // normals along A: every line parallel to A meets each front once
        sys.gamma1 = FrontCurve::parabolic([0.0, 0.0], [1.0, 2.0], 0.15).unwrap();
        sys.gamma2 = FrontCurve::parabolic([-1.0, 0.0], [1.0, 2.0], -0.2).unwrap();
        let f = noninteracting_phases(&sys).unwrap();
        // with u2 = 0 the second equation is the first with c = u2 + 2u1 + 2u0
        assert!((sys.c2() - (sys.u2 + 2.0 * sys.u1 + 2.0 * sys.u0)).abs() < 1e-15);
        let h = 1e-5;
        for i in 0..5 {
            for j in 0..5 {
                let x = [-0.5 + 0.2 * i as f64, -0.4 + 0.2 * j as f64];
                for (g, c) in [(0, sys.c1()), (1, sys.c2())] {
                    let p = |y: Point| if g == 0 { f.psi10(y) } else { f.psi20(y) }.unwrap();
                    let d1 = (p([x[0] + h, x[1]]) - p([x[0] - h, x[1]])) / (2.0 * h);
                    let d2 = (p([x[0], x[1] + h]) - p([x[0], x[1] - h])) / (2.0 * h);
                    let r = 1.0 + (sys.a[0] * d1 + sys.a[1] * d2) * c;
                    assert!(r.abs() < 1e-8, "residual {r} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_tangent_drift() {
        let mut sys = planar_system(0.0, 1.0, 1.0);
        sys.gamma2 = FrontCurve::planar([-1.0, 0.0], [2.0, -1.0]).unwrap();
        assert!(matches!(sys.validate(), Err(Error::Transversality { .. })));
        let mut sys = planar_system(0.0, 1.0, 1.0);
        sys.a = [1.0, 1.0];
        assert!(sys.validate().is_err());
    }
}

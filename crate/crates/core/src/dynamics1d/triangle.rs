use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::residual::WeakAnsatz;
use super::rho::{solve_rho_for_pair, RhoSolution};
use super::shock_shock::check_kernel;
use super::{time_grid, Trajectory, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::kernels::{KernelPair, Mollifier};
use crate::ode::bisect;

/// Below this `|φ₁ - φ₂|/ε` the ramp between the fronts is evaluated through
/// its limit form.
const THIN_RAMP: f64 = 1e-6;

/// A compression ramp of slope `-u1_0` between `a2 < a1` on the level `u0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleConfig {
    pub u0: f64,
    pub u1_0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl TriangleConfig {
    pub fn validate(&self) -> Result<()> {
        if [self.u0, self.u1_0, self.a1, self.a2].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("triangle parameters must be finite".into()));
        }
        if !(self.u1_0 > 0.0) {
            return Err(Error::InvalidInput("triangle slope u1_0 must be positive".into()));
        }
        if self.a1 <= self.a2 {
            return Err(Error::InvalidInput(format!(
                "triangle needs a2 < a1, got a1 = {}, a2 = {}",
                self.a1, self.a2
            )));
        }
        Ok(())
    }

    /// Height `(a1 - a2) u1_0` of the ramp, and of the shock it turns into.
    pub fn amplitude(&self) -> f64 {
        (self.a1 - self.a2) * self.u1_0
    }

    pub fn u10(&self, t: f64) -> f64 {
        self.u1_0 / (1.0 - 2.0 * t * self.u1_0)
    }

    pub fn phi10(&self, t: f64) -> f64 {
        self.a1 + 2.0 * self.u0 * t
    }

    pub fn phi20(&self, t: f64) -> f64 {
        self.a2 + 2.0 * (self.amplitude() + self.u0) * t
    }

    pub fn psi0(&self, t: f64) -> f64 {
        -(self.a1 - self.a2) * (1.0 - 2.0 * self.u1_0 * t)
    }

    /// Blow-up time of the slope, `1/(2 u1_0)`.
    pub fn t1(&self) -> f64 {
        0.5 / self.u1_0
    }

    pub fn shock_position_at_merge(&self) -> f64 {
        self.phi10(self.t1())
    }

    pub fn shock_speed(&self) -> f64 {
        2.0 * self.u0 + self.amplitude()
    }
}

#[derive(Clone, Debug)]
pub struct TriangleState {
    pub u0: f64,
    /// Common slope `u1 = u2 = (a1 - a2)u1_0/(φ₁ - φ₂)`; infinite once the
    /// fronts coincide.
    pub u1: f64,
    pub u2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub epsilon: f64,
    pub kernel: KernelPair,
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
    amplitude: f64,
    /// `(φ₁ - φ₂)/ε`.
    gap: f64,
}

fn second_derivative(m: &Mollifier, y: f64) -> f64 {
    let h = 1e-3 * m.width();
    let d = |k: f64| m.derivative(y + k * h);
    (8.0 * (d(1.0) - d(-1.0)) - (d(2.0) - d(-2.0))) / (12.0 * h)
}

impl TriangleState {
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    fn thin(&self) -> bool {
        self.gap.abs() < THIN_RAMP
    }

    /// Limit profile `ω(y) + yω'(y)` of the collapsed ramp and its
    /// derivative, at `y = (φ̄ - x)/ε`.
    fn collapsed(&self, x: f64) -> (f64, f64, f64) {
        let m = &self.kernel.left;
        let y = (0.5 * (self.phi1 + self.phi2) - x) / self.epsilon;
        let d1 = m.derivative(y);
        (y, m.value(y) + y * d1, 2.0 * d1 + y * second_derivative(m, y))
    }
}

impl WeakAnsatz for TriangleState {
    fn value(&self, x: f64) -> f64 {
        let a = self.amplitude;
        if self.thin() {
            return self.u0 + a * self.collapsed(x).1;
        }
        let eps = self.epsilon;
        let w1 = self.kernel.left.value((self.phi1 - x) / eps);
        let w2 = self.kernel.right.value((self.phi2 - x) / eps);
        let d = eps * self.gap;
        self.u0 + a * (w1 + (x - self.phi2) * (w2 - w1) / d)
    }

    fn dt(&self, x: f64) -> f64 {
        let a = self.amplitude;
        let eps = self.epsilon;
        if self.thin() {
            let v = 0.5 * (self.v1 + self.v2);
            return a * self.collapsed(x).2 * v / eps;
        }
        let (y1, y2) = ((self.phi1 - x) / eps, (self.phi2 - x) / eps);
        let (l, r) = (&self.kernel.left, &self.kernel.right);
        let (w1, w2) = (l.value(y1), r.value(y2));
        let (dw1, dw2) = (l.derivative(y1) * self.v1 / eps, r.derivative(y2) * self.v2 / eps);
        let d = eps * self.gap;
        let dd = self.v1 - self.v2;
        let jump = w2 - w1;
        let w = x - self.phi2;
        a * (dw1 - self.v2 * jump / d + w * ((dw2 - dw1) / d - jump * dd / (d * d)))
    }

    fn fronts(&self) -> Vec<f64> {
        vec![self.phi1, self.phi2]
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Two weak discontinuities bounding a compression ramp; they merge at
/// `t* = 1/(2u1_0)` and leave a shock.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub config: TriangleConfig,
    pub kernel: KernelPair,
    rho: Arc<RhoSolution>,
}

impl Triangle {
    pub fn new(config: TriangleConfig, kernel: KernelPair, tau_max: f64) -> Result<Self> {
        check_kernel(&kernel)?;
        let rho = Arc::new(solve_rho_for_pair(&kernel, tau_max)?);
        Self::with_rho(config, kernel, rho)
    }

    /// The ramp thins to `-ερ₀`, so a positive equilibrium root would turn
    /// it over; for distinct profiles `ρ₀` must stay clear of zero.
    pub fn with_rho(config: TriangleConfig, kernel: KernelPair, rho: Arc<RhoSolution>) -> Result<Self> {
        config.validate()?;
        check_kernel(&kernel)?;
        let limit = if kernel.is_identical() { 1e-9 } else { -THIN_RAMP };
        if rho.rho0 > limit {
            return Err(Error::InvalidInput(format!(
                "ramp collapse needs equilibrium root ρ₀ ≤ 0 (strictly negative for distinct profiles), got {}",
                rho.rho0
            )));
        }
        Ok(Self { config, kernel, rho })
    }

    pub fn rho_solution(&self) -> &Arc<RhoSolution> {
        &self.rho
    }

    pub fn state(&self, t: f64, epsilon: f64) -> Result<TriangleState> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon = {epsilon} must be positive")));
        }
        let c = &self.config;
        let tau = c.psi0(t) / epsilon;
        let rho = self.rho.rho(tau);
        let half_lag = 0.5 * epsilon * (self.rho.lag(tau) + self.rho.offset());
        let gap = self.rho.offset() - rho;
        let (b1, b2) = self.kernel.transfer_functions(rho)?;
        let a = c.amplitude();
        let u = if gap > 0.0 { a / (epsilon * gap) } else { f64::INFINITY };
        Ok(TriangleState {
            u0: c.u0,
            u1: u,
            u2: u,
            phi1: c.phi10(t) + half_lag,
            phi2: c.phi20(t) - half_lag,
            epsilon,
            kernel: self.kernel.clone(),
            t,
            v1: 2.0 * c.u0 + 2.0 * a * b1,
            v2: 2.0 * c.u0 + 2.0 * a * b2,
            amplitude: a,
            gap,
        })
    }

    pub fn detect_t_star(&self, t_end: f64) -> Result<Option<f64>> {
        let c = self.config;
        if c.psi0(0.0) * c.psi0(t_end) > 0.0 {
            return Ok(None);
        }
        let t = bisect(|t| c.psi0(t), 0.0, t_end, 1e-12)?;
        if t > c.t1() + 1e-9 {
            return Err(Error::InvalidInput("slope blows up before the fronts merge".into()));
        }
        Ok(Some(t))
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
            scenario: "triangle".into(),
            epsilon,
            mollifier: self.kernel.left.name().to_string(),
            t_star: self.detect_t_star(t_end)?,
            records,
        })
    }
}

pub(super) fn record(s: &TriangleState) -> TrajectoryRecord {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TriangleConfig {
        TriangleConfig {
            u0: 0.0,
            u1_0: 1.0,
            a1: 1.0,
            a2: 0.0,
        }
    }

    fn tri() -> Triangle {
        Triangle::new(cfg(), KernelPair::symmetric(Mollifier::erf_step()), 200.0).unwrap()
    }

    #[test]
    fn merge_and_blow_up_coincide() {
        let c = cfg();
        assert_eq!(c.psi0(0.25), 2.0 * 0.25 - 1.0);
        let t = tri().detect_t_star(1.0).unwrap().unwrap();
        assert!((t - 0.5).abs() < 1e-11 && (c.t1() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn composite_reproduces_closed_forms_before_merge() {
        let tr = tri();
        let c = cfg();
        for t in [0.0, 0.1, 0.3] {
            let s = tr.state(t, 0.01).unwrap();
            assert!((s.u1 - c.u10(t)).abs() < 1e-10 * c.u10(t));
            assert!((s.phi1 - c.phi10(t)).abs() < 1e-10);
            assert!((s.phi2 - c.phi20(t)).abs() < 1e-10);
            assert!((s.u1 * c.psi0(t) + c.u1_0 * (c.a1 - c.a2)).abs() < 1e-9);
        }
    }

    #[test]
    fn slope_times_width_is_the_amplitude() {
        let tr = Triangle::new(
            cfg(),
            KernelPair::new(
                Mollifier::erf_step(),
                Mollifier::from_name("erf", -1.0, 1.0).unwrap(),
                crate::kernels::Orientation::Section2a,
            ),
            200.0,
        )
        .unwrap();
        for t in [1.0, 1.5] {
            let s = tr.state(t, 0.02).unwrap();
            assert!((s.u1 * (s.phi1 - s.phi2) - 1.0).abs() < 1e-9);
            assert!((s.v1 - 1.0).abs() < 1e-8 && (s.v2 - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn collapsed_ramp_is_a_shock_of_the_full_amplitude() {
        let s = tri().state(1.0, 0.01).unwrap();
        assert!(s.u1.is_infinite() || s.u1 > 1e6);
        let x = s.phi1;
        assert!((s.value(x - 1.0) - 1.0).abs() < 1e-12);
        assert!(s.value(x + 1.0).abs() < 1e-12);
        let eps = 0.01;
        // shock born at x = 1 when t = 1/2, moving at speed 1
        assert!((s.phi1 - 1.5).abs() < 2.0 * eps);
    }

    #[test]
    fn time_derivative_matches_difference_quotient() {
        let tr = tri();
        let eps = 0.05;
        for t in [0.3, 0.48, 0.55] {
            let h = 1e-6;
            let (a, b, s) = (tr.state(t - h, eps).unwrap(), tr.state(t + h, eps).unwrap(), tr.state(t, eps).unwrap());
            for x in [0.0, 0.3, 0.45, 0.5, 0.7] {
                let fd = (b.value(x) - a.value(x)) / (2.0 * h);
                assert!((s.dt(x) - fd).abs() < 1e-4 * (1.0 + fd.abs()), "t={t} x={x}: {} vs {fd}", s.dt(x));
            }
        }
    }

    #[test]
    fn positive_root_is_rejected() {
        let k = KernelPair::new(
            Mollifier::erf_step(),
            Mollifier::from_name("erf", 1.0, 1.0).unwrap(),
            crate::kernels::Orientation::Section2a,
        );
        assert!(Triangle::new(cfg(), k, 200.0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::residual::WeakAnsatz;
use super::shock_shock::check_kernel;
use super::{time_grid, Trajectory, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::kernels::KernelPair;
use crate::ode::{bisect, integrate, OdeOptions, OdeTrajectory};

/// A shock of height `u0_0` at `a1` with a compression ramp of slope
/// `-u1_0` behind it on `[a2, a1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfluenceConfig {
    pub u0_0: f64,
    pub u1_0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ConfluenceConfig {
    pub fn validate(&self) -> Result<()> {
        if [self.u0_0, self.u1_0, self.a1, self.a2].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("confluence parameters must be finite".into()));
        }
        if !(self.u0_0 > 0.0) || self.u1_0 < 0.0 {
            return Err(Error::InvalidInput(
                "confluence needs u0_0 > 0 and u1_0 ≥ 0".into(),
            ));
        }
        if self.a1 <= self.a2 {
            return Err(Error::InvalidInput(format!(
                "confluence needs a2 < a1, got a1 = {}, a2 = {}",
                self.a1, self.a2
            )));
        }
        Ok(())
    }

    /// Level left of the ramp, `u0_0 + u1_0 (a1 - a2)`.
    pub fn big_u(&self) -> f64 {
        self.u0_0 + self.u1_0 * (self.a1 - self.a2)
    }

    fn root(&self, t: f64) -> f64 {
        (1.0 - 2.0 * self.u1_0 * t).sqrt()
    }

    pub fn u10(&self, t: f64) -> f64 {
        self.u1_0 / (1.0 - 2.0 * self.u1_0 * t)
    }

    pub fn u00(&self, t: f64) -> f64 {
        self.u0_0 / self.root(t)
    }

    pub fn phi10(&self, t: f64) -> f64 {
        if self.u1_0 == 0.0 {
            return self.a1 + self.u0_0 * t;
        }
        self.a1 + self.u0_0 / self.u1_0 * (1.0 - self.root(t))
    }

    pub fn phi20(&self, t: f64) -> f64 {
        self.a2 + 2.0 * self.big_u() * t
    }

    pub fn psi0(&self, t: f64) -> f64 {
        self.phi20(t) - self.phi10(t)
    }

    pub fn dpsi0(&self, t: f64) -> f64 {
        self.u00(t) - 2.0 * self.psi0(t) * self.u10(t)
    }

    /// Blow-up time `1/(2u1_0)` of the ramp slope.
    pub fn t1(&self) -> f64 {
        0.5 / self.u1_0
    }

    /// Closed-form merge time, `√(1 - 2u1_0 t*) = u0_0/U`.
    pub fn t_star(&self) -> f64 {
        let r = self.u0_0 / self.big_u();
        (1.0 - r * r) / (2.0 * self.u1_0)
    }

    pub fn shock_position_at_merge(&self) -> f64 {
        self.phi10(self.t_star())
    }

    /// `ψ₀` continued past `t* + δ`, `δ = (t₁ - t*)/4`, by its tangent line.
    pub fn psi0_continued(&self, t: f64) -> f64 {
        let t_star = self.t_star();
        let tc = t_star + 0.25 * (self.t1() - t_star);
        if t <= tc {
            self.psi0(t)
        } else {
            self.psi0(tc) + self.dpsi0(tc) * (t - tc)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConfluenceState {
    pub u0: f64,
    pub u1: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub epsilon: f64,
    pub kernel: KernelPair,
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
    pub du0: f64,
    pub du1: f64,
}

impl WeakAnsatz for ConfluenceState {
    fn value(&self, x: f64) -> f64 {
        let eps = self.epsilon;
        let h1 = self.kernel.left.value((self.phi1 - x) / eps);
        let h2 = self.kernel.right.value((self.phi2 - x) / eps);
        self.u0 * h1 + self.u1 * ((self.phi1 - x) * h1 - (self.phi2 - x) * h2)
    }

    fn dt(&self, x: f64) -> f64 {
        let eps = self.epsilon;
        let (y1, y2) = ((self.phi1 - x) / eps, (self.phi2 - x) / eps);
        let (l, r) = (&self.kernel.left, &self.kernel.right);
        let (h1, h2) = (l.value(y1), r.value(y2));
        let dh1 = l.derivative(y1) * self.v1 / eps;
        let dh2 = r.derivative(y2) * self.v2 / eps;
        let p = (self.phi1 - x) * h1 - (self.phi2 - x) * h2;
        let dp = self.v1 * h1 + (self.phi1 - x) * dh1 - self.v2 * h2 - (self.phi2 - x) * dh2;
        self.du0 * h1 + self.u0 * dh1 + self.du1 * p + self.u1 * dp
    }

    fn fronts(&self) -> Vec<f64> {
        vec![self.phi1, self.phi2]
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// A ramp running into the shock ahead of it.
#[derive(Clone, Debug)]
pub struct Confluence {
    pub config: ConfluenceConfig,
    pub kernel: KernelPair,
}

/// One integrated realization at fixed ε: state `(φ₁, φ₂, u₁)`.
#[derive(Clone, Debug)]
pub struct ConfluenceRun<'a> {
    owner: &'a Confluence,
    pub epsilon: f64,
    pub path: OdeTrajectory<3>,
}

struct Rates {
    u0: f64,
    v1: f64,
    v2: f64,
    du0: f64,
    du1: f64,
}

impl Confluence {
    pub fn new(config: ConfluenceConfig, kernel: KernelPair) -> Result<Self> {
        config.validate()?;
        check_kernel(&kernel)?;
        Ok(Self { config, kernel })
    }

    fn rates(&self, epsilon: f64, y: &[f64; 3]) -> Result<Rates> {
        let c = &self.config;
        let [phi1, phi2, u1] = *y;
        if c.u1_0 == 0.0 {
            return Ok(Rates {
                u0: c.u0_0,
                v1: c.u0_0,
                v2: 2.0 * c.u0_0,
                du0: 0.0,
                du1: 0.0,
            });
        }
        let psi = phi2 - phi1;
        let (b1, b2) = self.kernel.transfer_functions(psi / epsilon)?;
        let u0 = c.u0_0 * (u1 / c.u1_0).sqrt();
        let g = 1.0 - 2.0 * b1;
        Ok(Rates {
            u0,
            v1: u0 - 2.0 * u1 * psi * b1,
            v2: 2.0 * u0 * b2 - 2.0 * u1 * psi * b2,
            du0: u0 * u1 * g,
            du1: 2.0 * u1 * u1 * g,
        })
    }

    /// Integrate the phase/amplitude system directly in `t`.
    pub fn solve(&self, epsilon: f64, t_end: f64) -> Result<ConfluenceRun<'_>> {
        if !(epsilon > 0.0) || !(t_end > 0.0) {
            return Err(Error::InvalidInput("epsilon and t_end must be positive".into()));
        }
        let c = &self.config;
        let path = integrate(
            |_, y: &[f64; 3]| {
                let r = self.rates(epsilon, y)?;
                Ok([r.v1, r.v2, r.du1])
            },
            0.0,
            [c.a1, c.a2, c.u1_0],
            t_end,
            OdeOptions {
                h_max: 0.01,
                ..OdeOptions::default()
            },
        )?;
        Ok(ConfluenceRun {
            owner: self,
            epsilon,
            path,
        })
    }

    /// Zero of the closed-form `ψ₀` before the blow-up time.
    pub fn detect_t_star(&self, t_end: f64) -> Result<Option<f64>> {
        let c = self.config;
        if c.u1_0 == 0.0 {
            return Ok(None);
        }
        let hi = t_end.min(c.t1() * (1.0 - 1e-9));
        if c.psi0(0.0) * c.psi0(hi) > 0.0 {
            return Ok(None);
        }
        bisect(|t| c.psi0(t), 0.0, hi, 1e-12).map(Some)
    }

    pub fn evolve(&self, epsilon: f64, t_end: f64, samples: usize) -> Result<Trajectory> {
        let run = self.solve(epsilon, t_end)?;
        let records = time_grid(0.0, t_end, samples)
            .into_iter()
            .map(|t| {
                run.state(t).map(|s| TrajectoryRecord {
                    t,
                    phi1: s.phi1,
                    phi2: s.phi2,
                    u1: s.u1,
                    u2: s.u0,
                    v1: s.v1,
                    v2: s.v2,
                    rho: (s.phi2 - s.phi1) / epsilon,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            scenario: "confluence".into(),
            epsilon,
            mollifier: self.kernel.left.name().to_string(),
            t_star: self.detect_t_star(t_end)?,
            records,
        })
    }
}

impl ConfluenceRun<'_> {
    pub fn state(&self, t: f64) -> Result<ConfluenceState> {
        let y = self.path.interpolate(t);
        let r = self.owner.rates(self.epsilon, &y)?;
        Ok(ConfluenceState {
            u0: r.u0,
            u1: y[2],
            phi1: y[0],
            phi2: y[1],
            epsilon: self.epsilon,
            kernel: self.owner.kernel.clone(),
            t,
            v1: r.v1,
            v2: r.v2,
            du0: r.du0,
            du1: r.du1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Mollifier;

    fn cfg() -> ConfluenceConfig {
        ConfluenceConfig {
            u0_0: 1.0,
            u1_0: 1.0,
            a1: 1.0,
            a2: 0.0,
        }
    }

    fn conf() -> Confluence {
        Confluence::new(cfg(), KernelPair::symmetric(Mollifier::erf_step())).unwrap()
    }

    #[test]
    fn closed_form_merge_data() {
        let c = cfg();
        assert_eq!(c.big_u(), 2.0);
        assert!((c.t_star() - 0.375).abs() < 1e-15);
        assert_eq!(c.t1(), 0.5);
        assert!((c.u00(c.t_star()) - 2.0).abs() < 1e-12);
        assert!((c.u10(c.t_star()) - 4.0).abs() < 1e-12);
        assert!(c.psi0(c.t_star()).abs() < 1e-14);
        assert!((c.psi0(0.0) + 1.0).abs() < 1e-15);
        let t = conf().detect_t_star(1.0).unwrap().unwrap();
        assert!((t - 0.375).abs() < 1e-11);
    }

    #[test]
    fn closed_forms_solve_the_reduced_system() {
        let c = cfg();
        let h = 1e-6;
        for t in [0.05, 0.2, 0.33] {
            let d = |f: &dyn Fn(f64) -> f64| (f(t + h) - f(t - h)) / (2.0 * h);
            assert!((d(&|s| c.phi10(s)) - c.u00(t)).abs() < 1e-7);
            assert!((d(&|s| c.u10(s)) - 2.0 * c.u10(t).powi(2)).abs() < 1e-5);
            assert!((d(&|s| c.phi20(s)) - 2.0 * (c.u00(t) - c.u10(t) * c.psi0(t))).abs() < 1e-7);
        }
    }

    #[test]
    fn direct_run_tracks_closed_forms_then_merges() {
        let cf = conf();
        let c = cfg();
        let run = cf.solve(0.01, 1.0).unwrap();
        let s = run.state(0.2).unwrap();
        assert!((s.phi1 - c.phi10(0.2)).abs() < 1e-8);
        assert!((s.phi2 - c.phi20(0.2)).abs() < 1e-8);
        assert!((s.u1 - c.u10(0.2)).abs() < 1e-7);
        let late = run.state(1.0).unwrap();
        assert!((late.u0 - 2.0).abs() < 0.05, "{}", late.u0);
        assert!((late.phi2 - late.phi1).abs() < 0.1);
        // merged shock from x = 1.5 at t = 3/8 moving at speed 2
        assert!((late.phi1 - (1.5 + 2.0 * 0.625)).abs() < 0.05, "{}", late.phi1);
    }

    #[test]
    fn no_ramp_means_plain_shock() {
        let c = ConfluenceConfig { u1_0: 0.0, ..cfg() };
        let cf = Confluence::new(c, KernelPair::symmetric(Mollifier::erf_step())).unwrap();
        let s = cf.solve(0.05, 1.0).unwrap().state(1.0).unwrap();
        assert!((s.phi1 - 2.0).abs() < 1e-12);
        assert!(cf.detect_t_star(1.0).unwrap().is_none());
    }

    #[test]
    fn continuation_is_tangent() {
        let c = cfg();
        let tc = c.t_star() + 0.25 * (c.t1() - c.t_star());
        let h = 1e-7;
        let left = (c.psi0_continued(tc) - c.psi0_continued(tc - h)) / h;
        let right = (c.psi0_continued(tc + h) - c.psi0_continued(tc)) / h;
        assert!((left - right).abs() < 1e-5);
        assert!(c.psi0_continued(10.0) > 0.0);
    }
}

use super::residual::WeakAnsatz;
use super::triangle::{record, Triangle, TriangleState};
use super::{time_grid, Trajectory};
use crate::error::{Error, Result};
use crate::ode::bisect;

/// `v(x, t) = u(x, T - t)` for the ramp-collapse family: a shock at `t = 0`
/// that is unstable for `v_t - (v²)_x = 0` and splits into a ramp.
#[derive(Clone, Debug)]
pub struct Decay {
    pub forward: Triangle,
    pub horizon: f64,
}

#[derive(Clone, Debug)]
pub struct DecayState {
    pub t: f64,
    pub forward: TriangleState,
}

impl WeakAnsatz for DecayState {
    fn value(&self, x: f64) -> f64 {
        self.forward.value(x)
    }

    fn dt(&self, x: f64) -> f64 {
        -self.forward.dt(x)
    }

    fn flux_sign(&self) -> f64 {
        -1.0
    }

    fn fronts(&self) -> Vec<f64> {
        self.forward.fronts()
    }

    fn epsilon(&self) -> f64 {
        self.forward.epsilon
    }
}

impl Decay {
    pub fn new(forward: Triangle, horizon: f64) -> Result<Self> {
        let t_star = forward.config.t1();
        if !(horizon > t_star) {
            return Err(Error::InvalidInput(format!(
                "decay horizon T = {horizon} must exceed the merge time {t_star}"
            )));
        }
        Ok(Self { forward, horizon })
    }

    pub fn state(&self, t: f64, epsilon: f64) -> Result<DecayState> {
        Ok(DecayState {
            t,
            forward: self.forward.state(self.horizon - t, epsilon)?,
        })
    }

    /// Time at which the reversed front separation changes sign, `T - t*`.
    pub fn split_time(&self) -> Result<f64> {
        let c = self.forward.config;
        let t_big = self.horizon;
        bisect(|t| c.psi0(t_big - t), 0.0, t_big, 1e-12)
    }

    pub fn evolve(&self, epsilon: f64, t_end: f64, samples: usize) -> Result<Trajectory> {
        if !(t_end > 0.0 && t_end <= self.horizon) {
            return Err(Error::InvalidInput(format!(
                "decay t_end must lie in (0, T = {}]",
                self.horizon
            )));
        }
        let records = time_grid(0.0, t_end, samples)
            .into_iter()
            .map(|t| {
                self.state(t, epsilon).map(|s| {
                    let mut r = record(&s.forward);
                    r.t = t;
                    r.v1 = -r.v1;
                    r.v2 = -r.v2;
                    r
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let split = self.split_time()?;
        Ok(Trajectory {
            scenario: "decay".into(),
            epsilon,
            mollifier: self.forward.kernel.left.name().to_string(),
            t_star: (split <= t_end).then_some(split),
            records,
        })
    }
}

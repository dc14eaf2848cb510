use crate::error::{Error, Result};
use crate::kernels::KernelPair;
use crate::ode::{bisect, integrate, OdeOptions, OdeTrajectory};

pub const DEFAULT_TAU_MIN: f64 = -50.0;
pub const DEFAULT_TAU_MAX: f64 = 200.0;

/// Solution of the rescaled separation problem `dρ/dτ = F(ρ)`,
/// `ρ/τ → 1` as `τ → -∞`.
///
/// Below the grid `ρ` continues as `τ + c` with the imposed offset `c`;
/// above it the last value is held.
#[derive(Clone, Debug)]
pub struct RhoSolution {
    pub tau_grid: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub rho0: f64,
    traj: OdeTrajectory<1>,
}

impl RhoSolution {
    pub fn tau_min(&self) -> f64 {
        self.tau_grid[0]
    }

    pub fn tau_max(&self) -> f64 {
        *self.tau_grid.last().unwrap()
    }

    /// `c` in `ρ ≈ τ + c` on the far left.
    pub fn offset(&self) -> f64 {
        self.rho_values[0] - self.tau_grid[0]
    }

    pub fn rho(&self, tau: f64) -> f64 {
        if tau <= self.tau_min() {
            tau + self.offset()
        } else {
            self.traj.interpolate(tau)[0]
        }
    }

    pub fn rho_dot(&self, tau: f64) -> f64 {
        if tau <= self.tau_min() {
            1.0
        } else if tau >= self.tau_max() {
            0.0
        } else {
            self.traj.interpolate_derivative(tau)[0]
        }
    }

    /// `τ - ρ(τ)`, equal to `2∫_{-∞}^τ (1 - B₂(ρ)) dτ' - c` for the kernel problem.
    pub fn lag(&self, tau: f64) -> f64 {
        tau - self.rho(tau)
    }
}

fn find_root<F: FnMut(f64) -> Result<f64>>(f: &mut F, guess: f64) -> Result<f64> {
    let mut half = 1.0;
    while half < 1e6 {
        let (lo, hi) = (guess - half, guess + half);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo.signum() != fhi.signum() {
            let mut failure = None;
            let r = bisect(
                |x| match f(x) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                lo,
                hi,
                1e-13,
            )?;
            return match failure {
                Some(e) => Err(e),
                None => Ok(r),
            };
        }
        half *= 2.0;
    }
    Err(Error::NoRoot {
        lo: guess - half,
        hi: guess + half,
    })
}

fn integrate_rho<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    tau_min: f64,
    tau_max: f64,
) -> Result<OdeTrajectory<1>> {
    if tau_min > -50.0 {
        return Err(Error::InvalidInput(format!("tau_min = {tau_min} must be ≤ -50")));
    }
    if tau_max <= 0.0 {
        return Err(Error::InvalidInput(format!("tau_max = {tau_max} must be positive")));
    }
    let opts = OdeOptions {
        h_max: 0.25,
        ..OdeOptions::default()
    };
    integrate(|_, y: &[f64; 1]| Ok([f(y[0])?]), tau_min, [tau_min], tau_max, opts)
}

fn finish(traj: OdeTrajectory<1>, rho0: f64, tol: f64) -> Result<RhoSolution> {
    let last = traj.last().1[0];
    if !last.is_finite() || (last - rho0).abs() >= tol {
        return Err(Error::NoConvergence { last, target: rho0 });
    }
    Ok(RhoSolution {
        tau_grid: traj.t.clone(),
        rho_values: traj.y.iter().map(|y| y[0]).collect(),
        rho0,
        traj,
    })
}

/// Integrate `dρ/dτ = F(ρ)` from `ρ(τ_min) = τ_min` and check the end value
/// against the root of `F` nearest to it.
pub fn solve_rho<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    tau_min: f64,
    tau_max: f64,
    tol: f64,
) -> Result<RhoSolution> {
    let traj = integrate_rho(&mut f, tau_min, tau_max)?;
    let last = traj.last().1[0];
    let rho0 = find_root(&mut f, last)?;
    finish(traj, rho0, tol)
}

/// The kernel problem `F(ρ) = 2B₂(ρ) - 1`, with `ρ₀` the equilibrium root of
/// the pair.
pub fn solve_rho_for_pair(pair: &KernelPair, tau_max: f64) -> Result<RhoSolution> {
    let rho0 = pair.equilibrium_root()?;
    let traj = integrate_rho(&mut |r| Ok(2.0 * pair.b2(r)? - 1.0), DEFAULT_TAU_MIN, tau_max)?;
    finish(traj, rho0, 1e-6)
}

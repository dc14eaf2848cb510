use serde::Serialize;

use super::data::PiecewiseInitialData;
use crate::error::{Error, Result};

/// Cell averages on a uniform grid.
#[derive(Clone, Debug, Serialize)]
pub struct GridSolution {
    pub lo: f64,
    pub hi: f64,
    pub dx: f64,
    pub t: f64,
    pub values: Vec<f64>,
    pub steps: usize,
    /// Largest per-step mismatch between the change of `Σ u Δx` and the
    /// boundary flux.
    pub max_conservation_defect: f64,
}

impl GridSolution {
    pub fn centers(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|i| self.lo + (i as f64 + 0.5) * self.dx)
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx
    }

    /// Piecewise constant reconstruction.
    pub fn eval(&self, x: f64) -> f64 {
        let i = ((x - self.lo) / self.dx).floor();
        let i = i.clamp(0.0, (self.values.len() - 1) as f64) as usize;
        self.values[i]
    }
}

fn flux(u: f64) -> f64 {
    u * u
}

/// Exact Riemann flux for `f(u) = u²`.
pub fn godunov_flux(ul: f64, ur: f64) -> f64 {
    if ul > ur {
        if ul + ur >= 0.0 {
            flux(ul)
        } else {
            flux(ur)
        }
    } else if ul >= 0.0 {
        flux(ul)
    } else if ur <= 0.0 {
        flux(ur)
    } else {
        0.0
    }
}

/// First-order Godunov scheme on `[lo, hi]` with transmissive boundaries.
pub fn godunov_solve(
    data: &PiecewiseInitialData,
    window: (f64, f64),
    t_end: f64,
    nx: usize,
    cfl: f64,
) -> Result<GridSolution> {
    if !(cfl > 0.0 && cfl <= 0.9) {
        return Err(Error::Cfl(cfl));
    }
    if nx < 100 {
        return Err(Error::InvalidInput(format!("nx = {nx} must be at least 100")));
    }
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidInput(format!("bad window [{lo}, {hi}]")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} must be non-negative")));
    }
    let dx = (hi - lo) / nx as f64;
    let mut u: Vec<f64> = (0..nx)
        .map(|i| {
            let a = lo + i as f64 * dx;
            data.integral(a, a + dx) / dx
        })
        .collect();
    let mut fluxes = vec![0.0; nx + 1];
    let mut t = 0.0;
    let mut steps = 0;
    let mut defect: f64 = 0.0;
    while t < t_end {
        let speed = u.iter().fold(0.0_f64, |m, v| m.max(2.0 * v.abs()));
        let mut dt = if speed > 0.0 { cfl * dx / speed } else { t_end - t };
        if t + dt >= t_end {
            dt = t_end - t;
        }
        fluxes[0] = godunov_flux(u[0], u[0]);
        fluxes[nx] = godunov_flux(u[nx - 1], u[nx - 1]);
        for i in 1..nx {
            fluxes[i] = godunov_flux(u[i - 1], u[i]);
        }
        let before: f64 = u.iter().sum::<f64>() * dx;
        let r = dt / dx;
        for i in 0..nx {
            u[i] -= r * (fluxes[i + 1] - fluxes[i]);
        }
        let after: f64 = u.iter().sum::<f64>() * dx;
        let expected = before - dt * (fluxes[nx] - fluxes[0]);
        defect = defect.max((after - expected).abs());
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("Godunov state at t = {t}")));
        }
        t += dt;
        steps += 1;
    }
    Ok(GridSolution {
        lo,
        hi,
        dx,
        t: t_end,
        values: u,
        steps,
        max_conservation_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_stays_constant() {
        let d = PiecewiseInitialData::riemann(0.7, 0.7, 0.0).unwrap();
        let g = godunov_solve(&d, (-1.0, 1.0), 0.5, 200, 0.9).unwrap();
        assert!(g.values.iter().all(|&v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn single_shock_lands_within_two_cells() {
        let d = PiecewiseInitialData::riemann(1.0, 0.0, 0.0).unwrap();
        let g = godunov_solve(&d, (-1.0, 2.0), 1.0, 600, 0.8).unwrap();
        let c = g.centers();
        let i = g.values.iter().position(|&v| v < 0.5).unwrap();
        assert!((c[i] - 1.0).abs() < 2.0 * g.dx, "shock at {}", c[i]);
        assert!(g.max_conservation_defect < 1e-12);
    }

    #[test]
    fn flux_cases() {
        assert_eq!(godunov_flux(2.0, 1.0), 4.0);
        assert_eq!(godunov_flux(-1.0, -2.0), 4.0);
        assert_eq!(godunov_flux(-1.0, 1.0), 0.0);
        assert_eq!(godunov_flux(1.0, 2.0), 1.0);
        assert_eq!(godunov_flux(-2.0, -1.0), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = PiecewiseInitialData::riemann(1.0, 0.0, 0.0).unwrap();
        assert_eq!(godunov_solve(&d, (0.0, 1.0), 1.0, 200, 0.95).unwrap_err(), Error::Cfl(0.95));
        assert!(godunov_solve(&d, (0.0, 1.0), 1.0, 50, 0.5).is_err());
    }
}

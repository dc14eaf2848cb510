use rayon::prelude::*;
use serde::Serialize;

use super::geometry::{along, Point};
use super::system::FrontSystem2D;
use crate::error::{Error, Result};

pub const DEFAULT_RAYS: usize = 64;
const RAY_SAMPLES: usize = 257;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RayStatus {
    /// No intersection with `Γ⁰₁` ahead of the origin inside the window.
    MissesFront,
    /// The origin on `Γ⁰₂` lies outside the window.
    OutsideWindow,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExcludedRay {
    pub s: f64,
    pub status: RayStatus,
}

/// The 1D problem along the line `x(ξ) = x₀(s) + ξ A/|A|`.
#[derive(Clone, Debug, Serialize)]
pub struct RayReduction {
    pub s: f64,
    pub origin: Point,
    pub direction: Point,
    /// Distance from `Γ⁰₂` to `Γ⁰₁` along the ray.
    pub xi1: f64,
    /// Window chord `[ξ_in, ξ_out]`, with `ξ_in ≤ 0`.
    pub xi_in: f64,
    pub xi_out: f64,
    pub xi_grid: Vec<f64>,
    pub psi10: Vec<f64>,
    pub psi20: Vec<f64>,
    pub phi0: Vec<f64>,
    speed: f64,
    c1: f64,
    c2: f64,
}

impl RayReduction {
    pub fn point(&self, xi: f64) -> Point {
        along(self.origin, self.direction, xi)
    }

    pub fn psi10_at(&self, xi: f64) -> f64 {
        -(xi - self.xi1) / (self.speed * self.c1)
    }

    pub fn psi20_at(&self, xi: f64) -> f64 {
        -xi / (self.speed * self.c2)
    }

    pub fn phi0_at(&self, xi: f64) -> f64 {
        self.psi20_at(xi) - self.psi10_at(xi)
    }

    /// Where `φ₀` vanishes: the outer fronts meet here.
    pub fn merge_xi(&self) -> f64 {
        self.xi1 * self.c2 / (self.c2 - self.c1)
    }

    pub fn merge_time(&self) -> f64 {
        -self.psi20_at(self.merge_xi())
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Pre-interaction factors `(c₁, c₂)`.
    pub fn factors(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RayTrace {
    pub rays: Vec<RayReduction>,
    pub excluded: Vec<ExcludedRay>,
}

fn trace_one(sys: &FrontSystem2D, s: f64) -> std::result::Result<RayReduction, ExcludedRay> {
    let e = sys.direction();
    let origin = sys.gamma2.at(s);
    let excluded = |status| Err(ExcludedRay { s, status });
    if !sys.window.contains(origin) {
        return excluded(RayStatus::OutsideWindow);
    }
    let Some((xi_in, xi_out)) = sys.window.chord(origin, e) else {
        return excluded(RayStatus::OutsideWindow);
    };
    let hit = sys
        .gamma1
        .line_hits(origin, e)
        .into_iter()
        .find(|&h| h > 0.0 && h <= xi_out);
    let Some(xi1) = hit else {
        return excluded(RayStatus::MissesFront);
    };
    let xi_grid: Vec<f64> = (0..RAY_SAMPLES)
        .map(|i| xi_in + (xi_out - xi_in) * i as f64 / (RAY_SAMPLES - 1) as f64)
        .collect();
    let mut ray = RayReduction {
        s,
        origin,
        direction: e,
        xi1,
        xi_in,
        xi_out,
        xi_grid,
        psi10: Vec::new(),
        psi20: Vec::new(),
        phi0: Vec::new(),
        speed: sys.speed(),
        c1: sys.c1(),
        c2: sys.c2(),
    };
    ray.psi10 = ray.xi_grid.iter().map(|&xi| ray.psi10_at(xi)).collect();
    ray.psi20 = ray.xi_grid.iter().map(|&xi| ray.psi20_at(xi)).collect();
    ray.phi0 = ray.xi_grid.iter().map(|&xi| ray.phi0_at(xi)).collect();
    Ok(ray)
}

/// Rays uniformly spaced in `s` over `sys.s_range`.
pub fn ray_trace(sys: &FrontSystem2D, n_rays: usize) -> Result<RayTrace> {
    if n_rays == 0 {
        return Err(Error::InvalidInput("n_rays must be positive".into()));
    }
    sys.validate()?;
    let results = sys
        .s_samples(n_rays)
        .into_par_iter()
        .map(|s| trace_one(sys, s))
        .collect::<Vec<_>>();
    let mut trace = RayTrace {
        rays: Vec::new(),
        excluded: Vec::new(),
    };
    for r in results {
        match r {
            Ok(ray) => trace.rays.push(ray),
            Err(x) => trace.excluded.push(x),
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fronts2d::geometry::{FrontCurve, Window};
    use crate::fronts2d::system::noninteracting_phases;
    use crate::fronts2d::system::tests::planar_system;

    #[test]
    fn parallel_fronts_give_constant_separation() {
        let sys = planar_system(0.0, 1.0, 1.0);
        let t = ray_trace(&sys, 16).unwrap();
        assert_eq!(t.rays.len(), 16);
        let first = &t.rays[0];
        for r in &t.rays {
            assert!((r.xi1 - first.xi1).abs() < 1e-13);
            for (i, &xi) in r.xi_grid.iter().enumerate() {
                assert!((r.phi0[i] - first.phi0_at(xi)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ray_samples_match_the_phase_fields() {
        let mut sys = planar_system(0.5, 1.0, 0.5);
        sys.gamma2 = FrontCurve::parabolic([-1.0, 0.0], [1.0, 2.0], 0.2).unwrap();
        let f = noninteracting_phases(&sys).unwrap();
        let t = ray_trace(&sys, 8).unwrap();
        for r in &t.rays {
            for (i, &xi) in r.xi_grid.iter().enumerate() {
                let x = r.point(xi);
                assert!((r.psi10[i] - f.psi10(x).unwrap()).abs() < 1e-12);
                assert!((r.psi20[i] - f.psi20(x).unwrap()).abs() < 1e-12);
            }
            assert!(r.phi0[0] < 0.0);
        }
    }

    #[test]
    fn curved_section_matches_geometric_oracle() {
        let mut sys = planar_system(0.0, 1.0, 1.0);
        sys.gamma2 = FrontCurve::parabolic([-1.0, 0.0], [1.0, 0.0], 0.3).unwrap();
        let t = ray_trace(&sys, 5).unwrap();
        let e = sys.direction();
        for r in &t.rays {
            // march along the ray to the sign change of x₁, then bisect
            let mut lo = 0.0;
            let mut hi = 0.0;
            while along(r.origin, e, hi)[0] < 0.0 {
                lo = hi;
                hi += 0.01;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if along(r.origin, e, mid)[0] < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((r.xi1 - lo).abs() < 1e-12);
            // φ₀ at the origin is the travel-time gap
            let expect = -lo / (sys.speed() * sys.c1());
            assert!((r.phi0_at(0.0) - expect).abs() < 1e-12);
        }
        let d: Vec<f64> = t.rays.iter().map(|r| r.xi1).collect();
        assert!(d.iter().any(|&v| (v - d[0]).abs() > 1e-3));
    }

    #[test]
    fn rays_leaving_the_window_are_excluded() {
        let mut sys = planar_system(0.0, 1.0, 1.0);
        sys.window = Window::new((-2.0, 6.0), (-0.5, 12.0)).unwrap();
        sys.s_range = (-1.0, 1.0);
        let t = ray_trace(&sys, 4).unwrap();
        assert_eq!(t.excluded.len(), 1);
        assert_eq!(t.excluded[0].status, RayStatus::OutsideWindow);
        sys.window = Window::new((-2.0, 6.0), (-2.0, 1.0)).unwrap();
        let t = ray_trace(&sys, 4).unwrap();
        assert!(t.excluded.iter().any(|x| x.status == RayStatus::MissesFront));
    }
}

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::geometry::{along, dot, norm, Point};
use super::rays::{ray_trace, RayReduction, RayTrace};
use super::rho2d::{composite_at, solve_rho_2d, InteractionProfile, RayAmplitudes};
use super::system::FrontSystem2D;
use crate::dynamics1d::DEFAULT_TAU_MAX;
use crate::error::{Error, Result};
use crate::ode::bisect;

/// Where and when the two outer fronts meet on one ray.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MergedRay {
    pub s: f64,
    pub t_merge: f64,
    pub xi_merge: f64,
    pub point: Point,
    pub xi_out: f64,
}

/// The front carried by `1 + ⟨A, ∇ψ⁺⟩ U₀ = 0` after the fronts meet.
#[derive(Clone, Debug, Serialize)]
pub struct MergedFront {
    pub rays: Vec<MergedRay>,
    pub merged_factor: f64,
    speed: f64,
    #[serde(skip)]
    sys: FrontSystem2D,
}

pub fn post_merge_front(trace: &RayTrace, sys: &FrontSystem2D) -> MergedFront {
    let rays = trace
        .rays
        .iter()
        .map(|r| MergedRay {
            s: r.s,
            t_merge: r.merge_time(),
            xi_merge: r.merge_xi(),
            point: r.point(r.merge_xi()),
            xi_out: r.xi_out,
        })
        .collect();
    MergedFront {
        rays,
        merged_factor: sys.merged_factor(),
        speed: sys.speed(),
        sys: sys.clone(),
    }
}

impl MergedFront {
    /// Which rays have merged by time `t`.
    pub fn merged(&self, t: f64) -> Vec<bool> {
        self.rays.iter().map(|r| t >= r.t_merge).collect()
    }

    /// `ψ⁺` on ray `i` at distance `ξ` from `Γ⁰₂`.
    pub fn psi_plus_on_ray(&self, i: usize, xi: f64) -> f64 {
        let r = &self.rays[i];
        -r.t_merge - (xi - r.xi_merge) / (self.speed * self.merged_factor)
    }

    /// Merged front position on ray `i` at `t ≥ t_merge`, if inside the window.
    pub fn front_point(&self, i: usize, t: f64) -> Option<Point> {
        let r = &self.rays[i];
        if t < r.t_merge {
            return None;
        }
        let xi = r.xi_merge + self.speed * self.merged_factor * (t - r.t_merge);
        (xi <= r.xi_out).then(|| along(self.sys.gamma2.at(r.s), self.sys.direction(), xi))
    }

    /// `ψ⁺` as a field: the ray through `x` is found by projecting onto `Γ⁰₂`
    /// along `-A`.
    pub fn psi_plus(&self, x: Point) -> Result<f64> {
        let e = self.sys.direction();
        let miss = || Error::Transversality { x: x[0], y: x[1] };
        let eta = self.sys.gamma2.nearest_hit(x, e).ok_or_else(miss)?;
        let origin = along(x, e, eta);
        let xi1 = self
            .sys
            .gamma1
            .line_hits(origin, e)
            .into_iter()
            .find(|&h| h > 0.0)
            .ok_or_else(miss)?;
        let (c1, c2) = (self.sys.c1(), self.sys.c2());
        let xi_m = xi1 * c2 / (c2 - c1);
        let t_m = xi_m / (self.speed * c2);
        Ok(-t_m - (-eta - xi_m) / (self.speed * self.merged_factor))
    }

    /// `(V_n, ⟨A, n⟩ U₀)` at `x` from a centered difference of `ψ⁺`.
    pub fn normal_speed(&self, x: Point) -> Result<(f64, f64)> {
        let h = 1e-6;
        let d = |k: usize| -> Result<f64> {
            let mut p = x;
            let mut m = x;
            p[k] += h;
            m[k] -= h;
            Ok((self.psi_plus(p)? - self.psi_plus(m)?) / (2.0 * h))
        };
        let g = [d(0)?, d(1)?];
        let gn = norm(g);
        let a_dot_n = -dot(self.sys.a, g) / gn;
        Ok((1.0 / gn, a_dot_n * self.merged_factor))
    }
}

/// One sampled front point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontPoint {
    pub t: f64,
    pub s: f64,
    pub x1: f64,
    pub x2: f64,
    pub front_id: u8,
    pub merged: bool,
}

fn locate(ray: &RayReduction, profile: &InteractionProfile, eps: f64, t: f64, k: usize) -> Option<f64> {
    let g = |xi: f64| {
        let (a, b) = composite_at(ray, profile, eps, xi);
        [a, b][k] + t
    };
    let (lo, hi) = (ray.xi_in, ray.xi_out);
    if g(lo) < 0.0 || g(hi) > 0.0 {
        return None;
    }
    bisect(g, lo, hi, 1e-12).ok()
}

/// Level sets `t + ψ_k = 0` of the composite phases on every ray.
pub fn snapshots(
    trace: &RayTrace,
    profile: &InteractionProfile,
    epsilon: f64,
    times: &[f64],
) -> Vec<FrontPoint> {
    let per_ray: Vec<Vec<(usize, FrontPoint)>> = trace
        .rays
        .par_iter()
        .map(|ray| {
            let mut out = Vec::new();
            for (ti, &t) in times.iter().enumerate() {
                for k in 0..2 {
                    if let Some(xi) = locate(ray, profile, epsilon, t, k) {
                        let p = ray.point(xi);
                        out.push((
                            ti,
                            FrontPoint {
                                t,
                                s: ray.s,
                                x1: p[0],
                                x2: p[1],
                                front_id: k as u8 + 1,
                                merged: t >= ray.merge_time(),
                            },
                        ));
                    }
                }
            }
            out
        })
        .collect();
    let mut all: Vec<(usize, usize, FrontPoint)> = per_ray
        .into_iter()
        .enumerate()
        .flat_map(|(ri, v)| v.into_iter().map(move |(ti, p)| (ti, ri, p)))
        .collect();
    all.sort_by_key(|&(ti, ri, p)| (ti, ri, p.front_id));
    all.into_iter().map(|(_, _, p)| p).collect()
}

pub fn to_delimited(points: &[FrontPoint]) -> String {
    let mut s = String::from("t,s,x1,x2,front_id,merged\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{},{},{}", p.t, p.s, p.x1, p.x2, p.front_id, p.merged as u8);
    }
    s
}

/// Everything computed for one system.
#[derive(Clone, Debug, Serialize)]
pub struct Fronts2dResult {
    pub trace: RayTrace,
    pub rho0: f64,
    pub b2_at_rho0: f64,
    pub merged: MergedFront,
    pub snapshots: Vec<FrontPoint>,
}

pub fn simulate(sys: &FrontSystem2D, n_rays: usize, times: &[f64]) -> Result<Fronts2dResult> {
    let trace = ray_trace(sys, n_rays)?;
    let amps = RayAmplitudes::of(sys);
    let rho = solve_rho_2d(&amps, &sys.kernel, DEFAULT_TAU_MAX)?;
    let profile = InteractionProfile::new(amps, &sys.kernel, DEFAULT_TAU_MAX)?;
    let merged = post_merge_front(&trace, sys);
    let snapshots = snapshots(&trace, &profile, sys.epsilon, times);
    Ok(Fronts2dResult {
        rho0: rho.rho0,
        b2_at_rho0: sys.kernel.b2(rho.rho0)?,
        trace,
        merged,
        snapshots,
    })
}

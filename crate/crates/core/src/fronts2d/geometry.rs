use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn along(x: Point, e: Point, eta: f64) -> Point {
    [x[0] + eta * e[0], x[1] + eta * e[1]]
}

/// The curve `{⟨n, x - p⟩ = κ ⟨t, x - p⟩²}` with `t = n` rotated by +90°.
/// `κ = 0` is a straight line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontCurve {
    pub point: Point,
    pub normal: Point,
    pub curvature: f64,
}

impl FrontCurve {
    pub fn planar(point: Point, normal: Point) -> Result<Self> {
        Self::parabolic(point, normal, 0.0)
    }

    pub fn parabolic(point: Point, normal: Point, curvature: f64) -> Result<Self> {
        let n = norm(normal);
        if !(n > 0.0 && n.is_finite() && curvature.is_finite())
            || !point.iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("front curve needs a finite nonzero normal".into()));
        }
        Ok(Self {
            point,
            normal: [normal[0] / n, normal[1] / n],
            curvature,
        })
    }

    pub fn tangent(&self) -> Point {
        [-self.normal[1], self.normal[0]]
    }

    pub fn is_planar(&self) -> bool {
        self.curvature == 0.0
    }

    /// Implicit function, zero on the curve.
    pub fn level(&self, x: Point) -> f64 {
        let d = [x[0] - self.point[0], x[1] - self.point[1]];
        dot(self.normal, d) - self.curvature * dot(self.tangent(), d).powi(2)
    }

    pub fn gradient(&self, x: Point) -> Point {
        let t = self.tangent();
        let d = [x[0] - self.point[0], x[1] - self.point[1]];
        let w = 2.0 * self.curvature * dot(t, d);
        [self.normal[0] - w * t[0], self.normal[1] - w * t[1]]
    }

    /// Point with tangential coordinate `s`.
    pub fn at(&self, s: f64) -> Point {
        let (n, t) = (self.normal, self.tangent());
        let k = self.curvature * s * s;
        [
            self.point[0] + s * t[0] + k * n[0],
            self.point[1] + s * t[1] + k * n[1],
        ]
    }

    /// All `η` with `x + η e` on the curve, ascending.
    pub fn line_hits(&self, x: Point, e: Point) -> Vec<f64> {
        let t = self.tangent();
        let d = [x[0] - self.point[0], x[1] - self.point[1]];
        let (al, be) = (dot(self.normal, d), dot(self.normal, e));
        let (ga, de) = (dot(t, d), dot(t, e));
        // a η² + b η + c = 0
        let a = -self.curvature * de * de;
        let b = be - 2.0 * self.curvature * ga * de;
        let c = al - self.curvature * ga * ga;
        if a.abs() <= 1e-14 * (b.abs() + c.abs()) {
            return if b != 0.0 { vec![-c / b] } else { vec![] };
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return vec![];
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let mut roots = if q == 0.0 { vec![0.0] } else { vec![q / a, c / q] };
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots
    }

    /// Hit with the smallest `|η|`.
    pub fn nearest_hit(&self, x: Point, e: Point) -> Option<f64> {
        self.line_hits(x, e)
            .into_iter()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
    }
}

/// Rectangle `[x1.0, x1.1] × [x2.0, x2.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl Window {
    pub fn new(x1: (f64, f64), x2: (f64, f64)) -> Result<Self> {
        if !(x1.0 < x1.1 && x2.0 < x2.1) || ![x1.0, x1.1, x2.0, x2.1].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("window bounds must be finite and ordered".into()));
        }
        Ok(Self { x1, x2 })
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x1.0 && p[0] <= self.x1.1 && p[1] >= self.x2.0 && p[1] <= self.x2.1
    }

    /// `(η_in, η_out)` such that `x + η e` is inside for `η_in ≤ η ≤ η_out`.
    pub fn chord(&self, x: Point, e: Point) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (k, (a, b)) in [self.x1, self.x2].into_iter().enumerate() {
            if e[k] == 0.0 {
                if x[k] < a || x[k] > b {
                    return None;
                }
                continue;
            }
            let (p, q) = ((a - x[k]) / e[k], (b - x[k]) / e[k]);
            lo = lo.max(p.min(q));
            hi = hi.min(p.max(q));
        }
        (lo <= hi).then_some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameterization_lies_on_the_curve() {
        let c = FrontCurve::parabolic([0.5, -1.0], [1.0, 1.0], 0.3).unwrap();
        for s in [-2.0, -0.3, 0.0, 1.7] {
            assert!(c.level(c.at(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn gradient_matches_differences() {
        let c = FrontCurve::parabolic([0.0, 0.0], [0.0, 1.0], -0.7).unwrap();
        let x = [0.4, 0.9];
        let h = 1e-6;
        let g = c.gradient(x);
        let fx = (c.level([x[0] + h, x[1]]) - c.level([x[0] - h, x[1]])) / (2.0 * h);
        let fy = (c.level([x[0], x[1] + h]) - c.level([x[0], x[1] - h])) / (2.0 * h);
        assert!((g[0] - fx).abs() < 1e-8 && (g[1] - fy).abs() < 1e-8);
    }

    #[test]
    fn line_hits_agree_with_bisection() {
        let c = FrontCurve::parabolic([1.0, 0.0], [1.0, 0.0], 0.25).unwrap();
        let (x, e) = ([0.0, 0.3], [0.8, 0.6]);
        let hits = c.line_hits(x, e);
        assert_eq!(hits.len(), 2);
        for h in hits {
            assert!(c.level(along(x, e, h)).abs() < 1e-12);
        }
        let line = FrontCurve::planar([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(line.line_hits([-2.0, 5.0], [1.0, 0.0]), vec![2.0]);
    }

    #[test]
    fn chord_of_the_window() {
        let w = Window::new((0.0, 2.0), (0.0, 1.0)).unwrap();
        let (a, b) = w.chord([1.0, 0.5], [1.0, 0.0]).unwrap();
        assert_eq!((a, b), (-1.0, 1.0));
        assert!(w.chord([1.0, 3.0], [1.0, 0.0]).is_none());
    }
}

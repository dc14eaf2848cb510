use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `u(x) = a + b·x` on one interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
}

impl Affine {
    pub fn constant(a: f64) -> Self {
        Self { a, b: 0.0 }
    }

    /// The line through `(x0, u0)` with slope `b`.
    pub fn through(x0: f64, u0: f64, b: f64) -> Self {
        Self { a: u0 - b * x0, b }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a + self.b * x
    }

    /// `∫_lo^hi (a + b x) dx`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.a * (hi - lo) + 0.5 * self.b * (hi * hi - lo * lo)
    }
}

/// The initial-data families with an exact front-tracking solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `u0 + u1 θ(a1 - x) + u2 θ(a2 - x)`, `a2 < a1`.
    TwoSteps { u0: f64, u1: f64, u2: f64, a1: f64, a2: f64 },
    /// `u0 + u1_0 (a1 - x)₊ - u1_0 (a2 - x)₊`.
    Triangle { u0: f64, u1_0: f64, a1: f64, a2: f64 },
    /// `u0_0 θ(a1 - x) + u1_0 (a1 - x)₊ - u1_0 (a2 - x)₊`.
    Confluence { u0_0: f64, u1_0: f64, a1: f64, a2: f64 },
    /// A single Riemann problem `ul` / `ur` at `a`.
    Riemann { ul: f64, ur: f64, a: f64 },
}

/// Piecewise affine data: `pieces[0]` left of `breakpoints[0]`,
/// `pieces[i]` on `(breakpoints[i-1], breakpoints[i])`, the last piece on
/// the right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseInitialData {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Affine>,
    /// Whether the data is continuous at each breakpoint.
    pub continuous: Vec<bool>,
    family: Option<Family>,
}

impl PiecewiseInitialData {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Affine>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidInput("breakpoints must be finite and increasing".into()));
        }
        if pieces.iter().any(|p| !(p.a.is_finite() && p.b.is_finite())) {
            return Err(Error::InvalidInput("pieces must be finite".into()));
        }
        let continuous = breakpoints
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let (l, r) = (pieces[i].eval(x), pieces[i + 1].eval(x));
                (l - r).abs() <= 1e-14 * (1.0 + l.abs().max(r.abs()))
            })
            .collect();
        Ok(Self {
            breakpoints,
            pieces,
            continuous,
            family: None,
        })
    }

    fn tagged(mut self, f: Family) -> Self {
        self.family = Some(f);
        self
    }

    pub fn two_steps(u0: f64, u1: f64, u2: f64, a1: f64, a2: f64) -> Result<Self> {
        Ok(Self::new(
            vec![a2, a1],
            vec![
                Affine::constant(u0 + u1 + u2),
                Affine::constant(u0 + u1),
                Affine::constant(u0),
            ],
        )?
        .tagged(Family::TwoSteps { u0, u1, u2, a1, a2 }))
    }

    pub fn triangle(u0: f64, u1_0: f64, a1: f64, a2: f64) -> Result<Self> {
        Ok(Self::new(
            vec![a2, a1],
            vec![
                Affine::constant(u0 + u1_0 * (a1 - a2)),
                Affine::through(a1, u0, -u1_0),
                Affine::constant(u0),
            ],
        )?
        .tagged(Family::Triangle { u0, u1_0, a1, a2 }))
    }

    pub fn confluence(u0_0: f64, u1_0: f64, a1: f64, a2: f64) -> Result<Self> {
        Ok(Self::new(
            vec![a2, a1],
            vec![
                Affine::constant(u0_0 + u1_0 * (a1 - a2)),
                Affine::through(a1, u0_0, -u1_0),
                Affine::constant(0.0),
            ],
        )?
        .tagged(Family::Confluence { u0_0, u1_0, a1, a2 }))
    }

    pub fn riemann(ul: f64, ur: f64, a: f64) -> Result<Self> {
        Ok(Self::new(vec![a], vec![Affine::constant(ul), Affine::constant(ur)])?
            .tagged(Family::Riemann { ul, ur, a }))
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    /// Value at `x`; at a breakpoint the right piece is used.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        self.pieces[i].eval(x)
    }

    /// Exact `∫_lo^hi u dx`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut total = 0.0;
        let mut x = lo;
        let mut i = self.piece_index(lo);
        loop {
            let end = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY).min(hi);
            if end > x {
                total += self.pieces[i].integral(x, end);
                x = end;
            }
            if x >= hi || i >= self.breakpoints.len() {
                break;
            }
            i += 1;
        }
        total
    }

    /// Total variation on `[lo, hi]`.
    pub fn total_variation(&self, lo: f64, hi: f64) -> f64 {
        let mut tv = 0.0;
        let mut edges = vec![lo];
        edges.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        edges.push(hi);
        for w in edges.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            tv += self.pieces[self.piece_index(mid)].b.abs() * (w[1] - w[0]);
        }
        for (i, &b) in self.breakpoints.iter().enumerate() {
            if b > lo && b < hi {
                tv += (self.pieces[i + 1].eval(b) - self.pieces[i].eval(b)).abs();
            }
        }
        tv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_continuous_and_steps_are_not() {
        let t = PiecewiseInitialData::triangle(0.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(t.continuous, vec![true, true]);
        assert_eq!(t.eval(0.25), 0.75);
        assert_eq!(t.eval(-3.0), 1.0);
        let s = PiecewiseInitialData::two_steps(0.5, 1.0, 0.5, 0.0, -2.0).unwrap();
        assert_eq!(s.continuous, vec![false, false]);
        assert_eq!(s.eval(-1.0), 1.5);
    }

    #[test]
    fn integrals_and_variation() {
        let c = PiecewiseInitialData::confluence(1.0, 1.0, 1.0, 0.0).unwrap();
        // ∫_{-1}^{2}: 2 + 1.5 + 0
        assert!((c.integral(-1.0, 2.0) - 3.5).abs() < 1e-14);
        assert!((c.integral(0.25, 0.75) - 0.5 * (1.75 + 1.25) * 0.5).abs() < 1e-14);
        assert!((c.total_variation(-1.0, 2.0) - 2.0).abs() < 1e-14);
        let s = PiecewiseInitialData::two_steps(0.0, 1.0, 1.0, 0.0, -1.0).unwrap();
        assert_eq!(s.total_variation(-2.0, 2.0), 2.0);
    }

    #[test]
    fn rejects_malformed_pieces() {
        assert!(PiecewiseInitialData::new(vec![1.0, 0.0], vec![Affine::constant(0.0); 3]).is_err());
        assert!(PiecewiseInitialData::new(vec![0.0], vec![Affine::constant(0.0)]).is_err());
        assert!(PiecewiseInitialData::new(vec![0.0], vec![Affine::constant(f64::NAN); 2]).is_err());
    }
}

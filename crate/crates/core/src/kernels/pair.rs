use serde::{Deserialize, Serialize};

use super::mollifier::{Mollifier, MollifierKind};
use crate::error::{Error, Result};
use crate::ode::bisect;
use crate::quadrature::{integrate_with_breaks, QuadOptions};

/// Sign convention of the shift argument of the transfer functions.
///
/// `Section1` pairs `θ(x - a₁)`, `θ(x - a₂)` and has `B₁(+∞) = 0`,
/// `B₁(-∞) = 1`. `Section2a` pairs `θ(-x + φ₁)`, `θ(-x + φ₂)` and has
/// `B₁(-∞) = 0`, `B₁(+∞) = 1`; it is `Section1` evaluated at `-ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Section1,
    Section2a,
}

/// Two mollifiers and the orientation of their interaction kernels.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub left: Mollifier,
    pub right: Mollifier,
    pub orientation: Orientation,
}

fn quad() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

impl KernelPair {
    pub fn new(left: Mollifier, right: Mollifier, orientation: Orientation) -> Self {
        Self {
            left,
            right,
            orientation,
        }
    }

    /// Pair of identical catalog step profiles in the front-interaction orientation.
    pub fn symmetric(m: Mollifier) -> Self {
        Self::new(m.clone(), m, Orientation::Section2a)
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Self {
            orientation,
            ..self.clone()
        }
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.right.clone(), self.left.clone(), self.orientation)
    }

    /// Both sides are the same catalog profile with equal parameters.
    pub fn is_identical(&self) -> bool {
        self.left.same_profile(&self.right)
    }

    /// Truncation radius covering both profiles.
    pub fn radius(&self) -> f64 {
        self.left.support_radius().max(self.right.support_radius())
    }

    /// Cross-correlation `B(ρ) = ∫ ω₁(z) ω₂(z - ρ) dz` of a delta-like pair.
    pub fn kernel_b(&self, rho: f64) -> Result<f64> {
        self.left.require(MollifierKind::DeltaLike)?;
        self.right.require(MollifierKind::DeltaLike)?;
        let (l1, h1) = self.left.support();
        let (l2, h2) = self.right.support();
        let (lo, hi) = (l1.max(l2 + rho), h1.min(h2 + rho));
        if lo >= hi {
            return Ok(0.0);
        }
        integrate_with_breaks(
            |z| self.left.value(z) * self.right.value(z - rho),
            lo,
            hi,
            &[self.left.shift(), self.right.shift() + rho],
            quad(),
        )
    }

    /// The same cross-correlation through the second form `∫ ω₁(z + ρ) ω₂(z) dz`.
    pub fn kernel_b_shifted_form(&self, rho: f64) -> Result<f64> {
        self.left.require(MollifierKind::DeltaLike)?;
        self.right.require(MollifierKind::DeltaLike)?;
        let (l1, h1) = self.left.support();
        let (l2, h2) = self.right.support();
        let (lo, hi) = (l2.max(l1 - rho), h2.min(h1 - rho));
        if lo >= hi {
            return Ok(0.0);
        }
        integrate_with_breaks(
            |z| self.left.value(z + rho) * self.right.value(z),
            lo,
            hi,
            &[self.right.shift(), self.left.shift() - rho],
            quad(),
        )
    }

    fn section1_shift(&self, rho: f64) -> f64 {
        match self.orientation {
            Orientation::Section1 => rho,
            Orientation::Section2a => -rho,
        }
    }

    /// `B₁(ρ)` alone.
    pub fn b1(&self, rho: f64) -> Result<f64> {
        self.require_steps()?;
        let s = self.section1_shift(rho);
        let (l1, h1) = self.left.support();
        let (l2, h2) = self.right.support();
        // ∫ ω̇₁(z) ω₂(z - s) dz over the support of ω̇₁
        if h1 - s <= l2 {
            return Ok(0.0);
        }
        if l1 - s >= h2 {
            return Ok(1.0);
        }
        integrate_with_breaks(
            |z| self.left.derivative(z) * self.right.value(z - s),
            l1,
            h1,
            &[l2 + s, h2 + s, self.left.shift(), self.right.shift() + s],
            quad(),
        )
    }

    /// `B₂(ρ)` alone, computed by its own integral (not as `1 - B₁`).
    pub fn b2(&self, rho: f64) -> Result<f64> {
        self.require_steps()?;
        let s = self.section1_shift(rho);
        let (l1, h1) = self.left.support();
        let (l2, h2) = self.right.support();
        // ∫ ω₁(z + s) ω̇₂(z) dz over the support of ω̇₂
        if h2 + s <= l1 {
            return Ok(0.0);
        }
        if l2 + s >= h1 {
            return Ok(1.0);
        }
        integrate_with_breaks(
            |z| self.left.value(z + s) * self.right.derivative(z),
            l2,
            h2,
            &[l1 - s, h1 - s, self.right.shift(), self.left.shift() - s],
            quad(),
        )
    }

    /// Transfer functions `(B₁(ρ), B₂(ρ))`.
    pub fn transfer_functions(&self, rho: f64) -> Result<(f64, f64)> {
        Ok((self.b1(rho)?, self.b2(rho)?))
    }

    fn require_steps(&self) -> Result<()> {
        self.left.require(MollifierKind::HeavisideLike)?;
        self.right.require(MollifierKind::HeavisideLike)
    }

    /// The shift `ρ₀` with `B₁(ρ₀) = B₂(ρ₀) = 1/2`.
    ///
    /// Bisection on `[-10R, 10R]` (with `R` the summed radii) followed by
    /// secant refinement. Non-monotone profiles are rejected.
    pub fn equilibrium_root(&self) -> Result<f64> {
        self.require_steps()?;
        for m in [&self.left, &self.right] {
            if !m.is_monotone() {
                return Err(Error::NonMonotone(m.name().to_string()));
            }
        }
        let span = 10.0 * (self.left.support_radius() + self.right.support_radius());
        let g = |r: f64| self.b1(r).map(|b| b - 0.5);
        // Surface quadrature failures rather than folding them into the bracket.
        let (glo, ghi) = (g(-span)?, g(span)?);
        if glo.signum() == ghi.signum() {
            return Err(Error::NoRoot { lo: -span, hi: span });
        }
        let mut failure = None;
        let coarse = bisect(
            |r| match g(r) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            -span,
            span,
            1e-6,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let (mut x0, mut x1) = (coarse - 1e-6, coarse + 1e-6);
        let (mut f0, mut f1) = (g(x0)?, g(x1)?);
        for _ in 0..30 {
            if f1 == 0.0 || f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = g(x1)?;
            if (x1 - x0).abs() < 1e-15 * x1.abs().max(1.0) {
                break;
            }
        }
        if f1.abs() > 1e-10 {
            return Err(Error::NoConvergence {
                last: x1,
                target: 0.5,
            });
        }
        Ok(x1)
    }
}

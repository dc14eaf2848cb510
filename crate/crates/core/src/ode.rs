//! Embedded Dormand–Prince 5(4) integrator with adaptive step control.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: 1e-3,
            h_max: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Accepted steps of an integration, including the initial point.
#[derive(Clone, Debug)]
pub struct OdeTrajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    /// Right-hand side at each accepted point (for Hermite interpolation).
    pub dy: Vec<[f64; N]>,
}

impl<const N: usize> OdeTrajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    /// Cubic Hermite interpolation of the solution at `t` (clamped to the
    /// integrated range). Works for forward and backward integrations.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let n = self.t.len();
        if n == 1 {
            return self.y[0];
        }
        let increasing = self.t[n - 1] > self.t[0];
        let key = |s: f64| if increasing { s } else { -s };
        let target = key(t);
        if target <= key(self.t[0]) {
            return self.y[0];
        }
        if target >= key(self.t[n - 1]) {
            return self.y[n - 1];
        }
        let idx = self.t.partition_point(|&s| key(s) <= target).max(1) - 1;
        let (t0, t1) = (self.t[idx], self.t[idx + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let mut out = [0.0; N];
        #[allow(clippy::needless_range_loop)]
        for i in 0..N {
            out[i] = h00 * self.y[idx][i]
                + h10 * h * self.dy[idx][i]
                + h01 * self.y[idx + 1][i]
                + h11 * h * self.dy[idx + 1][i];
        }
        out
    }
}

impl<const N: usize> OdeTrajectory<N> {
    /// Derivative of the Hermite interpolant; outside the range the end
    /// slopes are returned.
    pub fn interpolate_derivative(&self, t: f64) -> [f64; N] {
        let n = self.t.len();
        if n == 1 {
            return self.dy[0];
        }
        let increasing = self.t[n - 1] > self.t[0];
        let key = |s: f64| if increasing { s } else { -s };
        let target = key(t);
        if target <= key(self.t[0]) {
            return self.dy[0];
        }
        if target >= key(self.t[n - 1]) {
            return self.dy[n - 1];
        }
        let idx = self.t.partition_point(|&s| key(s) <= target).max(1) - 1;
        let h = self.t[idx + 1] - self.t[idx];
        let s = (t - self.t[idx]) / h;
        let d00 = 6.0 * s * (s - 1.0) / h;
        let d10 = (1.0 - s) * (1.0 - 3.0 * s);
        let d01 = -d00;
        let d11 = s * (3.0 * s - 2.0);
        let mut out = [0.0; N];
        #[allow(clippy::needless_range_loop)]
        for i in 0..N {
            out[i] = d00 * self.y[idx][i]
                + d10 * self.dy[idx][i]
                + d01 * self.y[idx + 1][i]
                + d11 * self.dy[idx + 1][i];
        }
        out
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end` (either direction).
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: OdeOptions,
) -> Result<OdeTrajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut out = OdeTrajectory {
        t: vec![t],
        y: vec![y],
        dy: vec![k1],
    };
    if t0 == t_end {
        return Ok(out);
    }
    let mut h = opts.h_init.min(opts.h_max).min((t_end - t0).abs());
    let mut steps = 0usize;
    while dir * (t_end - t) > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Ode {
                t,
                reason: format!("step budget {} exhausted", opts.max_steps),
            });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += hs * acc;
            }
            k[s] = f(t + C[s] * hs, &ys)?;
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for j in 0..7 {
                s5 += B5[j] * k[j][i];
                s4 += B4[j] * k[j][i];
            }
            y5[i] += hs * s5;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = hs * (s5 - s4) / sc;
            err = err.max(e.abs());
        }
        if !err.is_finite() {
            return Err(Error::Ode {
                t,
                reason: "non-finite error estimate".into(),
            });
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + hs };
            y = y5;
            k1 = k[6];
            out.t.push(t);
            out.y.push(y);
            out.dy.push(k1);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(opts.h_max);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Ode {
                t,
                reason: "step size underflow".into(),
            });
        }
    }
    Ok(out)
}

/// Bisection for a sign change of `g` on `[lo, hi]` down to width `tol`.
pub fn bisect<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || !glo.is_finite() || !ghi.is_finite() {
        return Err(Error::NoRoot { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

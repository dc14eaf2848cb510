use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Highest derivative order available from analytic test functions.
pub const MAX_DERIVATIVE: usize = 12;

/// Derivative order trusted for finite-difference fallbacks.
pub const FD_TRUSTED_ORDER: usize = 4;

#[derive(Clone)]
enum Repr {
    Bump {
        center: f64,
        radius: f64,
        amplitude: f64,
    },
    Cosine {
        frequency: f64,
    },
    Combination(Vec<(f64, TestFunction)>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A smooth test function `η` with derivatives up to order 12.
#[derive(Clone)]
pub struct TestFunction {
    repr: Repr,
    support: (f64, f64),
    compact: bool,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Bump { .. } => "bump",
            Repr::Cosine { .. } => "cosine",
            Repr::Combination(_) => "combination",
            Repr::Custom(_) => "custom",
        };
        f.debug_struct("TestFunction")
            .field("kind", &kind)
            .field("support", &self.support)
            .finish()
    }
}

/// Taylor coefficients (f⁽ᵏ⁾/k!) of `exp(-1/(1-y²))` at `y0` for `y = y0 + s·h`.
fn bump_taylor(y0: f64, s: f64, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    let q0 = 1.0 - y0 * y0;
    if q0 <= 0.0 {
        return out;
    }
    let e0 = (-1.0 / q0).exp();
    if e0 == 0.0 {
        return out;
    }
    let mut q = vec![0.0; order + 1];
    q[0] = q0;
    if order >= 1 {
        q[1] = -2.0 * y0 * s;
    }
    if order >= 2 {
        q[2] = -s * s;
    }
    // w = -1/q
    let mut inv = vec![0.0; order + 1];
    inv[0] = 1.0 / q0;
    for n in 1..=order {
        let acc: f64 = (1..=n.min(2)).map(|j| q[j] * inv[n - j]).sum();
        inv[n] = -acc / q0;
    }
    let w: Vec<f64> = inv.iter().map(|v| -v).collect();
    out[0] = e0;
    for n in 1..=order {
        let acc: f64 = (1..=n).map(|k| k as f64 * w[k] * out[n - k]).sum();
        out[n] = acc / n as f64;
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl TestFunction {
    /// `amplitude · exp(-1/(1 - ((x - center)/radius)²))` on `[center - radius, center + radius]`.
    pub fn bump(center: f64, radius: f64, amplitude: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        Self {
            repr: Repr::Bump {
                center,
                radius,
                amplitude,
            },
            support: (center - radius, center + radius),
            compact: true,
        }
    }

    /// Bump normalized so that `η(center) = 1`.
    pub fn unit_bump(center: f64, radius: f64) -> Self {
        Self::bump(center, radius, std::f64::consts::E)
    }

    /// `cos(frequency · x)` restricted to an integration window. Not compactly
    /// supported; intended for pointwise expansions.
    pub fn cosine(frequency: f64, window: (f64, f64)) -> Self {
        Self {
            repr: Repr::Cosine { frequency },
            support: window,
            compact: false,
        }
    }

    /// A user function; derivatives come from Richardson-extrapolated
    /// central differences and are trusted up to order 4.
    pub fn custom(f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, support: (f64, f64)) -> Result<Self> {
        let t = Self {
            repr: Repr::Custom(f),
            support,
            compact: true,
        };
        t.check_support()?;
        Ok(t)
    }

    /// `Σ cᵢ ηᵢ` over the union of the supports.
    pub fn combination(terms: Vec<(f64, TestFunction)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty test-function combination".into()));
        }
        let lo = terms.iter().map(|(_, t)| t.support.0).fold(f64::INFINITY, f64::min);
        let hi = terms.iter().map(|(_, t)| t.support.1).fold(f64::NEG_INFINITY, f64::max);
        let compact = terms.iter().all(|(_, t)| t.compact);
        Ok(Self {
            repr: Repr::Combination(terms),
            support: (lo, hi),
            compact,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn trusted_order(&self) -> usize {
        match &self.repr {
            Repr::Bump { .. } | Repr::Cosine { .. } => MAX_DERIVATIVE,
            Repr::Combination(terms) => terms.iter().map(|(_, t)| t.trusted_order()).min().unwrap_or(0),
            Repr::Custom(_) => FD_TRUSTED_ORDER,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Bump {
                center,
                radius,
                amplitude,
            } => {
                let y = (x - center) / radius;
                let q = 1.0 - y * y;
                if q <= 0.0 {
                    0.0
                } else {
                    amplitude * (-1.0 / q).exp()
                }
            }
            Repr::Cosine { frequency } => (frequency * x).cos(),
            Repr::Combination(terms) => terms.iter().map(|(c, t)| c * t.value(x)).sum(),
            Repr::Custom(f) => {
                if x <= self.support.0 || x >= self.support.1 {
                    0.0
                } else {
                    f(x)
                }
            }
        }
    }

    /// Derivatives `η, η', …, η⁽ⁿ⁾` at `x`.
    pub fn derivatives(&self, x: f64, n: usize) -> Result<Vec<f64>> {
        if n > self.trusted_order() {
            return Err(Error::InvalidInput(format!(
                "derivative order {n} exceeds the trusted order {}",
                self.trusted_order()
            )));
        }
        Ok(match &self.repr {
            Repr::Bump {
                center,
                radius,
                amplitude,
            } => {
                let y0 = (x - center) / radius;
                bump_taylor(y0, 1.0 / radius, n)
                    .into_iter()
                    .enumerate()
                    .map(|(k, c)| amplitude * c * factorial(k))
                    .collect()
            }
            Repr::Cosine { frequency } => (0..=n)
                .map(|k| {
                    let phase = (frequency * x) + k as f64 * std::f64::consts::FRAC_PI_2;
                    frequency.powi(k as i32) * phase.cos()
                })
                .collect(),
            Repr::Combination(terms) => {
                let mut acc = vec![0.0; n + 1];
                for (c, t) in terms {
                    for (a, d) in acc.iter_mut().zip(t.derivatives(x, n)?) {
                        *a += c * d;
                    }
                }
                acc
            }
            Repr::Custom(_) => (0..=n).map(|k| self.richardson_derivative(k, x)).collect(),
        })
    }

    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        Ok(self.derivatives(x, k)?[k])
    }

    fn central_difference(&self, k: usize, x: f64, h: f64) -> f64 {
        if k == 0 {
            return self.value(x);
        }
        let mut acc = 0.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(k, j) * self.value(x + (k as f64 / 2.0 - j as f64) * h);
        }
        acc / h.powi(k as i32)
    }

    fn richardson_derivative(&self, k: usize, x: f64) -> f64 {
        let h = 2e-2 * (self.support.1 - self.support.0).max(1e-3);
        let coarse = self.central_difference(k, x, h);
        let fine = self.central_difference(k, x, 0.5 * h);
        (4.0 * fine - coarse) / 3.0
    }

    /// Value and derivatives must vanish at the support endpoints.
    pub fn check_support(&self) -> Result<()> {
        if !self.compact {
            return Ok(());
        }
        let (lo, hi) = self.support;
        if !(hi > lo) {
            return Err(Error::InvalidInput("empty test-function support".into()));
        }
        if let Repr::Custom(_) = self.repr {
            // difference stencils straddle the endpoint; check values only
            let w = 1e-3 * (hi - lo);
            for x in [lo - w, lo, hi, hi + w] {
                let v = self.value(x);
                if v.abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "test function is {v} at or beyond support endpoint {x}"
                    )));
                }
            }
            return Ok(());
        }
        for x in [lo, hi] {
            let order = self.trusted_order().min(2);
            for (k, d) in self.derivatives(x, order)?.into_iter().enumerate() {
                if d.abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "test function derivative {k} is {d} at support endpoint {x}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A finite family of test functions over which weak smallness is measured.
#[derive(Clone, Debug)]
pub struct TestBank {
    functions: Vec<TestFunction>,
}

impl TestBank {
    pub fn new(functions: Vec<TestFunction>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidInput("test bank must not be empty".into()));
        }
        Ok(Self { functions })
    }

    /// Eight overlapping translated bumps covering `[lo, hi]` plus two wider
    /// ones centred at the quarter points.
    pub fn default_for_window(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
        }
        let n = 8;
        let h = (hi - lo) / n as f64;
        let mut functions: Vec<TestFunction> = (0..n)
            .map(|i| TestFunction::unit_bump(lo + (i as f64 + 0.5) * h, h))
            .collect();
        let span = hi - lo;
        functions.push(TestFunction::unit_bump(lo + 0.25 * span, 0.3 * span));
        functions.push(TestFunction::unit_bump(lo + 0.75 * span, 0.3 * span));
        Ok(Self { functions })
    }

    pub fn functions(&self) -> &[TestFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Whether the union of the supports contains `[lo, hi]`.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let mut spans: Vec<(f64, f64)> = self.functions.iter().map(|f| f.support()).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = lo;
        for (a, b) in spans {
            if a > reach {
                break;
            }
            reach = reach.max(b);
        }
        reach >= hi
    }
}

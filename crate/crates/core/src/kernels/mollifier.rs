//! Mollifier profiles: smooth regularizations of the delta function and of
//! the Heaviside step.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Largest moment order kept in the cache.
pub const MAX_MOMENT: usize = 12;

/// Step used for the central-difference derivative of user profiles.
pub const FD_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    DeltaLike,
    HeavisideLike,
}

impl MollifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MollifierKind::DeltaLike => "delta_like",
            MollifierKind::HeavisideLike => "heaviside_like",
        }
    }
}

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Profile {
    Gaussian,
    Bump,
    Erf,
    Tanh,
    SmoothStep,
    Custom {
        value: ProfileFn,
        derivative: Option<ProfileFn>,
    },
}

/// Entry of the built-in profile catalog.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: MollifierKind,
    pub radius: f64,
    pub description: &'static str,
}

pub const CATALOG: [CatalogEntry; 5] = [
    CatalogEntry {
        name: "gaussian",
        kind: MollifierKind::DeltaLike,
        radius: 12.0,
        description: "exp(-z^2)/sqrt(pi)",
    },
    CatalogEntry {
        name: "bump",
        kind: MollifierKind::DeltaLike,
        radius: 1.0,
        description: "C exp(-1/(1-z^2)) on |z|<1, unit mass",
    },
    CatalogEntry {
        name: "erf",
        kind: MollifierKind::HeavisideLike,
        radius: 12.0,
        description: "(1+erf z)/2",
    },
    CatalogEntry {
        name: "tanh",
        kind: MollifierKind::HeavisideLike,
        radius: 18.0,
        description: "(1+tanh z)/2",
    },
    CatalogEntry {
        name: "smoothstep",
        kind: MollifierKind::HeavisideLike,
        radius: 1.0,
        description: "h(1+z)/(h(1+z)+h(1-z)), h(t)=exp(-1/t); constant outside [-1,1]",
    },
];

fn bump_raw(z: f64) -> f64 {
    let q = 1.0 - z * z;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

fn bump_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| {
        integrate(bump_raw, -1.0, 1.0, QuadOptions::with_abs_tol(1e-15))
            .expect("bump normalization integral")
    })
}

fn smooth_h(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn smooth_h_prime(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp() / (t * t)
    }
}

impl Profile {
    fn value(&self, z: f64) -> f64 {
        match self {
            Profile::Gaussian => (-z * z).exp() / PI.sqrt(),
            Profile::Bump => bump_raw(z) / bump_norm(),
            Profile::Erf => 0.5 * libm::erfc(-z),
            Profile::Tanh => 0.5 * (1.0 + z.tanh()),
            Profile::SmoothStep => {
                if z <= -1.0 {
                    0.0
                } else if z >= 1.0 {
                    1.0
                } else {
                    let l = smooth_h(1.0 + z);
                    l / (l + smooth_h(1.0 - z))
                }
            }
            Profile::Custom { value, .. } => value(z),
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        match self {
            Profile::Gaussian => -2.0 * z * (-z * z).exp() / PI.sqrt(),
            Profile::Bump => {
                let q = 1.0 - z * z;
                if q <= 0.0 {
                    0.0
                } else {
                    bump_raw(z) / bump_norm() * (-2.0 * z / (q * q))
                }
            }
            Profile::Erf => (-z * z).exp() / PI.sqrt(),
            Profile::Tanh => {
                let c = z.cosh();
                if c.is_infinite() {
                    0.0
                } else {
                    0.5 / (c * c)
                }
            }
            Profile::SmoothStep => {
                if z <= -1.0 || z >= 1.0 {
                    0.0
                } else {
                    let (l, r) = (smooth_h(1.0 + z), smooth_h(1.0 - z));
                    let (dl, dr) = (smooth_h_prime(1.0 + z), smooth_h_prime(1.0 - z));
                    let s = l + r;
                    (dl * r + l * dr) / (s * s)
                }
            }
            Profile::Custom { value, derivative } => match derivative {
                Some(d) => d(z),
                None => (value(z + FD_STEP) - value(z - FD_STEP)) / (2.0 * FD_STEP),
            },
        }
    }
}

/// A mollifier `ω`, optionally shifted and rescaled: `ω(z) = ω₀((z - shift)/width)`
/// for step-like profiles and `ω₀((z - shift)/width)/width` for delta-like ones.
#[derive(Clone)]
pub struct Mollifier {
    name: String,
    kind: MollifierKind,
    profile: Profile,
    shift: f64,
    width: f64,
    base_radius: f64,
    lower_accuracy: bool,
    moments: OnceLock<Vec<f64>>,
}

impl fmt::Debug for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mollifier")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("shift", &self.shift)
            .field("width", &self.width)
            .field("support_radius", &self.support_radius())
            .finish()
    }
}

impl Mollifier {
    /// Look up a catalog profile by name.
    pub fn from_name(name: &str, shift: f64, width: f64) -> Result<Self> {
        let entry = CATALOG
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownMollifier(name.to_string()))?;
        if !(width > 0.0 && width.is_finite()) || !shift.is_finite() {
            return Err(Error::InvalidInput(format!(
                "mollifier `{name}`: width must be positive and shift finite"
            )));
        }
        let profile = match name {
            "gaussian" => Profile::Gaussian,
            "bump" => Profile::Bump,
            "erf" => Profile::Erf,
            "tanh" => Profile::Tanh,
            "smoothstep" => Profile::SmoothStep,
            _ => unreachable!(),
        };
        Ok(Self {
            name: name.to_string(),
            kind: entry.kind,
            profile,
            shift,
            width,
            base_radius: entry.radius,
            lower_accuracy: false,
            moments: OnceLock::new(),
        })
    }

    pub fn gaussian() -> Self {
        Self::from_name("gaussian", 0.0, 1.0).unwrap()
    }

    pub fn erf_step() -> Self {
        Self::from_name("erf", 0.0, 1.0).unwrap()
    }

    pub fn tanh_step() -> Self {
        Self::from_name("tanh", 0.0, 1.0).unwrap()
    }

    /// A user-supplied profile. Without an analytic derivative the
    /// derivative falls back to central differences and the mollifier is
    /// flagged as lower-accuracy.
    pub fn custom(
        name: &str,
        kind: MollifierKind,
        support_radius: f64,
        value: ProfileFn,
        derivative: Option<ProfileFn>,
    ) -> Result<Self> {
        if !(support_radius > 0.0 && support_radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "mollifier `{name}`: support radius must be positive"
            )));
        }
        let lower_accuracy = derivative.is_none();
        let m = Self {
            name: name.to_string(),
            kind,
            profile: Profile::Custom { value, derivative },
            shift: 0.0,
            width: 1.0,
            base_radius: support_radius,
            lower_accuracy,
            moments: OnceLock::new(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MollifierKind {
        self.kind
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn is_lower_accuracy(&self) -> bool {
        self.lower_accuracy
    }

    /// Truncation radius `R` about the origin: outside `[-R, R]` the profile
    /// (or its distance to the limiting constant) is negligible.
    pub fn support_radius(&self) -> f64 {
        self.shift.abs() + self.width * self.base_radius
    }

    /// Interval outside which the profile is constant to within 1e-14.
    pub fn support(&self) -> (f64, f64) {
        let r = self.width * self.base_radius;
        (self.shift - r, self.shift + r)
    }

    /// Whether two mollifiers are the same catalog profile with equal
    /// parameters. User profiles never compare equal.
    pub fn same_profile(&self, other: &Mollifier) -> bool {
        !matches!(self.profile, Profile::Custom { .. })
            && self.name == other.name
            && self.shift == other.shift
            && self.width == other.width
    }

    /// Whether the base profile is even (delta-like) or odd about 1/2
    /// (step-like) around `shift`.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.profile, Profile::Custom { .. })
    }

    #[inline]
    pub fn value(&self, z: f64) -> f64 {
        let s = (z - self.shift) / self.width;
        match self.kind {
            MollifierKind::DeltaLike => self.profile.value(s) / self.width,
            MollifierKind::HeavisideLike => self.profile.value(s),
        }
    }

    #[inline]
    pub fn derivative(&self, z: f64) -> f64 {
        let s = (z - self.shift) / self.width;
        match self.kind {
            MollifierKind::DeltaLike => self.profile.derivative(s) / (self.width * self.width),
            MollifierKind::HeavisideLike => self.profile.derivative(s) / self.width,
        }
    }

    pub(crate) fn require(&self, kind: MollifierKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongKind {
                name: self.name.clone(),
                expected: kind.as_str(),
                actual: self.kind.as_str(),
            })
        }
    }

    /// Check the normalization / limit invariants of the profile.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support();
        match self.kind {
            MollifierKind::DeltaLike => {
                let mass = integrate(|z| self.value(z), lo, hi, QuadOptions::default())?;
                if (mass - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidInput(format!(
                        "mollifier `{}` has mass {mass}, expected 1",
                        self.name
                    )));
                }
            }
            MollifierKind::HeavisideLike => {
                let (left, right) = (self.value(lo), self.value(hi));
                if left.abs() > 1e-12 || (right - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "mollifier `{}` has limits {left} and {right} at the support ends, expected 0 and 1",
                        self.name
                    )));
                }
                let variation =
                    integrate(|z| self.derivative(z).abs(), lo, hi, QuadOptions::with_abs_tol(1e-9))?;
                if !variation.is_finite() {
                    return Err(Error::NonFinite(format!("derivative of `{}`", self.name)));
                }
            }
        }
        Ok(())
    }

    /// Whether the derivative is nonnegative on a sampling grid over the support.
    pub fn is_monotone(&self) -> bool {
        let (lo, hi) = self.support();
        let n = 4000;
        (0..=n).all(|i| {
            let z = lo + (hi - lo) * i as f64 / n as f64;
            self.derivative(z) >= -1e-14
        })
    }

    /// Moments `Ω_k = ∫ ω(z) z^k dz` for `k = 0..=k_max`.
    pub fn moments(&self, k_max: usize) -> Result<Vec<f64>> {
        self.require(MollifierKind::DeltaLike)?;
        if k_max > MAX_MOMENT {
            return Err(Error::InvalidInput(format!(
                "moment order {k_max} exceeds {MAX_MOMENT}"
            )));
        }
        if let Some(cached) = self.moments.get() {
            return Ok(cached[..=k_max].to_vec());
        }
        let (lo, hi) = self.support();
        let mut all = Vec::with_capacity(MAX_MOMENT + 1);
        for k in 0..=MAX_MOMENT {
            let opts = QuadOptions {
                abs_tol: 1e-12,
                rel_tol: 1e-13,
                max_intervals: 4000,
            };
            let m = integrate(|z| self.value(z) * z.powi(k as i32), lo, hi, opts)?;
            all.push(m);
        }
        let cached = self.moments.get_or_init(|| all);
        Ok(cached[..=k_max].to_vec())
    }
}

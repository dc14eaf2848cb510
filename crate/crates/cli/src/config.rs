//! TOML run configuration: parsing with strict key checking, then semantic
//! validation into a [`Plan`] of ready-to-run core objects.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use weakwave::dynamics1d::{ConfluenceConfig, ShockShockConfig, TriangleConfig};
use weakwave::fronts2d::{FrontCurve, FrontSystem2D, RhoForm, Window};
use weakwave::kernels::{KernelPair, Mollifier, MollifierKind, Orientation};
use weakwave::weak_calculus::check_epsilons;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub study: StudySection,
    pub window: Option<WindowSection>,
    pub fronts2d: Option<Fronts2dSection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ShockShock,
    Triangle,
    Confluence,
    Decay,
    Fronts2d,
    Formulas1,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ShockShock => "shock_shock",
            ScenarioKind::Triangle => "triangle",
            ScenarioKind::Confluence => "confluence",
            ScenarioKind::Decay => "decay",
            ScenarioKind::Fronts2d => "fronts2d",
            ScenarioKind::Formulas1 => "formulas1",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scenario: ScenarioKind,
    pub epsilons: Vec<f64>,
    /// Times at which profiles (or front snapshots) are written.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Trajectory intervals; the file holds `samples + 1` rows.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_samples() -> usize {
    200
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationName {
    Section1,
    Section2a,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(default = "default_step")]
    pub name: String,
    /// Profile of the second front; defaults to `name`.
    #[serde(default)]
    pub right: Option<String>,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub shift: f64,
    #[serde(default)]
    pub orientation: Option<OrientationName>,
    /// Delta-like profile used by the formula studies.
    #[serde(default = "default_delta")]
    pub delta: String,
}

fn default_step() -> String {
    "erf".into()
}

fn default_delta() -> String {
    "gaussian".into()
}

fn one() -> f64 {
    1.0
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            name: default_step(),
            right: None,
            width: 1.0,
            shift: 0.0,
            orientation: None,
            delta: default_delta(),
        }
    }
}

/// Amplitudes and positions. `u1` is the ramp slope for triangle and
/// decay runs; `u0`, `u1` are the initial values for confluence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub u0: Option<f64>,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    /// Reversal time `T` of the decay run.
    pub horizon: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    /// Times at which the weak residual is measured; defaults to `run.times`.
    #[serde(default)]
    pub residual_times: Option<Vec<f64>>,
    #[serde(default = "default_min_order")]
    pub min_order: f64,
    /// Test-function window; defaults to the spatial window.
    #[serde(default)]
    pub test_window: Option<[f64; 2]>,
    /// Point `a` at which the formula studies concentrate.
    #[serde(default = "default_point")]
    pub point: f64,
}

fn default_min_order() -> f64 {
    0.9
}

fn default_point() -> f64 {
    0.3
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            residual_times: None,
            min_order: default_min_order(),
            test_window: None,
            point: default_point(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub x: [f64; 2],
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    2001
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    #[serde(default)]
    pub curvature: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoFormName {
    Derived,
    Printed,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fronts2dSection {
    pub a: [f64; 2],
    pub gamma1: CurveSection,
    pub gamma2: CurveSection,
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub s_range: [f64; 2],
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_rho_form")]
    pub rho_form: RhoFormName,
}

fn default_rays() -> usize {
    64
}

fn default_rho_form() -> RhoFormName {
    RhoFormName::Derived
}

/// Scenario objects built from a validated config.
#[derive(Clone, Debug)]
pub enum ScenarioPlan {
    ShockShock(ShockShockConfig),
    Triangle(TriangleConfig),
    Confluence(ConfluenceConfig),
    Decay { triangle: TriangleConfig, horizon: f64 },
    Fronts2d { system: Box<FrontSystem2D>, rays: usize },
    Formulas1 { delta: Mollifier },
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub config: RunConfig,
    /// Canonical config text stored next to the artifacts.
    pub source: String,
    pub kernel: KernelPair,
    pub scenario: ScenarioPlan,
    pub t_end: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// 1-based line of `key` inside `[section]` (or of the section header).
fn locate(source: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in source.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if key.is_none() && current == section {
                return Some(i + 1);
            }
            continue;
        }
        if let Some(k) = key {
            let head = t.split('=').next().unwrap_or("").trim();
            if current == section && head == k {
                return Some(i + 1);
            }
        }
    }
    None
}

struct Diag<'a> {
    source: &'a str,
}

impl Diag<'_> {
    fn err(&self, field: &str, msg: impl std::fmt::Display) -> CliError {
        let (section, key) = match field.split_once('.') {
            Some((s, k)) => (s, Some(k)),
            None => (field, None),
        };
        let line = locate(self.source, section, key)
            .or_else(|| locate(self.source, section, None))
            .map(|l| format!("line {l}, "))
            .unwrap_or_default();
        CliError::Config(format!("{line}field `{field}`: {msg}"))
    }

    fn need(&self, v: Option<f64>, field: &str) -> CliResult<f64> {
        match v {
            Some(x) if x.is_finite() => Ok(x),
            Some(x) => Err(self.err(field, format!("must be finite, got {x}"))),
            None => Err(self.err(field, "required for this scenario")),
        }
    }
}

fn mollifier(d: &Diag, field: &str, name: &str, shift: f64, width: f64) -> CliResult<Mollifier> {
    Mollifier::from_name(name, shift, width).map_err(|e| d.err(field, e))
}

/// Parse and validate; `epsilons` overrides `run.epsilons`.
pub fn load(source: &str, epsilons: Option<Vec<f64>>) -> CliResult<Plan> {
    let mut config: RunConfig =
        toml::from_str(source).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
    if let Some(eps) = epsilons {
        config.run.epsilons = eps;
    }
    validate(config, source)
}

fn validate(config: RunConfig, source: &str) -> CliResult<Plan> {
    let d = Diag { source };
    let run = &config.run;
    let kind = run.scenario;
    check_epsilons(&run.epsilons).map_err(|e| d.err("run.epsilons", e))?;
    if run.samples == 0 {
        return Err(d.err("run.samples", "must be positive"));
    }

    let k = &config.kernel;
    if !(k.width > 0.0 && k.width.is_finite()) || !k.shift.is_finite() {
        return Err(d.err("kernel.width", "width must be positive and shift finite"));
    }
    let left = mollifier(&d, "kernel.name", &k.name, k.shift, k.width)?;
    let right = match &k.right {
        Some(r) => mollifier(&d, "kernel.right", r, k.shift, k.width)?,
        None => left.clone(),
    };
    let delta = mollifier(&d, "kernel.delta", &k.delta, 0.0, 1.0)?;
    if delta.kind() != MollifierKind::DeltaLike {
        return Err(d.err("kernel.delta", format!("`{}` is not delta-like", k.delta)));
    }
    for (m, f) in [(&left, "kernel.name"), (&right, "kernel.right")] {
        if m.kind() != MollifierKind::HeavisideLike {
            return Err(d.err(f, format!("`{}` is not a step profile", m.name())));
        }
    }
    let orientation = match k.orientation {
        Some(OrientationName::Section1) => Orientation::Section1,
        _ => Orientation::Section2a,
    };
    let kernel = KernelPair::new(left, right, orientation);

    let t_end = match (kind, run.t_end) {
        (ScenarioKind::Formulas1, t) => t.unwrap_or(0.0),
        (_, Some(t)) if t > 0.0 && t.is_finite() => t,
        (_, Some(t)) => return Err(d.err("run.t_end", format!("must be positive, got {t}"))),
        (_, None) => return Err(d.err("run.t_end", "required for this scenario")),
    };
    if kind != ScenarioKind::Formulas1 {
        if let Some(t) = run.times.iter().find(|t| !(**t >= 0.0 && **t <= t_end)) {
            return Err(d.err("run.times", format!("time {t} outside [0, t_end = {t_end}]")));
        }
    }
    if let Some(rt) = &config.study.residual_times {
        if let Some(t) = rt.iter().find(|t| !(**t >= 0.0 && **t <= t_end)) {
            return Err(d.err("study.residual_times", format!("time {t} outside [0, {t_end}]")));
        }
    }

    let (window, points) = match &config.window {
        Some(w) => {
            if !(w.x[0] < w.x[1]) || !w.x.iter().all(|v| v.is_finite()) {
                return Err(d.err("window.x", "window must be a nonempty finite interval"));
            }
            if w.points < 2 {
                return Err(d.err("window.points", "need at least 2 points"));
            }
            ((w.x[0], w.x[1]), w.points)
        }
        None if matches!(kind, ScenarioKind::Fronts2d | ScenarioKind::Formulas1) => ((-1.5, 1.5), 2),
        None => return Err(d.err("window", "section required for 1D scenarios")),
    };
    if let Some([lo, hi]) = config.study.test_window {
        if !(lo < hi) {
            return Err(d.err("study.test_window", "window must be nonempty"));
        }
    }

    let s = &config.scenario;
    let core = |e: weakwave::error::Error| d.err("scenario", e);
    let scenario = match kind {
        ScenarioKind::ShockShock => {
            let c = ShockShockConfig {
                u0: d.need(s.u0, "scenario.u0")?,
                u1: d.need(s.u1, "scenario.u1")?,
                u2: d.need(s.u2, "scenario.u2")?,
                a1: d.need(s.a1, "scenario.a1")?,
                a2: d.need(s.a2, "scenario.a2")?,
            };
            c.validate().map_err(core)?;
            ScenarioPlan::ShockShock(c)
        }
        ScenarioKind::Triangle | ScenarioKind::Decay => {
            let c = TriangleConfig {
                u0: d.need(s.u0, "scenario.u0")?,
                u1_0: d.need(s.u1, "scenario.u1")?,
                a1: d.need(s.a1, "scenario.a1")?,
                a2: d.need(s.a2, "scenario.a2")?,
            };
            c.validate().map_err(core)?;
            if kind == ScenarioKind::Triangle {
                ScenarioPlan::Triangle(c)
            } else {
                let horizon = d.need(s.horizon, "scenario.horizon")?;
                if !(horizon > c.t1()) {
                    return Err(d.err(
                        "scenario.horizon",
                        format!("must exceed the merge time {}", c.t1()),
                    ));
                }
                if t_end > horizon {
                    return Err(d.err("run.t_end", format!("must not exceed horizon {horizon}")));
                }
                ScenarioPlan::Decay { triangle: c, horizon }
            }
        }
        ScenarioKind::Confluence => {
            let c = ConfluenceConfig {
                u0_0: d.need(s.u0, "scenario.u0")?,
                u1_0: d.need(s.u1, "scenario.u1")?,
                a1: d.need(s.a1, "scenario.a1")?,
                a2: d.need(s.a2, "scenario.a2")?,
            };
            c.validate().map_err(core)?;
            ScenarioPlan::Confluence(c)
        }
        ScenarioKind::Fronts2d => {
            let f = config
                .fronts2d
                .as_ref()
                .ok_or_else(|| d.err("fronts2d", "section required for the fronts2d scenario"))?;
            let curve = |c: &CurveSection, field: &str| {
                if c.curvature == 0.0 {
                    FrontCurve::planar(c.point, c.normal)
                } else {
                    FrontCurve::parabolic(c.point, c.normal, c.curvature)
                }
                .map_err(|e| d.err(field, e))
            };
            let (u0, u1, u2) = (
                d.need(s.u0, "scenario.u0")?,
                d.need(s.u1, "scenario.u1")?,
                d.need(s.u2, "scenario.u2")?,
            );
            if f.rays == 0 {
                return Err(d.err("fronts2d.rays", "must be positive"));
            }
            let system = FrontSystem2D {
                a: f.a,
                gamma1: curve(&f.gamma1, "fronts2d.gamma1")?,
                gamma2: curve(&f.gamma2, "fronts2d.gamma2")?,
                u0,
                u1,
                u2,
                epsilon: *run.epsilons.last().expect("checked above"),
                kernel: kernel.clone(),
                window: Window::new((f.x1[0], f.x1[1]), (f.x2[0], f.x2[1]))
                    .map_err(|e| d.err("fronts2d.x1", e))?,
                s_range: (f.s_range[0], f.s_range[1]),
                rho_form: match f.rho_form {
                    RhoFormName::Derived => RhoForm::Derived,
                    RhoFormName::Printed => RhoForm::printed_default(u0, u1, u2),
                },
            };
            system.validate().map_err(|e| d.err("fronts2d", e))?;
            ScenarioPlan::Fronts2d {
                system: Box::new(system),
                rays: f.rays,
            }
        }
        ScenarioKind::Formulas1 => ScenarioPlan::Formulas1 { delta },
    };

    Ok(Plan {
        source: source.to_string(),
        kernel,
        scenario,
        t_end,
        window,
        points,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHOCK: &str = r#"
[run]
scenario = "shock_shock"
epsilons = [0.1, 0.05, 0.025]
times = [0.0, 2.0]
t_end = 2.0

[scenario]
u0 = 0.5
u1 = 1.0
u2 = 0.5
a1 = 0.0
a2 = -2.0

[window]
x = [-3.0, 6.0]
"#;

    #[test]
    fn parses_a_shock_shock_run() {
        let p = load(SHOCK, None).unwrap();
        assert!(matches!(p.scenario, ScenarioPlan::ShockShock(_)));
        assert_eq!(p.points, 2001);
        assert_eq!(p.kernel.left.name(), "erf");
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let bad = SHOCK.replace("t_end = 2.0", "t_end = 2.0\nspeed = 3");
        let e = load(&bad, None).unwrap_err().to_string();
        assert!(e.contains("speed") && e.contains("line"), "{e}");
    }

    #[test]
    fn unknown_mollifier_names_the_field() {
        let bad = SHOCK.replace("[window]", "[kernel]\nname = \"lorentz\"\n\n[window]");
        let e = load(&bad, None).unwrap_err().to_string();
        assert!(e.contains("kernel.name") && e.contains("lorentz"), "{e}");
        assert!(e.contains("line 16"), "{e}");
    }

    #[test]
    fn epsilons_must_decrease() {
        let e = load(SHOCK, Some(vec![0.1, 0.2, 0.05])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("run.epsilons"));
    }

    #[test]
    fn missing_amplitude_is_reported() {
        let bad = SHOCK.replace("u2 = 0.5\n", "");
        let e = load(&bad, None).unwrap_err().to_string();
        assert!(e.contains("scenario.u2"), "{e}");
    }
}

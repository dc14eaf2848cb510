//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the summary always prints; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use weakwave::dynamics1d::{
    residual_study, Confluence, ConfluenceConfig, Decay, ShockShock, ShockShockConfig, Triangle,
    TriangleConfig, WeakAnsatz, DEFAULT_TAU_MAX,
};
use weakwave::error::Result;
use weakwave::fronts2d::{
    ray_trace, simulate, snapshots, to_delimited, FrontCurve, FrontSystem2D, InteractionProfile,
    RayAmplitudes, RhoForm, Window,
};
use weakwave::kernels::{KernelPair, Mollifier, Orientation};
use weakwave::reference::{godunov_solve, l1_distance, l1_grid_error, PiecewiseInitialData, ReferenceSolution};
use weakwave::weak_calculus::{
    convergence_study, delta_expansion, delta_pairing_direct, fit_order, product_asymptotics_delta,
    product_asymptotics_theta, product_pairing_direct, TestBank, TestFunction,
};

const EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

#[derive(Default)]
struct Outcome {
    checks: Vec<(String, bool)>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: String) {
        self.checks.push((what, ok));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn erf_pair() -> KernelPair {
    KernelPair::symmetric(Mollifier::erf_step())
}

fn criterion_1() -> Result<Outcome> {
    let mut out = Outcome::default();
    let start = Instant::now();
    let bank = TestBank::new(vec![
        TestFunction::cosine(1.0, (-8.0, 8.0)),
        TestFunction::cosine(2.5, (-8.0, 8.0)),
    ])?;
    let m = Mollifier::gaussian();
    let a = 0.3;
    for n in 0..=2 {
        let r = convergence_study("delta", &EPS, &bank, |eps, eta| {
            Ok(delta_pairing_direct(&m, a, eta, eps)? - delta_expansion(&m, a, n, eta, eps)?)
        })?;
        let need = n as f64 + 0.9;
        out.check(r.fitted_order >= need, format!("N={n} order {:.3} (≥ {need})", r.fitted_order));
    }
    let secs = start.elapsed().as_secs_f64();
    out.check(secs < 10.0, format!("{secs:.1}s"));
    Ok(out)
}

fn criterion_2() -> Result<Outcome> {
    let mut out = Outcome::default();
    let bank = TestBank::default_for_window(-1.5, 1.5)?;
    let a1 = 0.2;
    let g = KernelPair::new(Mollifier::gaussian(), Mollifier::gaussian(), Orientation::Section1);
    let r = convergence_study("delta product", &EPS, &bank, |eps, eta| {
        let a2 = a1 + 0.5 * eps;
        Ok(product_pairing_direct(&g, a1, a2, eps, eta)? - product_asymptotics_delta(&g, a1, a2, eps, eta)?)
    })?;
    out.check(r.fitted_order >= 1.9, format!("delta order {:.3}", r.fitted_order));
    let p = erf_pair();
    let r = convergence_study("theta product", &EPS, &bank, |eps, eta| {
        let a2 = a1 + 0.5 * eps;
        Ok(product_pairing_direct(&p, a1, a2, eps, eta)? - product_asymptotics_theta(&p, a1, a2, eps, eta)?)
    })?;
    out.check(r.fitted_order >= 0.9, format!("theta order {:.3}", r.fitted_order));
    Ok(out)
}

fn criterion_3() -> Result<Outcome> {
    let mut out = Outcome::default();
    let names = ["erf", "tanh", "smoothstep"];
    let mut worst_sum = 0.0f64;
    let mut worst_root = 0.0f64;
    for l in names {
        for r in names {
            let p = KernelPair::new(
                Mollifier::from_name(l, 0.0, 1.0)?,
                Mollifier::from_name(r, 0.0, 1.0)?,
                Orientation::Section2a,
            );
            let big_r = 2.0 * p.radius();
            for i in 0..2001 {
                let rho = -big_r + 2.0 * big_r * i as f64 / 2000.0;
                let (b1, b2) = p.transfer_functions(rho)?;
                worst_sum = worst_sum.max((b1 + b2 - 1.0).abs());
            }
            let rho0 = p.equilibrium_root()?;
            worst_root = worst_root.max((p.b1(rho0)? - 0.5).abs());
        }
    }
    out.check(worst_sum < 1e-10, format!("max |B1+B2-1| {worst_sum:.1e}"));
    out.check(worst_root < 1e-10, format!("max |B1(rho0)-1/2| {worst_root:.1e}"));
    Ok(out)
}

fn criterion_4() -> Result<Outcome> {
    let mut out = Outcome::default();
    let start = Instant::now();
    let cfg = ShockShockConfig { u0: 0.5, u1: 1.0, u2: 0.5, a1: 0.0, a2: -2.0 };
    let ss = ShockShock::new(cfg, erf_pair(), DEFAULT_TAU_MAX)?;
    let t_star = ss.detect_t_star(4.0)?.unwrap_or(f64::NAN);
    out.check((t_star - 4.0 / 3.0).abs() < 1e-9, format!("t* {t_star:.12}"));

    let eps = EPS[3];
    let t = t_star + 130.0 * eps / (cfg.u1 + cfg.u2);
    let st = ss.state(t, eps)?;
    let dv = (st.v1 - 2.5).abs().max((st.v2 - 2.5).abs());
    out.check(dv < 1e-8, format!("post-merge |v-2.5| {dv:.1e}"));

    let bank = TestBank::default_for_window(-1.0, 6.0)?;
    let r = residual_study("shock-shock", &EPS, &bank, &[4.0 / 3.0, 2.0], |e, t| ss.state(t, e))?;
    out.check(r.fitted_order >= 0.9, format!("residual order {:.3}", r.fitted_order));

    let mut gap = 0.0f64;
    for e in EPS {
        let direct = ss.evolve_direct(e, 2.0)?;
        for t in [0.5, 1.0, 4.0 / 3.0, 1.6, 2.0] {
            let y = direct.interpolate(t);
            let s = ss.state(t, e)?;
            gap = gap.max(((s.phi1 - y[0]).abs()).max((s.phi2 - y[1]).abs()) / e);
        }
    }
    out.check(gap < 5.0, format!("composite vs direct {gap:.1e}·ε"));
    let secs = start.elapsed().as_secs_f64();
    out.check(secs < 60.0, format!("{secs:.1}s"));
    Ok(out)
}

fn l1_order<F>(times: &[f64], exact: &ReferenceSolution, window: (f64, f64), mut dist: F) -> Result<f64>
where
    F: FnMut(f64, f64, &ReferenceSolution, (f64, f64)) -> Result<f64>,
{
    let mut errs = Vec::new();
    for e in EPS {
        let mut worst = 0.0f64;
        for &t in times {
            worst = worst.max(dist(e, t, exact, window)?);
        }
        errs.push(worst);
    }
    Ok(fit_order(&EPS, &errs))
}

fn ansatz_l1<A: WeakAnsatz>(a: &A, exact: &ReferenceSolution, t: f64, window: (f64, f64)) -> Result<f64> {
    let mut breaks = a.fronts();
    breaks.extend(exact.fronts(t));
    breaks.retain(|x| *x > window.0 && *x < window.1);
    l1_distance(|x| a.value(x), |x| exact.eval(x, t), window, &breaks)
}

fn criterion_5() -> Result<Outcome> {
    let mut out = Outcome::default();
    let cfg = TriangleConfig { u0: 0.0, u1_0: 1.0, a1: 1.0, a2: 0.0 };
    let tri = Triangle::new(cfg, erf_pair(), DEFAULT_TAU_MAX)?;
    let mut closed = 0.0f64;
    let mut slope = 0.0f64;
    let eps = EPS[3];
    for t in [0.1, 0.2, 0.3, 0.4] {
        // oracle: the ramp slope u1/(1 - 2 u1 t) and gap (a1 - a2)(1 - 2 u1 t)
        let u10 = 1.0 / (1.0 - 2.0 * t);
        let psi0 = -(1.0 - 2.0 * t);
        closed = closed.max((cfg.u10(t) - u10).abs()).max((cfg.psi0(t) - psi0).abs());
        let s = tri.state(t, eps)?;
        slope = slope.max((s.u1 - u10).abs() / u10);
    }
    out.check(closed < 1e-10, format!("closed forms {closed:.1e}"));
    out.check(slope < 1e-6, format!("ramp slope rel {slope:.1e}"));
    let (t1, t2) = (1.0, 1.5);
    let (s1, s2) = (tri.state(t1, eps)?, tri.state(t2, eps)?);
    let speed = (0.5 * (s2.phi1 + s2.phi2) - 0.5 * (s1.phi1 + s1.phi2)) / (t2 - t1);
    let amp = s2.amplitude();
    out.check((amp - 1.0).abs() < 1e-6, format!("amplitude {amp:.9}"));
    out.check((speed - 1.0).abs() < 1e-6, format!("speed {speed:.9}"));
    let data = PiecewiseInitialData::triangle(0.0, 1.0, 1.0, 0.0)?;
    let exact = ReferenceSolution::new(&data)?;
    let order = l1_order(&[1.0, 1.5], &exact, (-1.0, 4.0), |e, t, ex, w| {
        ansatz_l1(&tri.state(t, e)?, ex, t, w)
    })?;
    out.check(order >= 0.9, format!("L1 order {order:.3}"));
    Ok(out)
}

fn criterion_6() -> Result<Outcome> {
    let mut out = Outcome::default();
    let cfg = ConfluenceConfig { u0_0: 1.0, u1_0: 1.0, a1: 1.0, a2: 0.0 };
    let conf = Confluence::new(cfg, erf_pair())?;
    let t_star = conf.detect_t_star(1.0)?.unwrap_or(f64::NAN);
    out.check((t_star - 0.375).abs() < 1e-9, format!("t* {t_star:.12}"));
    out.check((cfg.t1() - 0.5).abs() < 1e-9, format!("t1 {:.12}", cfg.t1()));
    let u = cfg.u00(t_star);
    out.check((u - 2.0).abs() < 1e-8, format!("u00(t*) {u:.10}"));
    let data = PiecewiseInitialData::confluence(1.0, 1.0, 1.0, 0.0)?;
    let exact = ReferenceSolution::new(&data)?;
    let order = l1_order(&[0.6, 1.0], &exact, (-1.0, 4.0), |e, t, ex, w| {
        let run = conf.solve(e, 1.0)?;
        ansatz_l1(&run.state(t)?, ex, t, w)
    })?;
    out.check(order >= 0.9, format!("L1 order {order:.3}"));
    Ok(out)
}

fn criterion_7() -> Result<Outcome> {
    let mut out = Outcome::default();
    let cfg = TriangleConfig { u0: 0.0, u1_0: 1.0, a1: 1.0, a2: 0.0 };
    let decay = Decay::new(Triangle::new(cfg, erf_pair(), DEFAULT_TAU_MAX)?, 1.0)?;
    let split = decay.split_time()?;
    out.check((split - 0.5).abs() < 1e-6, format!("split {split:.9}"));
    let bank = TestBank::default_for_window(-1.0, 3.0)?;
    let r = residual_study("decay", &EPS, &bank, &[0.0, 0.5, 0.7], |e, t| decay.state(t, e))?;
    out.check(r.fitted_order >= 0.9, format!("residual order {:.3}", r.fitted_order));
    Ok(out)
}

fn criterion_8() -> Result<Outcome> {
    let mut out = Outcome::default();
    let cases = [
        ("two_steps", PiecewiseInitialData::two_steps(0.5, 1.0, 0.5, 0.0, -2.0)?, (-3.0, 6.0), 2.0),
        ("triangle", PiecewiseInitialData::triangle(0.0, 1.0, 1.0, 0.0)?, (-1.0, 3.0), 1.0),
        ("confluence", PiecewiseInitialData::confluence(1.0, 1.0, 1.0, 0.0)?, (-1.0, 4.0), 0.8),
        ("shock", PiecewiseInitialData::riemann(1.0, 0.0, 0.0)?, (-1.0, 2.0), 1.0),
        ("rarefaction", PiecewiseInitialData::riemann(-0.5, 1.0, 0.0)?, (-2.0, 3.0), 1.0),
    ];
    for (name, data, window, t) in cases {
        let exact = ReferenceSolution::new(&data)?;
        let g = godunov_solve(&data, window, t, 4000, 0.8)?;
        let err = l1_grid_error(&g, &exact)?;
        let bound = 5.0 * g.dx * data.total_variation(window.0, window.1);
        out.check(err < bound, format!("{name} L1 {err:.2e}"));
        out.check(
            g.max_conservation_defect < 1e-12,
            format!("{name} mass {:.0e}", g.max_conservation_defect),
        );
    }
    Ok(out)
}

fn system_2d(gamma2: FrontCurve) -> Result<FrontSystem2D> {
    Ok(FrontSystem2D {
        a: [2.0, 1.0],
        gamma1: FrontCurve::planar([1.0, 0.0], [2.0, 1.0])?,
        gamma2,
        u0: 0.25,
        u1: 1.0,
        u2: 0.5,
        epsilon: 0.02,
        kernel: erf_pair(),
        window: Window::new((-3.0, 12.0), (-4.0, 8.0))?,
        s_range: (-1.5, 1.5),
        rho_form: RhoForm::Derived,
    })
}

fn criterion_9() -> Result<Outcome> {
    let mut out = Outcome::default();
    // planar data: every ray is the 1D shock-shock problem
    let sys = system_2d(FrontCurve::planar([0.0, 0.0], [2.0, 1.0])?)?;
    let trace = ray_trace(&sys, 8)?;
    let speed = sys.speed();
    let mut outer = 0.0f64;
    let mut pre = 0.0f64;
    let mut composite = 0.0f64;
    let profile = InteractionProfile::new(RayAmplitudes::of(&sys), &sys.kernel, DEFAULT_TAU_MAX)?;
    for ray in &trace.rays {
        let cfg = ShockShockConfig { u0: sys.u0, u1: sys.u1, u2: sys.u2, a1: ray.xi1 / speed, a2: 0.0 };
        outer = outer.max((ray.merge_time() - cfg.t_star()).abs());
        for t in [0.0, 0.3, 0.9 * cfg.t_star(), 1.5 * cfg.t_star()] {
            let t_merge = cfg.t_star();
            let (x1, x2) = if t < t_merge {
                (cfg.phi10(t), cfg.phi20(t))
            } else {
                let x = cfg.phi10(t_merge) + cfg.merged_speed() * (t - t_merge);
                (x, x)
            };
            let (p1, p2) = if t < t_merge {
                (ray.psi10_at(speed * x1), ray.psi20_at(speed * x2))
            } else {
                let xi = ray.merge_xi() + speed * sys.merged_factor() * (t - t_merge);
                let m = -t_merge - (xi - ray.merge_xi()) / (speed * sys.merged_factor());
                outer = outer.max((xi / speed - x1).abs());
                (m, m)
            };
            outer = outer.max((p1 + t).abs()).max((p2 + t).abs());
        }
        let one_d = ShockShock::new(cfg, sys.kernel.clone(), DEFAULT_TAU_MAX)?;
        let single = weakwave::fronts2d::RayTrace { rays: vec![ray.clone()], excluded: vec![] };
        let ts = cfg.t_star();
        for p in snapshots(&single, &profile, sys.epsilon, &[0.2 * ts, ts, 1.5 * ts]) {
            let xi = (p.x1 - ray.origin[0]) / ray.direction[0];
            let st = one_d.state(p.t, sys.epsilon)?;
            let x1d = if p.front_id == 1 { st.phi1 } else { st.phi2 };
            let gap = (xi / speed - x1d).abs();
            if p.t < 0.5 * ts {
                pre = pre.max(gap);
            } else {
                composite = composite.max(gap / sys.epsilon);
            }
        }
    }
    out.check(outer < 1e-8, format!("outer 2D vs 1D {outer:.1e}"));
    out.check(pre < 1e-8, format!("pre-interaction composite {pre:.1e}"));
    out.check(composite < 3.0, format!("interaction composite {composite:.2}·ε"));

    // curved data: partition and normal speeds
    let curved = system_2d(FrontCurve::parabolic([0.0, 0.0], [2.0, 1.0], -0.3)?)?;
    let times = [0.1, 0.35, 1.0, 2.0];
    let r = simulate(&curved, 64, &times)?;
    out.check(
        (r.b2_at_rho0 - 0.5).abs() < 1e-8,
        format!("B2(rho0) {:.10}", r.b2_at_rho0),
    );
    let mut wrong = 0;
    let mut mixed = false;
    for &t in &times {
        let flags = r.merged.merged(t);
        mixed |= flags.iter().any(|&b| b) && flags.iter().any(|&b| !b);
        for (ray, f) in r.trace.rays.iter().zip(&flags) {
            // oracle: 1D merge time from the separation along the ray
            let t_1d = (ray.xi1 / speed) / (curved.u1 + curved.u2);
            if *f != (t >= t_1d) {
                wrong += 1;
            }
        }
    }
    out.check(wrong == 0 && mixed, format!("partition mismatches {wrong}"));
    let mut dv = 0.0f64;
    for i in (0..r.merged.rays.len()).step_by(7) {
        let t = r.merged.rays[i].t_merge + 0.25;
        if let Some(p) = r.merged.front_point(i, t) {
            let (vn, expect) = r.merged.normal_speed(p)?;
            dv = dv.max((vn - expect).abs());
        }
    }
    out.check(dv < 1e-6, format!("normal speed {dv:.1e}"));
    Ok(out)
}

fn criterion_10() -> Result<Outcome> {
    let mut out = Outcome::default();
    let ss = || -> Result<String> {
        let cfg = ShockShockConfig { u0: 0.5, u1: 1.0, u2: 0.5, a1: 0.0, a2: -2.0 };
        let t = ShockShock::new(cfg, erf_pair(), DEFAULT_TAU_MAX)?.evolve(0.05, 2.0, 101)?;
        Ok(serde_json::to_string(&t).expect("serializable"))
    };
    out.check(ss()? == ss()?, "shock-shock trajectory".into());
    let study = || -> Result<String> {
        let bank = TestBank::default_for_window(-1.5, 1.5)?;
        let m = Mollifier::gaussian();
        let r = convergence_study("delta", &EPS, &bank, |e, eta| {
            Ok(delta_pairing_direct(&m, 0.2, eta, e)? - delta_expansion(&m, 0.2, 1, eta, e)?)
        })?;
        Ok(r.to_json())
    };
    out.check(study()? == study()?, "convergence report".into());
    let grid = || -> Result<String> {
        let d = PiecewiseInitialData::two_steps(0.0, 1.0, 1.0, 0.0, -1.0)?;
        Ok(format!("{:?}", godunov_solve(&d, (-2.0, 4.0), 1.0, 500, 0.8)?.values))
    };
    out.check(grid()? == grid()?, "godunov grid".into());
    let fronts = || -> Result<String> {
        let sys = system_2d(FrontCurve::parabolic([0.0, 0.0], [2.0, 1.0], -0.3)?)?;
        Ok(to_delimited(&simulate(&sys, 32, &[0.5, 1.0])?.snapshots))
    };
    out.check(fronts()? == fronts()?, "2D snapshots".into());
    Ok(out)
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("delta expansion", criterion_1),
        ("products", criterion_2),
        ("transfer functions", criterion_3),
        ("shock-shock", criterion_4),
        ("ramp collapse", criterion_5),
        ("confluence", criterion_6),
        ("decay", criterion_7),
        ("reference oracle", criterion_8),
        ("2D reduction", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(o) => {
                let failing: Vec<String> = o
                    .checks
                    .iter()
                    .filter(|c| !c.1)
                    .map(|c| c.0.clone())
                    .collect();
                let shown = if failing.is_empty() {
                    o.checks.iter().map(|c| c.0.clone()).collect::<Vec<_>>().join("; ")
                } else {
                    format!("failing: {}", failing.join("; "))
                };
                (o.passed(), shown)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {} [{:.1}s] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};
use weakwave::dynamics1d::{
    residual_study, sample_profile, Confluence, ConfluenceRun, Decay, ShockShock, Trajectory, Triangle,
    WeakAnsatz, DEFAULT_TAU_MAX,
};
use weakwave::error::Result;
use weakwave::fronts2d::{simulate, FrontPoint, FrontSystem2D, Fronts2dResult};
use weakwave::kernels::{KernelPair, Mollifier, Orientation};
use weakwave::reference::{l1_distance, PiecewiseInitialData, ReferenceSolution};
use weakwave::weak_calculus::{
    convergence_study, delta_expansion, delta_pairing_direct, fit_order, product_asymptotics_delta,
    product_asymptotics_theta, product_pairing_direct, ConvergenceReport, TestBank, TestFunction,
};

use crate::config::{Plan, ScenarioPlan};
use crate::error::{CliResult, Context};
use crate::output::{fmt17, header, num, opt_num, profile_text, to_json, trajectory_text, Artifacts};

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Type-erased ansatz so the four 1D families share one pipeline.
struct Boxed(Box<dyn WeakAnsatz>);

impl WeakAnsatz for Boxed {
    fn value(&self, x: f64) -> f64 {
        self.0.value(x)
    }
    fn dt(&self, x: f64) -> f64 {
        self.0.dt(x)
    }
    fn flux_sign(&self) -> f64 {
        self.0.flux_sign()
    }
    fn fronts(&self) -> Vec<f64> {
        self.0.fronts()
    }
    fn epsilon(&self) -> f64 {
        self.0.epsilon()
    }
}

enum Model {
    Shock(ShockShock),
    Tri(Triangle),
    Conf(Confluence),
    Decay(Decay),
}

/// One model at a fixed ε; confluence keeps its integrated path.
struct Realization<'a> {
    model: &'a Model,
    epsilon: f64,
    run: Option<ConfluenceRun<'a>>,
}

impl Realization<'_> {
    fn state(&self, t: f64) -> Result<Boxed> {
        let e = self.epsilon;
        Ok(Boxed(match (self.model, &self.run) {
            (Model::Shock(m), _) => Box::new(m.state(t, e)?),
            (Model::Tri(m), _) => Box::new(m.state(t, e)?),
            (Model::Conf(_), Some(run)) => Box::new(run.state(t)?),
            (Model::Conf(_), None) => unreachable!("confluence is realized with its path"),
            (Model::Decay(m), _) => Box::new(m.state(t, e)?),
        }))
    }

    fn velocities(&self, t: f64) -> Result<(f64, f64)> {
        let e = self.epsilon;
        Ok(match (self.model, &self.run) {
            (Model::Shock(m), _) => {
                let s = m.state(t, e)?;
                (s.v1, s.v2)
            }
            (Model::Tri(m), _) => {
                let s = m.state(t, e)?;
                (s.v1, s.v2)
            }
            (Model::Conf(_), Some(run)) => {
                let s = run.state(t)?;
                (s.v1, s.v2)
            }
            (Model::Conf(_), None) => unreachable!("confluence is realized with its path"),
            // fronts of v(·, t) = u(·, T - t) move backwards
            (Model::Decay(m), _) => {
                let s = m.state(t, e)?;
                (0.0 - s.forward.v1, 0.0 - s.forward.v2)
            }
        })
    }
}

impl Model {
    fn build(plan: &Plan) -> CliResult<Option<Self>> {
        let k = plan.kernel.clone();
        Ok(Some(match &plan.scenario {
            ScenarioPlan::ShockShock(c) => Model::Shock(ShockShock::new(*c, k, DEFAULT_TAU_MAX).context("shock_shock")?),
            ScenarioPlan::Triangle(c) => Model::Tri(Triangle::new(*c, k, DEFAULT_TAU_MAX).context("triangle")?),
            ScenarioPlan::Confluence(c) => Model::Conf(Confluence::new(*c, k).context("confluence")?),
            ScenarioPlan::Decay { triangle, horizon } => {
                let forward = Triangle::new(*triangle, k, DEFAULT_TAU_MAX).context("decay")?;
                Model::Decay(Decay::new(forward, *horizon).context("decay")?)
            }
            _ => return Ok(None),
        }))
    }

    fn realize(&self, epsilon: f64, t_end: f64) -> Result<Realization<'_>> {
        let run = match self {
            Model::Conf(c) => Some(c.solve(epsilon, t_end)?),
            _ => None,
        };
        Ok(Realization { model: self, epsilon, run })
    }

    fn evolve(&self, epsilon: f64, t_end: f64, samples: usize) -> Result<Trajectory> {
        match self {
            Model::Shock(m) => m.evolve(epsilon, t_end, samples),
            Model::Tri(m) => m.evolve(epsilon, t_end, samples),
            Model::Conf(m) => m.evolve(epsilon, t_end, samples),
            Model::Decay(m) => m.evolve(epsilon, t_end, samples),
        }
    }

    fn detected_event(&self, t_end: f64) -> Result<Option<f64>> {
        match self {
            Model::Shock(m) => m.detect_t_star(t_end),
            Model::Tri(m) => m.detect_t_star(t_end),
            Model::Conf(m) => m.detect_t_star(t_end),
            Model::Decay(m) => Ok(Some(m.split_time()?).filter(|t| *t <= t_end)),
        }
    }

    fn closed_form_event(&self) -> f64 {
        match self {
            Model::Shock(m) => m.config.t_star(),
            Model::Tri(m) => m.config.t1(),
            Model::Conf(m) => m.config.t_star(),
            Model::Decay(m) => m.horizon - m.forward.config.t1(),
        }
    }

    fn rho0(&self) -> Option<f64> {
        match self {
            Model::Shock(m) => m.rho_solution().map(|r| r.rho0),
            Model::Tri(m) => Some(m.rho_solution().rho0),
            Model::Conf(_) => None,
            Model::Decay(m) => Some(m.forward.rho_solution().rho0),
        }
    }

    /// Speed of the single front left after the interaction.
    fn merged_speed(&self) -> Option<f64> {
        match self {
            Model::Shock(m) => Some(m.config.merged_speed()),
            Model::Tri(m) => Some(m.config.shock_speed()),
            Model::Conf(m) => Some(m.config.big_u()),
            Model::Decay(_) => None,
        }
    }

    /// Initial data of the entropy-solution oracle, when one applies.
    fn oracle_data(&self) -> Result<Option<PiecewiseInitialData>> {
        Ok(match self {
            Model::Shock(m) => {
                let c = m.config;
                Some(PiecewiseInitialData::two_steps(c.u0, c.u1, c.u2, c.a1, c.a2)?)
            }
            Model::Tri(m) => {
                let c = m.config;
                Some(PiecewiseInitialData::triangle(c.u0, c.u1_0, c.a1, c.a2)?)
            }
            Model::Conf(m) => {
                let c = m.config;
                Some(PiecewiseInitialData::confluence(c.u0_0, c.u1_0, c.a1, c.a2)?)
            }
            Model::Decay(_) => None,
        })
    }
}

pub fn oracle_for(plan: &Plan) -> CliResult<Option<PiecewiseInitialData>> {
    match Model::build(plan)? {
        Some(m) => m.oracle_data().context("oracle data"),
        None => Ok(None),
    }
}

fn ansatz_l1<A: WeakAnsatz>(a: &A, exact: &ReferenceSolution, t: f64, window: (f64, f64)) -> Result<f64> {
    let mut breaks = a.fronts();
    breaks.extend(exact.fronts(t));
    breaks.retain(|x| *x > window.0 && *x < window.1);
    l1_distance(|x| a.value(x), |x| exact.eval(x, t), window, &breaks)
}

fn kernel_json(k: &KernelPair) -> Value {
    json!({
        "left": k.left.name(),
        "right": k.right.name(),
        "width": num(k.left.width()),
        "shift": num(k.left.shift()),
        "orientation": match k.orientation {
            Orientation::Section1 => "section1",
            Orientation::Section2a => "section2a",
        },
    })
}

fn report_json(r: &ConvergenceReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

fn run_1d(plan: &Plan, model: &Model, out: &mut Artifacts) -> CliResult<Value> {
    let cfg = &plan.config;
    let label = cfg.run.scenario.name();
    let eps = &cfg.run.epsilons;
    let t_end = plan.t_end;
    let times = &cfg.run.times;
    let xs = linspace(plan.window.0, plan.window.1, plan.points);
    let mollifier = plan.kernel.left.name().to_string();

    let realizations = eps
        .par_iter()
        .map(|&e| model.realize(e, t_end))
        .collect::<Result<Vec<_>>>()
        .context(label)?;

    let per_eps = eps
        .par_iter()
        .zip(&realizations)
        .map(|(&e, r)| -> Result<(Trajectory, Vec<Vec<f64>>)> {
            let traj = model.evolve(e, t_end, cfg.run.samples)?;
            let profiles = times
                .iter()
                .map(|&t| Ok(sample_profile(&r.state(t)?, &xs)))
                .collect::<Result<Vec<_>>>()?;
            Ok((traj, profiles))
        })
        .collect::<Result<Vec<_>>>()
        .context(label)?;
    for (i, (traj, profiles)) in per_eps.iter().enumerate() {
        out.add(format!("trajectory_eps{i}.csv"), trajectory_text(traj));
        for (j, us) in profiles.iter().enumerate() {
            let head = header(label, eps[i], &mollifier);
            out.add(format!("profile_eps{i}_t{j}.csv"), profile_text(&head, &xs, us));
        }
    }

    let residual_times = cfg
        .study
        .residual_times
        .clone()
        .filter(|v| !v.is_empty())
        .or_else(|| (!times.is_empty()).then(|| times.clone()))
        .unwrap_or_else(|| vec![t_end]);
    let tw = cfg.study.test_window.map(|w| (w[0], w[1])).unwrap_or(plan.window);
    let bank = TestBank::default_for_window(tw.0, tw.1).context("test bank")?;
    let report = residual_study(label, eps, &bank, &residual_times, |e, t| {
        let i = eps.iter().position(|x| *x == e).expect("study runs over the configured epsilons");
        realizations[i].state(t)
    })
    .context("residual study")?;
    out.add("convergence.json", to_json(&report_json(&report)));

    let finest = realizations.last().expect("at least three epsilons");
    let (v1, v2) = finest.velocities(t_end).context("velocities")?;
    let oracle = match model.oracle_data().context("oracle data")? {
        Some(data) => {
            let exact = ReferenceSolution::new(&data).context("oracle")?;
            let mut rows = Vec::new();
            for &t in times {
                let l1 = realizations
                    .par_iter()
                    .map(|r| ansatz_l1(&r.state(t)?, &exact, t, plan.window))
                    .collect::<Result<Vec<_>>>()
                    .context("oracle L1")?;
                rows.push(json!({
                    "t": num(t),
                    "l1": num(*l1.last().expect("nonempty")),
                    "l1_by_epsilon": l1.iter().map(|v| num(*v)).collect::<Vec<_>>(),
                    "order": num(fit_order(eps, &l1)),
                }));
            }
            Value::Array(rows)
        }
        None => Value::Null,
    };

    Ok(json!({
        "scenario": label,
        "kernel": kernel_json(&plan.kernel),
        "epsilons": eps.iter().map(|e| num(*e)).collect::<Vec<_>>(),
        "t_end": num(t_end),
        "times": times.iter().map(|t| num(*t)).collect::<Vec<_>>(),
        "t_star": opt_num(model.detected_event(t_end).context("event detection")?),
        "t_star_closed_form": num(model.closed_form_event()),
        "rho0": opt_num(model.rho0()),
        "velocities": {"t": num(t_end), "epsilon": num(finest.epsilon), "v1": num(v1), "v2": num(v2)},
        "merged_speed": opt_num(model.merged_speed()),
        "residual": {
            "times": residual_times.iter().map(|t| num(*t)).collect::<Vec<_>>(),
            "fitted_order": num(report.fitted_order),
            "min_order": num(cfg.study.min_order),
            "passes": report.passes(cfg.study.min_order),
        },
        "oracle_l1": oracle,
    }))
}

fn run_formulas(plan: &Plan, delta: &Mollifier, out: &mut Artifacts) -> CliResult<Value> {
    let cfg = &plan.config;
    let eps = &cfg.run.epsilons;
    let a = cfg.study.point;
    let analytic = TestBank::new(vec![
        TestFunction::cosine(1.0, (-8.0, 8.0)),
        TestFunction::cosine(2.5, (-8.0, 8.0)),
    ])
    .context("test bank")?;
    let tw = cfg.study.test_window.map(|w| (w[0], w[1])).unwrap_or(plan.window);
    let bumps = TestBank::default_for_window(tw.0, tw.1).context("test bank")?;

    let mut reports: Vec<(ConvergenceReport, f64)> = Vec::new();
    for n in 0..=2usize {
        let r = convergence_study(&format!("delta_expansion_n{n}"), eps, &analytic, |e, eta| {
            Ok(delta_pairing_direct(delta, a, eta, e)? - delta_expansion(delta, a, n, eta, e)?)
        })
        .context("delta expansion study")?;
        reports.push((r, n as f64 + 0.9));
    }
    let dd = KernelPair::new(delta.clone(), delta.clone(), Orientation::Section1);
    let r = convergence_study("delta_product", eps, &bumps, |e, eta| {
        let a2 = a + 0.5 * e;
        Ok(product_pairing_direct(&dd, a, a2, e, eta)? - product_asymptotics_delta(&dd, a, a2, e, eta)?)
    })
    .context("delta product study")?;
    reports.push((r, 1.9));
    let steps = &plan.kernel;
    let r = convergence_study("theta_product", eps, &bumps, |e, eta| {
        let a2 = a + 0.5 * e;
        Ok(product_pairing_direct(steps, a, a2, e, eta)? - product_asymptotics_theta(steps, a, a2, e, eta)?)
    })
    .context("theta product study")?;
    reports.push((r, 0.9));

    let all: Vec<Value> = reports.iter().map(|(r, _)| report_json(r)).collect();
    out.add("convergence.json", to_json(&Value::Array(all)));
    let rows: Vec<Value> = reports
        .iter()
        .map(|(r, need)| {
            json!({
                "label": r.label,
                "fitted_order": num(r.fitted_order),
                "min_order": num(*need),
                "passes": r.passes(*need),
            })
        })
        .collect();
    Ok(json!({
        "scenario": "formulas1",
        "delta": delta.name(),
        "kernel": kernel_json(steps),
        "point": num(a),
        "epsilons": eps.iter().map(|e| num(*e)).collect::<Vec<_>>(),
        "studies": rows,
    }))
}

fn snapshot_text(points: &[FrontPoint], epsilon: f64, mollifier: &str) -> String {
    let mut s = header("fronts2d", epsilon, mollifier);
    s.push_str("t,s,x1,x2,front_id,merged\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt17(p.t),
            fmt17(p.s),
            fmt17(p.x1),
            fmt17(p.x2),
            p.front_id,
            p.merged as u8
        );
    }
    s
}

fn run_fronts2d(plan: &Plan, system: &FrontSystem2D, rays: usize, out: &mut Artifacts) -> CliResult<Value> {
    let cfg = &plan.config;
    let eps = &cfg.run.epsilons;
    let times = &cfg.run.times;
    let results = eps
        .par_iter()
        .map(|&e| {
            let mut sys = system.clone();
            sys.epsilon = e;
            simulate(&sys, rays, times)
        })
        .collect::<Result<Vec<Fronts2dResult>>>()
        .context("fronts2d")?;
    let mollifier = plan.kernel.left.name();
    for (i, r) in results.iter().enumerate() {
        out.add(format!("fronts_eps{i}.csv"), snapshot_text(&r.snapshots, eps[i], mollifier));
    }
    let r = results.last().expect("at least three epsilons");
    let mut rays_csv = String::from("s,origin_x1,origin_x2,xi1,t_merge,xi_merge,merge_x1,merge_x2\n");
    for (ray, m) in r.trace.rays.iter().zip(&r.merged.rays) {
        let row = [ray.s, ray.origin[0], ray.origin[1], ray.xi1, m.t_merge, m.xi_merge, m.point[0], m.point[1]]
            .map(fmt17);
        let _ = writeln!(rays_csv, "{}", row.join(","));
    }
    out.add("rays.csv", rays_csv);
    let merged: Vec<Value> = times
        .iter()
        .map(|&t| {
            let flags = r.merged.merged(t);
            json!({"t": num(t), "merged_rays": flags.iter().filter(|b| **b).count(), "rays": flags.len()})
        })
        .collect();
    let excluded: Vec<Value> = r
        .trace
        .excluded
        .iter()
        .map(|x| json!({"s": num(x.s), "status": serde_json::to_value(x.status).expect("status")}))
        .collect();
    Ok(json!({
        "scenario": "fronts2d",
        "kernel": kernel_json(&plan.kernel),
        "epsilons": eps.iter().map(|e| num(*e)).collect::<Vec<_>>(),
        "times": times.iter().map(|t| num(*t)).collect::<Vec<_>>(),
        "rho_form": serde_json::to_value(system.rho_form).expect("rho form"),
        "rho0": num(r.rho0),
        "b2_at_rho0": num(r.b2_at_rho0),
        "merged_factor": num(r.merged.merged_factor),
        "rays_traced": r.trace.rays.len(),
        "excluded": excluded,
        "merged": merged,
    }))
}

/// Run the plan and collect every artifact in memory.
pub fn execute(plan: &Plan) -> CliResult<Artifacts> {
    let mut out = Artifacts::default();
    out.add("config.toml", plan.source.clone());
    let summary = match &plan.scenario {
        ScenarioPlan::Formulas1 { delta } => run_formulas(plan, delta, &mut out)?,
        ScenarioPlan::Fronts2d { system, rays } => run_fronts2d(plan, system, *rays, &mut out)?,
        _ => {
            let model = Model::build(plan)?.expect("1D scenario");
            run_1d(plan, &model, &mut out)?
        }
    };
    out.add("summary.json", to_json(&summary));
    Ok(out)
}

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use serde_json::{json, Value};
use weakwave::reference::{godunov_solve, l1_distance, PiecewiseInitialData, ReferenceSolution};
use weakwave::weak_calculus::fit_order;

use crate::config::{load, Plan};
use crate::error::{CliError, CliResult, Context};
use crate::output::{num, parse_profile};
use crate::run::oracle_for;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    /// Exact entropy solution of the scenario family.
    Exact,
    /// First-order Godunov solution on a fine grid.
    Godunov,
}

impl OracleKind {
    fn name(self) -> &'static str {
        match self {
            OracleKind::Exact => "exact",
            OracleKind::Godunov => "godunov",
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    if !path.is_file() {
        return Err(CliError::MissingArtifact(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(CliError::io(path))
}

/// Piecewise-linear interpolant of a sampled profile.
fn interpolate(xs: &[f64], us: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&s| s <= x).clamp(1, xs.len() - 1) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    us[i] * (1.0 - w) + us[i + 1] * w
}

struct Distances {
    l1: f64,
    linf: f64,
}

enum Oracle {
    Exact(ReferenceSolution),
    Grid(Box<dyn Fn(f64) -> f64 + Sync>),
}

fn distances(xs: &[f64], us: &[f64], oracle: &Oracle, t: f64) -> CliResult<Distances> {
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let value = |x: f64| match oracle {
        Oracle::Exact(e) => e.eval(x, t),
        Oracle::Grid(g) => g(x),
    };
    let linf = xs
        .iter()
        .zip(us)
        .map(|(&x, &u)| (u - value(x)).abs())
        .fold(0.0, f64::max);
    let l1 = match oracle {
        Oracle::Exact(e) => {
            let mut breaks: Vec<f64> = xs[1..xs.len() - 1].to_vec();
            breaks.extend(e.fronts(t).into_iter().filter(|x| *x > lo && *x < hi));
            l1_distance(|x| interpolate(xs, us, x), value, (lo, hi), &breaks).context("L1 distance")?
        }
        // both sides are only known at samples: trapezoid rule
        Oracle::Grid(_) => {
            let d: Vec<f64> = xs.iter().zip(us).map(|(&x, &u)| (u - value(x)).abs()).collect();
            xs.windows(2)
                .zip(d.windows(2))
                .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
                .sum()
        }
    };
    Ok(Distances { l1, linf })
}

fn build_oracle(kind: OracleKind, data: &PiecewiseInitialData, plan: &Plan, t: f64, nx: usize) -> CliResult<Oracle> {
    Ok(match kind {
        OracleKind::Exact => Oracle::Exact(ReferenceSolution::new(data).context("exact oracle")?),
        OracleKind::Godunov if t == 0.0 => {
            let d = data.clone();
            Oracle::Grid(Box::new(move |x| d.eval(x)))
        }
        OracleKind::Godunov => {
            let g = godunov_solve(data, plan.window, t, nx, 0.8).context("godunov oracle")?;
            Oracle::Grid(Box::new(move |x| g.eval(x)))
        }
    })
}

/// L¹/L∞ distances between the stored profiles and the oracle at every
/// output time, with the fitted order over ε.
pub fn compare(run_dir: &Path, kind: OracleKind, nx: usize) -> CliResult<Value> {
    let summary_path = run_dir.join("summary.json");
    let summary: Value = serde_json::from_str(&read(&summary_path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", summary_path.display())))?;
    let eps: Vec<f64> = summary["epsilons"]
        .as_array()
        .and_then(|a| a.iter().map(Value::as_f64).collect())
        .ok_or_else(|| CliError::Config(format!("{}: no epsilons", summary_path.display())))?;
    let plan = load(&read(&run_dir.join("config.toml"))?, Some(eps.clone()))?;
    let scenario = plan.config.run.scenario.name();
    let data = oracle_for(&plan)?
        .ok_or_else(|| CliError::Config(format!("no entropy-solution oracle for scenario `{scenario}`")))?;

    let mut rows = Vec::new();
    for (j, &t) in plan.config.run.times.iter().enumerate() {
        let oracle = build_oracle(kind, &data, &plan, t, nx)?;
        let profiles = (0..eps.len())
            .map(|i| {
                let p = run_dir.join(format!("profile_eps{i}_t{j}.csv"));
                let text = read(&p)?;
                parse_profile(&text).ok_or_else(|| CliError::Config(format!("{}: malformed profile", p.display())))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let d = profiles
            .par_iter()
            .map(|(xs, us)| distances(xs, us, &oracle, t))
            .collect::<CliResult<Vec<_>>>()?;
        let l1: Vec<f64> = d.iter().map(|v| v.l1).collect();
        let finest = d.last().expect("at least three epsilons");
        rows.push(json!({
            "t": num(t),
            "epsilon": num(*eps.last().expect("nonempty")),
            "l1": num(finest.l1),
            "linf": num(finest.linf),
            "l1_by_epsilon": l1.iter().map(|v| num(*v)).collect::<Vec<_>>(),
            "order": num(fit_order(&eps, &l1)),
        }));
    }
    Ok(json!({
        "scenario": scenario,
        "oracle": kind.name(),
        "grid_cells": if kind == OracleKind::Godunov { json!(nx) } else { Value::Null },
        "rows": rows,
    }))
}

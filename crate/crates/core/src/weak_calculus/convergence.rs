use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::pairing::pair;
use super::test_function::{TestBank, TestFunction};
use crate::error::{Error, Result};

/// Empirical order of a family of residuals paired against a test bank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub epsilons: Vec<f64>,
    /// `residuals[i][j] = |⟨r_{ε_i}, η_j⟩|`.
    pub residuals: Vec<Vec<f64>>,
    /// Max over the bank, one entry per ε.
    pub max_residuals: Vec<f64>,
    #[serde(serialize_with = "ser_order", deserialize_with = "de_order")]
    pub fitted_order: f64,
}

fn ser_order<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_order<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) if t == "+inf" => Ok(f64::INFINITY),
        Repr::Text(t) => Err(serde::de::Error::custom(format!("bad order `{t}`"))),
    }
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn passes(&self, min_order: f64) -> bool {
        self.fitted_order >= min_order
    }
}

/// Least-squares slope of `ln r` against `ln ε`. Zero residuals are dropped;
/// fewer than two positive entries means the residual vanishes and the order
/// is `+∞`.
pub fn fit_order(epsilons: &[f64], residuals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(residuals)
        .filter(|(_, &r)| r > 0.0)
        .map(|(&e, &r)| (e.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "convergence study needs at least 3 epsilons, got {}",
            epsilons.len()
        )));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidInput("epsilons must be positive and finite".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("epsilons must be strictly decreasing".into()));
    }
    Ok(())
}

/// Fill the `(ε, η)` matrix with `|pairing(ε, η)|` and fit the order.
pub fn convergence_study<F>(
    label: &str,
    epsilons: &[f64],
    bank: &TestBank,
    pairing: F,
) -> Result<ConvergenceReport>
where
    F: Fn(f64, &TestFunction) -> Result<f64> + Sync,
{
    check_epsilons(epsilons)?;
    let nb = bank.len();
    let cells: Vec<Result<f64>> = (0..epsilons.len() * nb)
        .into_par_iter()
        .map(|idx| {
            let eps = epsilons[idx / nb];
            let v = pairing(eps, &bank.functions()[idx % nb])?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "{label}: pairing at ε={eps}, test function {}",
                    idx % nb
                )));
            }
            Ok(v.abs())
        })
        .collect();
    let flat = cells.into_iter().collect::<Result<Vec<f64>>>()?;
    let residuals: Vec<Vec<f64>> = flat.chunks(nb).map(|c| c.to_vec()).collect();
    let max_residuals: Vec<f64> = residuals
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .collect();
    Ok(ConvergenceReport {
        label: label.to_string(),
        epsilons: epsilons.to_vec(),
        fitted_order: fit_order(epsilons, &max_residuals),
        residuals,
        max_residuals,
    })
}

/// Pair the residual profile `x ↦ r(ε, x)` with every bank member.
pub fn residual_order<F>(
    label: &str,
    family: F,
    bank: &TestBank,
    epsilons: &[f64],
) -> Result<ConvergenceReport>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    convergence_study(label, epsilons, bank, |eps, eta| pair(|x| family(eps, x), eta, &[]))
}

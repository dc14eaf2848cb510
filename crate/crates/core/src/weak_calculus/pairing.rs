use super::test_function::TestFunction;
use crate::error::{Error, Result};
use crate::kernels::{KernelPair, Mollifier, MollifierKind, Orientation};
use crate::quadrature::{integrate_with_breaks, QuadOptions};

fn pairing_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_intervals: 8000,
    }
}

/// `⟨f, η⟩ = ∫ f η dx` over the support of `η`. `breaks` marks points where
/// `f` is sharp (fronts, kinks) so the quadrature starts from split panels.
pub fn pair<F: Fn(f64) -> f64>(f: F, eta: &TestFunction, breaks: &[f64]) -> Result<f64> {
    let (lo, hi) = eta.support();
    let mut pts = breaks.to_vec();
    pts.push(0.5 * (lo + hi));
    integrate_with_breaks(|x| f(x) * eta.value(x), lo, hi, &pts, pairing_opts())
}

/// Pairing of a sampled profile, linearly interpolated between samples.
pub fn pair_sampled(xs: &[f64], ys: &[f64], eta: &TestFunction) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "sampled profile needs ≥2 increasing abscissae matching the values".into(),
        ));
    }
    let (lo, hi) = eta.support();
    if lo < xs[0] || hi > xs[xs.len() - 1] {
        return Err(Error::InvalidInput("test-function support exceeds the sample range".into()));
    }
    let interp = |x: f64| {
        let i = xs.partition_point(|&s| s <= x).clamp(1, xs.len() - 1) - 1;
        let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
        ys[i] * (1.0 - w) + ys[i + 1] * w
    };
    let nodes: Vec<f64> = xs.iter().copied().filter(|&x| x > lo && x < hi).collect();
    integrate_with_breaks(|x| interp(x) * eta.value(x), lo, hi, &nodes, pairing_opts())
}

/// `⟨θ(x - a), η⟩ = ∫_a^∞ η dx`.
pub fn theta_pairing(a: f64, eta: &TestFunction) -> Result<f64> {
    let (lo, hi) = eta.support();
    if a >= hi {
        return Ok(0.0);
    }
    let start = a.max(lo);
    integrate_with_breaks(|x| eta.value(x), start, hi, &[], pairing_opts())
}

/// Pairing of the truncated moment series of `(1/ε) ω((x - a)/ε)`:
/// `Σ_{k≤N} Ω_k ε^k η⁽ᵏ⁾(a) / k!`.
pub fn delta_expansion(
    m: &Mollifier,
    a: f64,
    order: usize,
    eta: &TestFunction,
    epsilon: f64,
) -> Result<f64> {
    if order > 10 {
        return Err(Error::InvalidInput(format!(
            "expansion order {order} exceeds 10"
        )));
    }
    let moments = m.moments(order)?;
    let derivs = eta.derivatives(a, order)?;
    let mut factorial = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 0..=order {
        if k > 0 {
            factorial *= k as f64;
            power *= epsilon;
        }
        sum += moments[k] * power * derivs[k] / factorial;
    }
    Ok(sum)
}

/// Direct pairing of `(1/ε) ω((x - a)/ε)` with `η`.
pub fn delta_pairing_direct(m: &Mollifier, a: f64, eta: &TestFunction, epsilon: f64) -> Result<f64> {
    m.require(MollifierKind::DeltaLike)?;
    pair(|x| m.value((x - a) / epsilon) / epsilon, eta, &[a])
}

/// Right side of the delta-product formula:
/// `(ε/2)[η(a₁) + η(a₂)] B((a₂ - a₁)/ε)`.
pub fn product_asymptotics_delta(
    p: &KernelPair,
    a1: f64,
    a2: f64,
    epsilon: f64,
    eta: &TestFunction,
) -> Result<f64> {
    let b = p.kernel_b((a2 - a1) / epsilon)?;
    Ok(0.5 * epsilon * (eta.value(a1) + eta.value(a2)) * b)
}

/// Direct pairing `⟨ω₁((x - a₁)/ε) ω₂((x - a₂)/ε), η⟩`, valid for both kinds.
pub fn product_pairing_direct(
    p: &KernelPair,
    a1: f64,
    a2: f64,
    epsilon: f64,
    eta: &TestFunction,
) -> Result<f64> {
    pair(
        |x| p.left.value((x - a1) / epsilon) * p.right.value((x - a2) / epsilon),
        eta,
        &[a1, a2],
    )
}

/// Right side of the Heaviside-product formula:
/// `⟨θ(x - a₁), η⟩ B₁(Δa/ε) + ⟨θ(x - a₂), η⟩ B₂(Δa/ε)`, `Δa = a₂ - a₁`.
///
/// Products of `θ(x - a)` regularizations are always evaluated in the
/// `Section1` convention, whatever the orientation stored in `p`.
pub fn product_asymptotics_theta(
    p: &KernelPair,
    a1: f64,
    a2: f64,
    epsilon: f64,
    eta: &TestFunction,
) -> Result<f64> {
    let q = p.with_orientation(Orientation::Section1);
    let (b1, b2) = q.transfer_functions((a2 - a1) / epsilon)?;
    Ok(theta_pairing(a1, eta)? * b1 + theta_pairing(a2, eta)? * b2)
}

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::weak_calculus::{convergence_study, pair, ConvergenceReport, TestBank, TestFunction};

/// A regularized profile `u_ε(·, t)` at a fixed time, with its exact time
/// derivative obtained by the chain rule through phases and amplitudes.
pub trait WeakAnsatz: Sync {
    fn value(&self, x: f64) -> f64;

    fn dt(&self, x: f64) -> f64;

    /// `+1` for `u_t + (u²)_x`, `-1` for the reversed equation `v_t - (v²)_x`.
    fn flux_sign(&self) -> f64 {
        1.0
    }

    /// Positions of the regularized fronts.
    fn fronts(&self) -> Vec<f64>;

    fn epsilon(&self) -> f64;
}

// The ramp ansatz differentiates ratios of nearly equal profile values, so
// its integrands carry rounding noise well above 1e-12.
fn residual_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-9,
        max_intervals: 8000,
    }
}

fn breaks_for<A: WeakAnsatz + ?Sized>(a: &A) -> Vec<f64> {
    let eps = a.epsilon();
    let mut out = Vec::new();
    for f in a.fronts() {
        for k in [-4.0, -1.0, 0.0, 1.0, 4.0] {
            out.push(f + k * eps);
        }
    }
    out
}

/// `⟨L[u_ε], η⟩ = ∫ u_t η dx - σ ∫ u² η' dx`.
pub fn weak_residual<A: WeakAnsatz + ?Sized>(a: &A, eta: &TestFunction) -> Result<f64> {
    let (lo, hi) = eta.support();
    let mut pts = breaks_for(a);
    pts.push(0.5 * (lo + hi));
    let time_part =
        integrate_with_breaks(|x| a.dt(x) * eta.value(x), lo, hi, &pts, residual_opts())?;
    let flux_part = integrate_with_breaks(
        |x| {
            let u = a.value(x);
            u * u * eta.derivative(1, x).unwrap_or(f64::NAN)
        },
        lo,
        hi,
        &pts,
        residual_opts(),
    )?;
    let r = time_part - a.flux_sign() * flux_part;
    if !r.is_finite() {
        return Err(Error::NonFinite("weak residual".into()));
    }
    Ok(r)
}

/// Pair `L[u_ε(·, t)]` with the bank at each of `times` and record, per ε,
/// the max over times; fit the order in ε.
pub fn residual_study<F, A>(
    label: &str,
    epsilons: &[f64],
    bank: &TestBank,
    times: &[f64],
    make: F,
) -> Result<ConvergenceReport>
where
    F: Fn(f64, f64) -> Result<A> + Sync,
    A: WeakAnsatz,
{
    if times.is_empty() {
        return Err(Error::InvalidInput("residual study needs at least one time".into()));
    }
    convergence_study(label, epsilons, bank, |eps, eta| {
        let mut worst = 0.0f64;
        for &t in times {
            worst = worst.max(weak_residual(&make(eps, t)?, eta)?.abs());
        }
        Ok(worst)
    })
}

/// Weak Lipschitz check in time: the largest ratio
/// `|⟨u(t_{i+1}) - u(t_i), η⟩| / (Δt · max_i |⟨u_t(t_i), η⟩|)` over the
/// bank. Values of order one mean the pairings move no faster than the
/// sampled time derivative allows; a jump in a pairing shows up as a ratio
/// growing like `1/Δt`.
pub fn weak_continuity_ratio<F, A>(bank: &TestBank, times: &[f64], make: F) -> Result<f64>
where
    F: Fn(f64) -> Result<A>,
    A: WeakAnsatz,
{
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("need ≥2 increasing times".into()));
    }
    let states = times.iter().map(|&t| make(t)).collect::<Result<Vec<A>>>()?;
    let mut ratio = 0.0f64;
    for eta in bank.functions() {
        let mut values = Vec::with_capacity(states.len());
        let mut rate = 0.0f64;
        for s in &states {
            let fronts = breaks_for(s);
            values.push(pair(|x| s.value(x), eta, &fronts)?);
            rate = rate.max(pair(|x| s.dt(x), eta, &fronts)?.abs());
        }
        for (w, dt) in values.windows(2).zip(times.windows(2)) {
            let jump = (w[1] - w[0]).abs();
            let bound = (dt[1] - dt[0]) * rate;
            if jump > 0.0 {
                ratio = ratio.max(if bound > 0.0 { jump / bound } else { f64::INFINITY });
            }
        }
    }
    Ok(ratio)
}

/// Evaluate the profile on a grid.
pub fn sample_profile<A: WeakAnsatz + ?Sized>(a: &A, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| a.value(x)).collect()
}

use super::exact::ReferenceSolution;
use super::godunov::GridSolution;
use crate::error::Result;
use crate::quadrature::{integrate_with_breaks, QuadOptions};

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        ..QuadOptions::default()
    }
}

/// `∫_lo^hi |f - g| dx`, splitting at `breaks`.
pub fn l1_distance<F, G>(f: F, g: G, window: (f64, f64), breaks: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    integrate_with_breaks(|x| (f(x) - g(x)).abs(), window.0, window.1, breaks, opts())
}

/// L¹ distance between a grid solution (piecewise constant) and the exact
/// solution at the grid time, over the grid window.
pub fn l1_grid_error(grid: &GridSolution, exact: &ReferenceSolution) -> Result<f64> {
    let fronts = exact.fronts(grid.t);
    let mut total = 0.0;
    for (i, &v) in grid.values.iter().enumerate() {
        let a = grid.lo + i as f64 * grid.dx;
        let b = a + grid.dx;
        let inside: Vec<f64> = fronts.iter().copied().filter(|&f| f > a && f < b).collect();
        total += integrate_with_breaks(|x| (v - exact.eval(x, grid.t)).abs(), a, b, &inside, opts())?;
    }
    Ok(total)
}

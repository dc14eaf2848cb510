//! Exact entropy solutions and a Godunov solver for `u_t + (u²)_x = 0`.

mod data;
mod exact;
mod godunov;
mod l1;

pub use data::{Affine, Family, PiecewiseInitialData};
pub use exact::{exact_entropy_solution, ReferenceSolution};
pub use godunov::{godunov_flux, godunov_solve, GridSolution};
pub use l1::{l1_distance, l1_grid_error};

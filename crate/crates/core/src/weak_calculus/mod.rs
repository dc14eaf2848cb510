//! Weak pairings with test functions, the small-ε product formulas, and
//! empirical convergence orders in the sense of distributions.

mod convergence;
mod pairing;
mod test_function;

pub use convergence::{check_epsilons, convergence_study, fit_order, residual_order, ConvergenceReport};
pub use pairing::{
    delta_expansion, delta_pairing_direct, pair, pair_sampled, product_asymptotics_delta,
    product_asymptotics_theta, product_pairing_direct, theta_pairing,
};
pub use test_function::{TestBank, TestFunction, FD_TRUSTED_ORDER, MAX_DERIVATIVE};

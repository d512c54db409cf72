//! Quadrature, elliptic integrals, root finding, an adaptive Runge-Kutta
//! integrator and finite-difference helpers.

mod elliptic;
mod fd;
mod ode;
mod quadrature;
mod roots;

pub use elliptic::{elliptic_k, elliptic_k_by_quadrature, EllipticModulus};
pub use fd::{central_diff, central_diff2, relative_error};
pub use ode::{Dopri5, Dopri5Options, OdeError, Step};
pub use quadrature::{
    gauss_legendre_nodes, integrate_1d, integrate_1d_estimate, integrate_endpoint, level_sequence,
    Abscissa, Estimate, QuadratureSpec, Scheme,
};
pub use roots::{find_root, find_root_with, solve_2d, Solve2d, MAX_ROOT_ITERATIONS};

use thiserror::Error;

/// Default root tolerance.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid interval [{a}, {b}]")]
    Interval { a: f64, b: f64 },
    #[error("invalid quadrature spec: {0}")]
    Spec(String),
    #[error("integrand returned {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    #[error("quadrature did not converge: best {best}, error bound {error}")]
    NoConvergence { best: f64, error: f64 },
    #[error("elliptic modulus {0} outside [0, 1)")]
    Modulus(f64),
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root finder hit the iteration cap; last bracket [{lo}, {hi}]")]
    RootNoConvergence { lo: f64, hi: f64 },
    #[error("Newton solve failed, residual {residual:e} after {iterations} iterations")]
    Newton { residual: f64, iterations: usize },
}

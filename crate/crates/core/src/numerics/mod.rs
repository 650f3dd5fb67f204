//! Numerical kernels shared by the solvers.

mod ellipsoid;
mod lambert;
mod lp;
mod quadrature;
mod roots;
mod search;

pub use ellipsoid::{
    ellipsoid_minimize, ellipsoid_minimize_below, Constraint, EllipsoidError, EllipsoidOutcome, EllipsoidSettings, EllipsoidState,
};
pub use lambert::{lambert_w0, LambertDomainError, BRANCH_POINT};
pub use lp::{solve_lp, LpError, LpProblem, LpRow, LpSolution, LpStatus};
pub use quadrature::{quadrature, SimpsonRule};
pub use roots::{bisect, bracketed_newton, RootError};
pub use search::{grid_search_1d, near_tie_clusters, uniform_grid, GridMaximum};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::numerics::{LambertDomainError, LpError, LpStatus, RootError};
use crate::trajectory::TrajectoryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Lambert(#[from] LambertDomainError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear program ended with status {0:?}")]
    LpStatus(LpStatus),
    #[error("horizon {horizon} s cannot cover the flight time {flight_time} s")]
    InfeasibleHorizon { flight_time: f64, horizon: f64 },
    #[error("no endpoint pair admits a feasible trajectory")]
    NoFeasibleCell,
    #[error("ellipsoid method failed: {0}")]
    Ellipsoid(String),
    #[error("bandwidth split did not converge: {0}")]
    Allocation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

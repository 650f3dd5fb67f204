//! Capacity region of a UAV-enabled multiple-access channel under NOMA, FDMA
//! and TDMA, with trajectory optimization on a one-dimensional user line.

pub mod channel;
pub(crate) mod dual;
pub mod error;
pub mod experiments;
pub mod fdma;
pub mod noma;
pub mod numerics;
pub mod scenario;
pub mod tdma;
pub mod trajectory;

pub use dual::SolveDiagnostics;
pub use error::{Error, Result};
pub use scenario::{DualVector, RateProfile, RateTuple, Scenario, Scheme, SolverSettings};

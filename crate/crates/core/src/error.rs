use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero-length path")]
    ZeroLengthPath,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid bound: {0}")]
    InvalidBound(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("alpha undefined (zero-inertia) at s = {s}")]
    AlphaUndefined { s: f64 },
    #[error("beta undefined (zero-inertia) at s = {s}")]
    BetaUndefined { s: f64 },
    #[error("velocity-infeasible path point at s = {s}")]
    VelocityInfeasible { s: f64 },
    #[error("maximum velocity curve vanishes at s = {s}: path untraversable at rest")]
    ZeroMvc { s: f64 },
    #[error("start point (s = {s}, sdot = {sdot}) lies outside the admissible region")]
    OutsideAdmissibleRegion { s: f64, sdot: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("path not traversable: acceleration profile reaches zero velocity at s = {s}")]
    NotTraversable { s: f64 },
    #[error("NI failure: deceleration profile from s = {from_s} left the admissible region at s = {exit_s} without meeting the trajectory")]
    NiFailure { from_s: f64, exit_s: f64 },
    #[error("switch-point cap of {0} exceeded")]
    SwitchPointCap(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Time-optimal path parameterization by phase-plane numerical integration.
//!
//! Given a fixed geometric path and constraints of the form
//! `A(s)·s̈ + B(s)·ṡ² + C(s) ≤ 0` (acceleration/torque) and
//! `A(s)·ṡ + D(s) ≤ 0` (velocity), the planner builds the fastest velocity
//! profile `ṡ(s)` from alternating maximum- and minimum-acceleration curves.
//! The crate also diagnoses when that construction breaks down because of
//! velocity limits.
//!
//! Everything is generic over the scalar type; [`f64`] aliases are provided
//! at the crate root.

pub mod constraints;
pub mod error;
pub mod instances;
pub mod interp;
pub mod limits;
pub mod oracle_dp;
pub mod path;
pub mod planner;
pub mod profiles;
pub mod scalar;
pub mod switch;

pub use constraints::{
    from_generalized_dynamics, unicycle_constraints, AccelRow, GeneralizedDynamics, MvcSample, MvcSource, RowModel,
    StateSample, TabulatedModel, UnicycleModel, VelocityRow,
};
pub use error::{Error, Result};
pub use limits::{compute_limit_curves, DaggerSegment};
pub use oracle_dp::dp_min_time;
pub use path::Point2;
pub use planner::{
    check_property6, ni_plan, plan_unbounded, rt_detect, PlanEvent, PlannerOptions, Property6Report, RtReport,
    DEFAULT_GRID, DEFAULT_SWITCH_CAP,
};
pub use profiles::{
    integrate_alpha, integrate_beta, intersect_profiles, Direction, IntegrationOptions, PhasePoint, ProfileKind,
    Termination,
};
pub use scalar::{Bound, Real};
pub use switch::{find_next_switch, switch_candidates, tangent_points_on_dagger, SourceCurve, SwitchKind, SwitchPoint};

pub type BezierPath = path::BezierPath<f64>;
pub type PathSpec = path::PathSpec<f64>;
pub type ConstraintProfile = constraints::ConstraintProfile<f64>;
pub type LimitCurves = limits::LimitCurves<f64>;
pub type PhaseProfile = profiles::PhaseProfile<f64>;
pub type Trajectory = planner::Trajectory<f64>;

pub type BezierPathF32 = path::BezierPath<f32>;
pub type PathSpecF32 = path::PathSpec<f32>;
pub type ConstraintProfileF32 = constraints::ConstraintProfile<f32>;
pub type LimitCurvesF32 = limits::LimitCurves<f32>;
pub type TrajectoryF32 = planner::Trajectory<f32>;

//! The footstep optimization model: convex regions, the piecewise-linear
//! sin/cos approximation, scenario documents, and assembly of variables,
//! constraints, and the quadratic objective into a [`crate::solver::ModelIR`].

mod builder;
mod geometry;
mod scenario;
mod trig;

pub use builder::{
    build, displacement, mirrored, objective_of, stride_bound, BuildError, BuildOptions,
    BuiltModel, FootstepVars, NormRealization, THETA_RATE_LIMIT,
};
pub use geometry::{Region, RegionError};
pub use scenario::{
    CostSpec, Foot, Modes, Pose, ReachabilityParams, ReducedReach, RegionSpec, Scenario,
    ScenarioError, ScenarioFile,
};
pub use trig::TrigApprox;

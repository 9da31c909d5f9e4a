//! LTL-constrained footstep planning.
//!
//! This crate plans sequences of footsteps (x, y, θ per step) that reach a
//! goal pose while satisfying linear temporal logic specifications over
//! region and foot-contact propositions. The pipeline is:
//!
//! 1. [`ltl`] — parse specification formulas, evaluate them over finite
//!    traces (the ground-truth semantics used to verify solved plans).
//! 2. [`encoder`] — compile formulas into mixed-integer linear constraints
//!    over binary step/proposition variables.
//! 3. [`model`] — assemble the footstep optimization model: quadratic
//!    stride/goal cost, convex region assignment, reachability circles with
//!    piecewise-linear sin/cos, orientation rate limits, and the optional
//!    stride-adjustment and contact-ordering modes.
//! 4. [`solver`] — solve the resulting mixed-integer program with a
//!    branch-and-bound search over ADMM-solved convex relaxations, or export
//!    it as an LP interchange file for external solvers.
//! 5. [`pipeline`] — run a scenario end to end and emit plan JSON and an SVG
//!    figure; [`plan`] re-verifies solved plans against the LTL oracle and
//!    the geometric constraints.

pub mod encoder;
pub mod ltl;
pub mod model;
pub mod pipeline;
pub mod plan;
pub mod render;
pub mod solver;

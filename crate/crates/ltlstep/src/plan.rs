//! Solved footstep plans and their post-solve verification.
//!
//! Verification is independent of the solver: it reads the plan's poses and
//! region assignments, rebuilds the proposition trace, evaluates every
//! specification with the finite-trace oracle, re-checks the geometric
//! constraints under the configured norm realization, and recomputes the
//! objective from the poses.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{evaluate, Trace};
use crate::model::{
    displacement, mirrored, objective_of, BuiltModel, Foot, NormRealization, Scenario, TrigApprox,
    THETA_RATE_LIMIT,
};
use crate::solver::{SolveResult, SolveStatus};

pub const PLAN_SCHEMA_VERSION: u32 = 1;
/// feasibility tolerance for the geometric re-checks
pub const VERIFY_TOL: f64 = 1e-6;
/// goal-attainment tolerances (meters, radians)
pub const GOAL_POS_TOL: f64 = 0.05;
pub const GOAL_THETA_TOL: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PlanStep {
    pub index: usize,
    pub foot: Foot,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub region: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpecVerdict {
    pub formula: String,
    pub satisfied: bool,
}

/// Deterministic solver statistics (wall time deliberately excluded so that
/// repeated runs produce byte-identical artifacts).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolverStats {
    pub nodes: u64,
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FootstepPlan {
    pub version: u32,
    pub scenario: String,
    pub status: String,
    pub objective: Option<f64>,
    pub steps: Vec<PlanStep>,
    pub specs: Vec<SpecVerdict>,
    pub solver: SolverStats,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("plan json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("plan schema version {0} is not supported")]
    Version(u32),
    #[error("solver result carries no solution")]
    NoSolution,
    #[error("step {step} has no region binary set")]
    NoRegion { step: usize },
}

pub fn status_string(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::TimeLimitIncumbent => "time_limit_incumbent",
        SolveStatus::TimeLimitNoIncumbent => "time_limit_no_incumbent",
    }
}

/// Assemble a plan from a solved model. The solution must carry values
/// (status optimal or an incumbent at the time limit).
pub fn extract_plan(
    built: &BuiltModel,
    scenario: &Scenario,
    result: &SolveResult,
) -> Result<FootstepPlan, PlanError> {
    let x = result.x.as_ref().ok_or(PlanError::NoSolution)?;
    let n = scenario.num_steps;
    let mut steps = Vec::with_capacity(n);
    for j in 1..=n {
        let region_idx = (0..scenario.regions.len())
            .find(|&r| x[built.vars.h[r][j - 1].0] > 0.5)
            .ok_or(PlanError::NoRegion { step: j })?;
        let foot = match (&built.vars.left_leg, &built.vars.right_leg) {
            (Some(ll), Some(_)) => {
                if x[ll[j - 1].0] > 0.5 {
                    Foot::Left
                } else {
                    Foot::Right
                }
            }
            _ => scenario.foot_of_step(j),
        };
        steps.push(PlanStep {
            index: j,
            foot,
            x: x[built.vars.x[j - 1].0],
            y: x[built.vars.y[j - 1].0],
            theta: x[built.vars.theta[j - 1].0],
            region: scenario.regions[region_idx].name.clone(),
        });
    }
    let specs = spec_verdicts(scenario, &steps);
    Ok(FootstepPlan {
        version: PLAN_SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        status: status_string(result.status).to_string(),
        objective: result.objective,
        steps,
        specs,
        solver: SolverStats {
            nodes: result.nodes,
            relative_gap: result.gap,
        },
    })
}

/// Plan emitted for infeasible or no-incumbent runs: no steps, no verdicts.
pub fn empty_plan(scenario: &Scenario, result: &SolveResult) -> FootstepPlan {
    FootstepPlan {
        version: PLAN_SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        status: status_string(result.status).to_string(),
        objective: result.objective,
        steps: Vec::new(),
        specs: Vec::new(),
        solver: SolverStats {
            nodes: result.nodes,
            relative_gap: if result.gap.is_finite() { result.gap } else { -1.0 },
        },
    }
}

/// Rebuild the proposition trace a plan induces: region atoms from the
/// assigned regions, foot atoms from the per-step feet.
pub fn trace_of(scenario: &Scenario, steps: &[PlanStep]) -> Trace {
    let n = steps.len();
    let mut columns: Vec<(String, Vec<bool>)> = scenario
        .regions
        .iter()
        .map(|r| {
            (
                format!("p_{}", r.name),
                steps.iter().map(|s| s.region == r.name).collect(),
            )
        })
        .collect();
    if scenario.contact_ordering {
        columns.push((
            "p_lleg".to_string(),
            steps.iter().map(|s| s.foot == Foot::Left).collect(),
        ));
        columns.push((
            "p_rleg".to_string(),
            steps.iter().map(|s| s.foot == Foot::Right).collect(),
        ));
    }
    Trace::new(n, columns).expect("plan steps form a well-formed trace")
}

fn spec_verdicts(scenario: &Scenario, steps: &[PlanStep]) -> Vec<SpecVerdict> {
    if steps.is_empty() {
        return Vec::new();
    }
    let trace = trace_of(scenario, steps);
    scenario
        .specs
        .iter()
        .map(|(text, formula)| SpecVerdict {
            formula: text.clone(),
            satisfied: evaluate(formula, &trace, 1).unwrap_or(false),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<VerifyCheck>,
    pub recomputed_objective: f64,
}

impl VerifyReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        let check = VerifyCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        };
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Re-check a plan against its scenario: structure, region containment,
/// orientation rate limit, reachability under `realization`, foot
/// alternation, every specification at step 1, and the recomputed objective.
pub fn verify(plan: &FootstepPlan, scenario: &Scenario, realization: NormRealization) -> VerifyReport {
    let mut report = VerifyReport {
        passed: true,
        checks: Vec::new(),
        recomputed_objective: f64::NAN,
    };
    let n = scenario.num_steps;
    report.push(
        "step_count",
        plan.steps.len() == n,
        format!("{} steps, scenario horizon {}", plan.steps.len(), n),
    );
    if plan.steps.len() != n {
        return report;
    }

    for (i, pose) in scenario.initial_stance.iter().enumerate() {
        let s = &plan.steps[i];
        let ok = (s.x - pose.x).abs() <= VERIFY_TOL
            && (s.y - pose.y).abs() <= VERIFY_TOL
            && (s.theta - pose.theta).abs() <= VERIFY_TOL;
        report.push(
            format!("initial_stance_{}", i + 1),
            ok,
            format!("step {} at ({:.4}, {:.4}, {:.4})", i + 1, s.x, s.y, s.theta),
        );
    }

    // region assignment: the assigned region's halfspaces hold
    for s in &plan.steps {
        match scenario.regions.iter().find(|r| r.name == s.region) {
            None => report.push(
                format!("region_step_{}", s.index),
                false,
                format!("unknown region `{}`", s.region),
            ),
            Some(region) => {
                let viol = region.violation([s.x, s.y]);
                report.push(
                    format!("region_step_{}", s.index),
                    viol <= VERIFY_TOL,
                    format!("worst halfspace violation {viol:.3e} in `{}`", s.region),
                );
            }
        }
    }

    for j in 2..=n {
        let d = (plan.steps[j - 1].theta - plan.steps[j - 2].theta).abs();
        report.push(
            format!("theta_rate_{j}"),
            d <= THETA_RATE_LIMIT + VERIFY_TOL,
            format!("|Δθ| = {d:.4}"),
        );
    }

    // foot alternation holds in both modes
    for j in 2..=n {
        let ok = plan.steps[j - 1].foot != plan.steps[j - 2].foot;
        report.push(
            format!("alternation_{j}"),
            ok,
            format!(
                "step {} {} after step {} {}",
                j,
                plan.steps[j - 1].foot,
                j - 1,
                plan.steps[j - 2].foot
            ),
        );
    }

    verify_reachability(&mut report, plan, scenario, realization);

    let trace = trace_of(scenario, &plan.steps);
    for (text, formula) in &scenario.specs {
        let sat = evaluate(formula, &trace, 1).unwrap_or(false);
        report.push(format!("spec `{text}`"), sat, "oracle evaluation at step 1");
    }

    let poses: Vec<[f64; 3]> = plan.steps.iter().map(|s| [s.x, s.y, s.theta]).collect();
    let recomputed = objective_of(scenario, &poses);
    report.recomputed_objective = recomputed;
    if let Some(obj) = plan.objective {
        let ok = (obj - recomputed).abs() <= 1e-6 * obj.abs().max(1.0);
        report.push(
            "objective",
            ok,
            format!("plan {obj:.9} vs recomputed {recomputed:.9}"),
        );
    }
    report
}

fn verify_reachability(
    report: &mut VerifyReport,
    plan: &FootstepPlan,
    scenario: &Scenario,
    realization: NormRealization,
) {
    let sin_approx = TrigApprox::sin_approx();
    let cos_approx = TrigApprox::cos_approx();
    let reach = &scenario.reachability;
    let circles = [(reach.p1, reach.r1), (reach.p2, reach.r2)];
    for j in 3..=plan.steps.len() {
        let cur = &plan.steps[j - 1];
        let prev = &plan.steps[j - 2];
        if !(-PI..=PI).contains(&cur.theta) {
            report.push(format!("theta_box_{j}"), false, format!("θ = {}", cur.theta));
            continue;
        }
        let (s, c) = (sin_approx.eval(cur.theta), cos_approx.eval(cur.theta));
        for (ci, &(p, r)) in circles.iter().enumerate() {
            let d = displacement(
                [prev.x, prev.y],
                [cur.x, cur.y],
                mirrored(p, cur.foot),
                c,
                s,
            );
            let viol = circle_violation(d, r, realization);
            report.push(
                format!("reach{}_step_{}", ci + 1, j),
                viol <= VERIFY_TOL,
                format!("violation {viol:.3e}"),
            );
        }
        // reduced circles bind when the landing step is assigned to a
        // careful-terrain region
        if scenario.reduced_stride_regions.contains(&cur.region) {
            if let Some(red) = &reach.reduced {
                for (ci, &(p, r)) in [(red.p1, red.r1), (red.p2, red.r2)].iter().enumerate() {
                    let d = displacement(
                        [prev.x, prev.y],
                        [cur.x, cur.y],
                        mirrored(p, cur.foot),
                        c,
                        s,
                    );
                    let viol = circle_violation(d, r, realization);
                    report.push(
                        format!("stride{}_step_{}", ci + 1, j),
                        viol <= VERIFY_TOL,
                        format!("reduced-circle violation {viol:.3e}"),
                    );
                }
            }
        }
    }
}

/// Violation of one circle row set under the given realization
/// (<= 0 feasible).
pub fn circle_violation(d: [f64; 2], r: f64, realization: NormRealization) -> f64 {
    match realization {
        NormRealization::Quadratic => (d[0] * d[0] + d[1] * d[1]).sqrt() - r,
        NormRealization::Polygon { k } => {
            let mut worst = f64::NEG_INFINITY;
            for kappa in 0..k {
                let ang = 2.0 * PI * kappa as f64 / k as f64;
                worst = worst.max(ang.cos() * d[0] + ang.sin() * d[1] - r);
            }
            worst
        }
    }
}

pub fn to_json(plan: &FootstepPlan) -> String {
    let mut text = serde_json::to_string_pretty(plan).expect("plan serializes");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<FootstepPlan, PlanError> {
    let plan: FootstepPlan = serde_json::from_str(text)?;
    if plan.version != PLAN_SCHEMA_VERSION {
        return Err(PlanError::Version(plan.version));
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_step_scenario() -> Scenario {
        Scenario::from_json(
            &serde_json::json!({
                "name": "mini",
                "regions": [
                    {"name": "R1", "vertices": [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]}
                ],
                "goal": {"x": 0.0, "y": 0.12, "theta": 0.0},
                "num_steps": 2,
                "initial_stance": [
                    {"x": 0.0, "y": -0.12, "theta": 0.0},
                    {"x": 0.0, "y": 0.12, "theta": 0.0}
                ]
            })
            .to_string(),
        )
        .unwrap()
    }

    fn two_step_plan(scenario: &Scenario) -> FootstepPlan {
        let steps = vec![
            PlanStep {
                index: 1,
                foot: Foot::Right,
                x: 0.0,
                y: -0.12,
                theta: 0.0,
                region: "R1".to_string(),
            },
            PlanStep {
                index: 2,
                foot: Foot::Left,
                x: 0.0,
                y: 0.12,
                theta: 0.0,
                region: "R1".to_string(),
            },
        ];
        let specs = spec_verdicts(scenario, &steps);
        let poses: Vec<[f64; 3]> = steps.iter().map(|s| [s.x, s.y, s.theta]).collect();
        FootstepPlan {
            version: PLAN_SCHEMA_VERSION,
            scenario: scenario.name.clone(),
            status: "optimal".to_string(),
            objective: Some(objective_of(scenario, &poses)),
            steps,
            specs,
            solver: SolverStats {
                nodes: 1,
                relative_gap: 0.0,
            },
        }
    }

    #[test]
    fn valid_plan_verifies() {
        let scenario = two_step_scenario();
        let plan = two_step_plan(&scenario);
        let report = verify(&plan, &scenario, NormRealization::Polygon { k: 8 });
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn displaced_step_fails_region_check() {
        let scenario = two_step_scenario();
        let mut plan = two_step_plan(&scenario);
        plan.steps[1].x = 2.5; // outside R1
        let report = verify(&plan, &scenario, NormRealization::Polygon { k: 8 });
        assert!(!report.passed);
        assert!(report
            .failures()
            .any(|c| c.name == "region_step_2" && c.detail.contains("violation")));
    }

    #[test]
    fn rate_limit_violation_is_reported() {
        let scenario = two_step_scenario();
        let mut plan = two_step_plan(&scenario);
        plan.steps[1].theta = PI / 4.0;
        let report = verify(&plan, &scenario, NormRealization::Polygon { k: 8 });
        assert!(report.failures().any(|c| c.name == "theta_rate_2"));
    }

    #[test]
    fn json_round_trip() {
        let scenario = two_step_scenario();
        let plan = two_step_plan(&scenario);
        let text = to_json(&plan);
        assert_eq!(from_json(&text).unwrap(), plan);
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let scenario = two_step_scenario();
        let mut plan = two_step_plan(&scenario);
        plan.version = 99;
        let text = serde_json::to_string(&plan).unwrap();
        assert!(matches!(from_json(&text).unwrap_err(), PlanError::Version(99)));
    }
}

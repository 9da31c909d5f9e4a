//! End-to-end scenario runs: load, build, solve, verify, emit artifacts.

use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::model::{self, BuildOptions, NormRealization, Scenario, ScenarioError};
use crate::plan::{self, FootstepPlan, PlanError, VerifyReport};
use crate::solver::{self, BnbSettings, SolveStatus, SolverError};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub export_lp: bool,
    pub threads: usize,
    pub time_limit: Option<Duration>,
    pub gap: f64,
    pub realization: NormRealization,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("out"),
            export_lp: false,
            threads: 1,
            time_limit: Some(Duration::from_secs(300)),
            gap: 1e-6,
            realization: NormRealization::Polygon { k: 8 },
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Build(#[from] model::BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("lp export: {0}")]
    Lp(#[from] solver::LpError),
}

/// Files written by a run.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub plan_json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub lp: Option<PathBuf>,
}

#[derive(Debug)]
pub enum RunOutcome {
    /// optimal and verified: the success path (exit 0)
    OptimalVerified {
        plan: FootstepPlan,
        report: VerifyReport,
    },
    /// proven infeasible: the accessibility-probe "no" answer (exit 2)
    Infeasible,
    /// time or node limit (exit 3); the incumbent plan, if any, is emitted
    TimeLimit { plan: Option<FootstepPlan> },
    /// solved but the independent verifier rejected the plan (exit 4)
    VerificationFailed {
        plan: FootstepPlan,
        report: VerifyReport,
    },
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::OptimalVerified { .. } => 0,
            RunOutcome::Infeasible => 2,
            RunOutcome::TimeLimit { .. } => 3,
            RunOutcome::VerificationFailed { .. } => 4,
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub scenario: Scenario,
    pub outcome: RunOutcome,
    pub artifacts: Artifacts,
    pub warnings: Vec<String>,
    pub nodes: u64,
    pub wall_time: Duration,
    /// raw solution vector and the built model's variable layout, for
    /// downstream inspection (tests read trig values through this)
    pub solution: Option<(Vec<f64>, model::BuiltModel)>,
}

/// Solve a scenario end to end and write artifacts into `opts.out_dir`.
pub fn run(scenario_path: &Path, opts: &RunOptions) -> Result<RunReport, PipelineError> {
    let scenario = Scenario::load(scenario_path)?;
    run_scenario(scenario, opts)
}

/// [`run`] on an already-loaded scenario.
pub fn run_scenario(scenario: Scenario, opts: &RunOptions) -> Result<RunReport, PipelineError> {
    std::fs::create_dir_all(&opts.out_dir)?;
    let built = model::build(
        &scenario,
        &BuildOptions {
            realization: opts.realization,
        },
    )?;
    let mut artifacts = Artifacts::default();
    if opts.export_lp {
        let path = opts.out_dir.join(format!("{}.lp", scenario.name));
        solver::write_lp_file(&built.ir, &path)?;
        artifacts.lp = Some(path);
    }

    let settings = BnbSettings {
        gap_rel: opts.gap,
        time_limit: opts.time_limit,
        threads: opts.threads,
        ..BnbSettings::default()
    };
    let result = solver::branch_and_bound(&built.ir, &settings)?;
    let warnings = built.ir.warnings.clone();
    let nodes = result.nodes;
    let wall_time = result.wall_time;

    let (outcome, solution) = match result.status {
        SolveStatus::Optimal => {
            let plan = plan::extract_plan(&built, &scenario, &result)?;
            let report = plan::verify(&plan, &scenario, opts.realization);
            write_artifacts(&plan, &scenario, opts, &mut artifacts)?;
            let x = result.x.clone().expect("optimal result has a solution");
            if report.passed {
                (RunOutcome::OptimalVerified { plan, report }, Some((x, built)))
            } else {
                (
                    RunOutcome::VerificationFailed { plan, report },
                    Some((x, built)),
                )
            }
        }
        SolveStatus::Infeasible => {
            let plan = plan::empty_plan(&scenario, &result);
            write_plan_json(&plan, &scenario, opts, &mut artifacts)?;
            (RunOutcome::Infeasible, None)
        }
        SolveStatus::TimeLimitIncumbent => {
            let plan = plan::extract_plan(&built, &scenario, &result)?;
            write_artifacts(&plan, &scenario, opts, &mut artifacts)?;
            let x = result.x.clone().expect("incumbent present");
            (
                RunOutcome::TimeLimit { plan: Some(plan) },
                Some((x, built)),
            )
        }
        SolveStatus::TimeLimitNoIncumbent => {
            let plan = plan::empty_plan(&scenario, &result);
            write_plan_json(&plan, &scenario, opts, &mut artifacts)?;
            (RunOutcome::TimeLimit { plan: None }, None)
        }
    };

    Ok(RunReport {
        scenario,
        outcome,
        artifacts,
        warnings,
        nodes,
        wall_time,
        solution,
    })
}

fn write_plan_json(
    plan: &FootstepPlan,
    scenario: &Scenario,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), PipelineError> {
    let path = opts.out_dir.join(format!("{}.plan.json", scenario.name));
    std::fs::write(&path, plan::to_json(plan))?;
    artifacts.plan_json = Some(path);
    Ok(())
}

fn write_artifacts(
    plan: &FootstepPlan,
    scenario: &Scenario,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), PipelineError> {
    write_plan_json(plan, scenario, opts, artifacts)?;
    let svg_path = opts.out_dir.join(format!("{}.svg", scenario.name));
    std::fs::write(&svg_path, crate::render::render_svg(plan, scenario))?;
    artifacts.svg = Some(svg_path);
    Ok(())
}

/// Verify an existing plan file against a scenario (the `--verify-only` path).
pub fn verify_plan_file(
    scenario_path: &Path,
    plan_path: &Path,
    realization: NormRealization,
) -> Result<(Scenario, FootstepPlan, VerifyReport), PipelineError> {
    let scenario = Scenario::load(scenario_path)?;
    let plan = plan::from_json(&std::fs::read_to_string(plan_path)?)?;
    let report = plan::verify(&plan, &scenario, realization);
    Ok((scenario, plan, report))
}

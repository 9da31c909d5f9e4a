use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{Region, RegionError};
use crate::ltl::{Formula, ParseError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("duplicate region name `{0}`")]
    DuplicateRegion(String),
    #[error("num_steps must be at least 2 (the fixed double-support stance), got {0}")]
    BadHorizon(usize),
    #[error("{field}: θ = {value} outside [−π, π]")]
    ThetaRange { field: &'static str, value: f64 },
    #[error("initial stance steps differ in orientation by {0}, beyond the π/8 rate limit")]
    StanceRate(f64),
    #[error("initial step {index} at ({x}, {y}) lies in no region")]
    StanceOutsideRegions { index: usize, x: f64, y: f64 },
    #[error("cost matrix {name} is not symmetric positive semidefinite")]
    CostNotPsd { name: &'static str },
    #[error("reachability radii must be positive")]
    BadRadius,
    #[error("reduced radius r{i}s = {reduced} exceeds nominal {nominal}")]
    ReducedRadius { i: usize, reduced: f64, nominal: f64 },
    #[error("in `{formula}`: {source}")]
    Formula {
        formula: String,
        source: ParseError,
    },
    #[error("in `{formula}`: atom `{atom}` matches no region or foot proposition (known: {})", known.join(", "))]
    UnknownAtom {
        formula: String,
        atom: String,
        known: Vec<String>,
    },
    #[error("reduced_stride_regions entry `{0}` is not a region name")]
    UnknownStrideRegion(String),
    #[error("reduced_stride_regions given but reachability.reduced parameters are missing")]
    MissingReducedParams,
    #[error("workspace box is empty")]
    EmptyWorkspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Foot {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Foot {
    pub fn other(self) -> Foot {
        match self {
            Foot::Left => Foot::Right,
            Foot::Right => Foot::Left,
        }
    }
}

impl fmt::Display for Foot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Foot::Left => write!(f, "L"),
            Foot::Right => write!(f, "R"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Reachability circles in the previous-foot frame, for a left-foot stride;
/// mirrored in y for right-foot strides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityParams {
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub r1: f64,
    pub r2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedReach>,
}

/// Smaller, less offset circles for careful-terrain strides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedReach {
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub r1: f64,
    pub r2: f64,
}

impl Default for ReachabilityParams {
    fn default() -> Self {
        Self {
            p1: [0.0, 0.10],
            p2: [0.0, 0.35],
            r1: 0.60,
            r2: 0.35,
            reduced: Some(ReducedReach {
                p1: [0.0, 0.15],
                p2: [0.0, 0.275],
                r1: 0.30,
                r2: 0.175,
            }),
        }
    }
}

fn default_q() -> [[f64; 3]; 3] {
    [[1000.0, 0.0, 0.0], [0.0, 1000.0, 0.0], [0.0, 0.0, 100.0]]
}

fn default_r() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostSpec {
    #[serde(default = "default_q")]
    pub q: [[f64; 3]; 3],
    #[serde(default = "default_r")]
    pub r: [[f64; 3]; 3],
}

impl Default for CostSpec {
    fn default() -> Self {
        Self {
            q: default_q(),
            r: default_r(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Modes {
    #[serde(default)]
    pub contact_ordering: bool,
    #[serde(default)]
    pub reduced_stride_regions: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: String,
    pub vertices: Vec<[f64; 2]>,
}

fn default_first_foot() -> Foot {
    Foot::Right
}

fn default_workspace() -> [[f64; 2]; 2] {
    [[-10.0, 10.0], [-10.0, 10.0]]
}

/// On-disk scenario document. See the README for the schema reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub regions: Vec<RegionSpec>,
    pub goal: Pose,
    pub num_steps: usize,
    pub initial_stance: [Pose; 2],
    #[serde(default)]
    pub cost: CostSpec,
    #[serde(default)]
    pub reachability: ReachabilityParams,
    #[serde(default)]
    pub specs: Vec<String>,
    #[serde(default)]
    pub modes: Modes,
    #[serde(default = "default_workspace")]
    pub workspace: [[f64; 2]; 2],
    #[serde(default = "default_first_foot")]
    pub first_foot: Foot,
}

/// Validated scenario ready for model building.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub regions: Vec<Region>,
    pub goal: Pose,
    pub num_steps: usize,
    pub initial_stance: [Pose; 2],
    pub q: [[f64; 3]; 3],
    pub r_step: [[f64; 3]; 3],
    pub reachability: ReachabilityParams,
    pub specs: Vec<(String, Formula)>,
    pub contact_ordering: bool,
    pub reduced_stride_regions: Vec<String>,
    pub workspace: [[f64; 2]; 2],
    pub first_foot: Foot,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Foot making step `j` (1-based) under fixed alternation.
    pub fn foot_of_step(&self, j: usize) -> Foot {
        if j % 2 == 1 {
            self.first_foot
        } else {
            self.first_foot.other()
        }
    }

    /// Atom names available to specifications.
    pub fn known_atoms(&self) -> Vec<String> {
        let mut atoms: Vec<String> = self
            .regions
            .iter()
            .map(|r| format!("p_{}", r.name))
            .collect();
        if self.contact_ordering {
            atoms.push("p_lleg".to_string());
            atoms.push("p_rleg".to_string());
        }
        atoms
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        if file.num_steps < 2 {
            return Err(ScenarioError::BadHorizon(file.num_steps));
        }
        if !(-PI..=PI).contains(&file.goal.theta) {
            return Err(ScenarioError::ThetaRange {
                field: "goal",
                value: file.goal.theta,
            });
        }
        let mut regions = Vec::with_capacity(file.regions.len());
        for spec in &file.regions {
            if regions.iter().any(|r: &Region| r.name == spec.name) {
                return Err(ScenarioError::DuplicateRegion(spec.name.clone()));
            }
            regions.push(Region::from_vertices(spec.name.clone(), &spec.vertices)?);
        }
        for (i, pose) in file.initial_stance.iter().enumerate() {
            if !(-PI..=PI).contains(&pose.theta) {
                return Err(ScenarioError::ThetaRange {
                    field: "initial_stance",
                    value: pose.theta,
                });
            }
            if !regions.iter().any(|r| r.contains([pose.x, pose.y], 1e-9)) {
                return Err(ScenarioError::StanceOutsideRegions {
                    index: i + 1,
                    x: pose.x,
                    y: pose.y,
                });
            }
        }
        let dtheta = (file.initial_stance[1].theta - file.initial_stance[0].theta).abs();
        if dtheta > PI / 8.0 + 1e-12 {
            return Err(ScenarioError::StanceRate(dtheta));
        }
        check_psd(&file.cost.q).map_err(|()| ScenarioError::CostNotPsd { name: "Q" })?;
        check_psd(&file.cost.r).map_err(|()| ScenarioError::CostNotPsd { name: "R" })?;
        let reach = &file.reachability;
        if reach.r1 <= 0.0 || reach.r2 <= 0.0 {
            return Err(ScenarioError::BadRadius);
        }
        if let Some(red) = &reach.reduced {
            if red.r1 <= 0.0 || red.r2 <= 0.0 {
                return Err(ScenarioError::BadRadius);
            }
            if red.r1 > reach.r1 {
                return Err(ScenarioError::ReducedRadius {
                    i: 1,
                    reduced: red.r1,
                    nominal: reach.r1,
                });
            }
            if red.r2 > reach.r2 {
                return Err(ScenarioError::ReducedRadius {
                    i: 2,
                    reduced: red.r2,
                    nominal: reach.r2,
                });
            }
        }
        if file.workspace[0][0] >= file.workspace[0][1] || file.workspace[1][0] >= file.workspace[1][1]
        {
            return Err(ScenarioError::EmptyWorkspace);
        }
        for sr in &file.modes.reduced_stride_regions {
            if !regions.iter().any(|r| &r.name == sr) {
                return Err(ScenarioError::UnknownStrideRegion(sr.clone()));
            }
        }
        if !file.modes.reduced_stride_regions.is_empty() && reach.reduced.is_none() {
            return Err(ScenarioError::MissingReducedParams);
        }

        let scenario = Self {
            name: file.name,
            regions,
            goal: file.goal,
            num_steps: file.num_steps,
            initial_stance: file.initial_stance,
            q: file.cost.q,
            r_step: file.cost.r,
            reachability: file.reachability,
            specs: Vec::new(),
            contact_ordering: file.modes.contact_ordering,
            reduced_stride_regions: file.modes.reduced_stride_regions,
            workspace: file.workspace,
            first_foot: file.first_foot,
        };

        let known = scenario.known_atoms();
        let mut specs = Vec::with_capacity(file.specs.len());
        for text in &file.specs {
            let formula = crate::ltl::parse(text).map_err(|source| ScenarioError::Formula {
                formula: text.clone(),
                source,
            })?;
            for atom in formula.atoms() {
                if !known.contains(&atom) {
                    return Err(ScenarioError::UnknownAtom {
                        formula: text.clone(),
                        atom,
                        known: known.clone(),
                    });
                }
            }
            specs.push((text.clone(), formula));
        }
        Ok(Self { specs, ..scenario })
    }
}

fn check_psd(m: &[[f64; 3]; 3]) -> Result<(), ()> {
    for i in 0..3 {
        for j in 0..3 {
            if !m[i][j].is_finite() || (m[i][j] - m[j][i]).abs() > 1e-9 {
                return Err(());
            }
        }
    }
    let mut dense = nalgebra::Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            dense[(i, j)] = m[i][j];
        }
        dense[(i, i)] += 1e-10;
    }
    nalgebra::Cholesky::new(dense).map(|_| ()).ok_or(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "name": "t",
            "regions": [
                {"name": "R1", "vertices": [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]}
            ],
            "goal": {"x": 0.5, "y": 0.5, "theta": 0.0},
            "num_steps": 4,
            "initial_stance": [
                {"x": 0.0, "y": -0.12, "theta": 0.0},
                {"x": 0.0, "y": 0.12, "theta": 0.0}
            ]
        })
    }

    #[test]
    fn minimal_scenario_loads_with_defaults() {
        let s = Scenario::from_json(&minimal_json().to_string()).unwrap();
        assert_eq!(s.num_steps, 4);
        assert_eq!(s.q[0][0], 1000.0);
        assert_eq!(s.reachability.r1, 0.60);
        assert_eq!(s.first_foot, Foot::Right);
        assert_eq!(s.foot_of_step(1), Foot::Right);
        assert_eq!(s.foot_of_step(2), Foot::Left);
    }

    #[test]
    fn unknown_field_is_rejected_with_path() {
        let mut j = minimal_json();
        j["goal_pose"] = serde_json::json!(1);
        let err = Scenario::from_json(&j.to_string()).unwrap_err();
        assert!(err.to_string().contains("goal_pose"), "{err}");
    }

    #[test]
    fn stance_outside_regions_is_rejected() {
        let mut j = minimal_json();
        j["initial_stance"][0]["x"] = serde_json::json!(5.0);
        let err = Scenario::from_json(&j.to_string()).unwrap_err();
        assert!(matches!(err, ScenarioError::StanceOutsideRegions { index: 1, .. }));
    }

    #[test]
    fn unknown_atom_is_reported_with_the_formula() {
        let mut j = minimal_json();
        j["specs"] = serde_json::json!(["F p_R9"]);
        let err = Scenario::from_json(&j.to_string()).unwrap_err();
        match err {
            ScenarioError::UnknownAtom { formula, atom, .. } => {
                assert_eq!(formula, "F p_R9");
                assert_eq!(atom, "p_R9");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn foot_atoms_require_contact_ordering() {
        let mut j = minimal_json();
        j["specs"] = serde_json::json!(["G (p_lleg | p_rleg)"]);
        assert!(matches!(
            Scenario::from_json(&j.to_string()).unwrap_err(),
            ScenarioError::UnknownAtom { .. }
        ));
        j["modes"] = serde_json::json!({"contact_ordering": true});
        assert!(Scenario::from_json(&j.to_string()).is_ok());
    }

    #[test]
    fn non_psd_cost_is_rejected() {
        let mut j = minimal_json();
        j["cost"] = serde_json::json!({
            "q": [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            "r": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        });
        assert!(matches!(
            Scenario::from_json(&j.to_string()).unwrap_err(),
            ScenarioError::CostNotPsd { name: "Q" }
        ));
    }

    #[test]
    fn formula_errors_carry_position() {
        let mut j = minimal_json();
        j["specs"] = serde_json::json!(["F (p_R1 |"]);
        let err = Scenario::from_json(&j.to_string()).unwrap_err();
        assert!(err.to_string().contains("1:10"), "{err}");
    }

    #[test]
    fn bad_horizon_is_rejected() {
        let mut j = minimal_json();
        j["num_steps"] = serde_json::json!(1);
        assert!(matches!(
            Scenario::from_json(&j.to_string()).unwrap_err(),
            ScenarioError::BadHorizon(1)
        ));
    }
}

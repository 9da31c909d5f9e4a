use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a variable in a [`ModelIR`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Eq => write!(f, "="),
            Sense::Ge => write!(f, ">="),
        }
    }
}

/// Sparse linear row `terms · x  sense  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinRow {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Affine expression `terms · x + constant`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(v: VarId, c: f64) -> Self {
        Self {
            terms: vec![(v, c)],
            constant: 0.0,
        }
    }

    pub fn push(&mut self, v: VarId, c: f64) {
        if c != 0.0 {
            self.terms.push((v, c));
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * x[v.0]).sum::<f64>()
    }

    /// Interval bound of the expression over the variables' boxes.
    pub fn bounds(&self, vars: &[Variable]) -> (f64, f64) {
        let mut lo = self.constant;
        let mut hi = self.constant;
        for &(v, c) in &self.terms {
            let (vl, vu) = (vars[v.0].lb, vars[v.0].ub);
            if c >= 0.0 {
                lo += c * vl;
                hi += c * vu;
            } else {
                lo += c * vu;
                hi += c * vl;
            }
        }
        (lo, hi)
    }
}

/// Euclidean-norm row `‖(exprs[0], exprs[1])‖₂ <= radius`, the quadratic
/// realization of a reachability circle. `radius` is affine so big-M guard
/// terms can relax the row.
#[derive(Debug, Clone, PartialEq)]
pub struct NormRow {
    pub name: String,
    pub exprs: [LinExpr; 2],
    pub radius: LinExpr,
}

/// Objective `Σ quad c·x_i·x_j + Σ lin c·x_i + constant`, with `i <= j` in
/// every quadratic term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Objective {
    pub quad: Vec<(VarId, VarId, f64)>,
    pub lin: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl Objective {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let q: f64 = self
            .quad
            .iter()
            .map(|&(i, j, c)| c * x[i.0] * x[j.0])
            .sum();
        let l: f64 = self.lin.iter().map(|&(v, c)| c * x[v.0]).sum();
        q + l + self.constant
    }
}

/// Merge duplicate variables, drop exact zeros, sort by variable id.
pub(crate) fn canonical_terms(terms: Vec<(VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut terms = terms;
    terms.sort_by_key(|&(v, _)| v);
    let mut out: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match out.last_mut() {
            Some((lv, lc)) if *lv == v => *lc += c,
            _ => out.push((v, c)),
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    out
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("variable `{0}` has empty bound interval [{1}, {2}]")]
    EmptyBounds(String, f64, f64),
    #[error("objective quadratic form is not positive semidefinite")]
    ObjectiveNotPsd,
    #[error("row `{row}` references unknown variable id {id}")]
    UnknownVar { row: String, id: usize },
}

/// Solver-agnostic mixed-integer model: variables, sparse linear rows,
/// optional Euclidean-norm rows, and a convex quadratic objective.
///
/// Sum-to-one binary groups registered via [`ModelIR::add_sos1_group`] are
/// branching hints only; the defining `Σ = 1` row must be added separately.
#[derive(Debug, Clone, Default)]
pub struct ModelIR {
    pub vars: Vec<Variable>,
    pub rows: Vec<LinRow>,
    pub norm_rows: Vec<NormRow>,
    pub objective: Objective,
    pub sos1_groups: Vec<Vec<VarId>>,
    pub warnings: Vec<String>,
    row_count: usize,
}

impl ModelIR {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> VarId {
        let id = VarId(self.vars.len());
        self.vars.push(Variable {
            name: name.into(),
            kind: VarKind::Continuous,
            lb,
            ub,
        });
        id
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        let id = VarId(self.vars.len());
        self.vars.push(Variable {
            name: name.into(),
            kind: VarKind::Binary,
            lb: 0.0,
            ub: 1.0,
        });
        id
    }

    /// Pin a variable to a single value by collapsing its bounds.
    pub fn fix(&mut self, v: VarId, value: f64) {
        self.vars[v.0].lb = value;
        self.vars[v.0].ub = value;
    }

    pub fn set_bounds(&mut self, v: VarId, lb: f64, ub: f64) {
        self.vars[v.0].lb = lb;
        self.vars[v.0].ub = ub;
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        self.row_count += 1;
        self.rows.push(LinRow {
            name: name.into(),
            terms: canonical_terms(terms),
            sense,
            rhs,
        });
    }

    /// Add a row named by a deterministic counter (`c<k>_<tag>`).
    pub fn add_tagged_row(
        &mut self,
        tag: &str,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let name = format!("c{}_{}", self.row_count, tag);
        self.add_row(name, terms, sense, rhs);
    }

    pub fn add_norm_row(&mut self, name: impl Into<String>, exprs: [LinExpr; 2], radius: LinExpr) {
        self.norm_rows.push(NormRow {
            name: name.into(),
            exprs,
            radius,
        });
    }

    pub fn add_sos1_group(&mut self, members: Vec<VarId>) {
        self.sos1_groups.push(members);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }

    pub fn binary_ids(&self) -> Vec<VarId> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
            .collect()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .map(VarId)
    }

    /// Check coefficients, bounds, variable references, and that the
    /// objective's quadratic form is PSD (attempted Cholesky with a small
    /// diagonal shift to absorb roundoff).
    pub fn validate(&self) -> Result<(), ModelError> {
        for v in &self.vars {
            if !v.lb.is_finite() && v.lb != f64::NEG_INFINITY
                || !v.ub.is_finite() && v.ub != f64::INFINITY
            {
                return Err(ModelError::NonFinite(format!("bounds of `{}`", v.name)));
            }
            if v.lb > v.ub {
                return Err(ModelError::EmptyBounds(v.name.clone(), v.lb, v.ub));
            }
        }
        let check_terms = |row: &str, terms: &[(VarId, f64)]| -> Result<(), ModelError> {
            for &(v, c) in terms {
                if v.0 >= self.vars.len() {
                    return Err(ModelError::UnknownVar {
                        row: row.to_string(),
                        id: v.0,
                    });
                }
                if !c.is_finite() {
                    return Err(ModelError::NonFinite(format!("row `{row}`")));
                }
            }
            Ok(())
        };
        for r in &self.rows {
            check_terms(&r.name, &r.terms)?;
            if !r.rhs.is_finite() {
                return Err(ModelError::NonFinite(format!("rhs of `{}`", r.name)));
            }
        }
        for nr in &self.norm_rows {
            check_terms(&nr.name, &nr.exprs[0].terms)?;
            check_terms(&nr.name, &nr.exprs[1].terms)?;
            check_terms(&nr.name, &nr.radius.terms)?;
        }
        for &(i, j, c) in &self.objective.quad {
            if i.0 >= self.vars.len() || j.0 >= self.vars.len() || i > j {
                return Err(ModelError::UnknownVar {
                    row: "objective".to_string(),
                    id: i.0.max(j.0),
                });
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite("objective".to_string()));
            }
        }
        check_terms("objective", &self.objective.lin)?;
        if !self.objective_is_psd() {
            return Err(ModelError::ObjectiveNotPsd);
        }
        Ok(())
    }

    fn objective_is_psd(&self) -> bool {
        if self.objective.quad.is_empty() {
            return true;
        }
        // only variables that actually occur quadratically matter
        let mut active: Vec<usize> = self
            .objective
            .quad
            .iter()
            .flat_map(|&(i, j, _)| [i.0, j.0])
            .collect();
        active.sort_unstable();
        active.dedup();
        let pos: HashMap<usize, usize> = active.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let n = active.len();
        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut scale = 0.0f64;
        for &(i, j, c) in &self.objective.quad {
            let (a, b) = (pos[&i.0], pos[&j.0]);
            // objective stores c·x_i·x_j; symmetric matrix entry is c/2 off-diagonal
            if a == b {
                dense[(a, a)] += c;
            } else {
                dense[(a, b)] += c / 2.0;
                dense[(b, a)] += c / 2.0;
            }
            scale = scale.max(c.abs());
        }
        let shift = 1e-10 * scale.max(1.0);
        for d in 0..n {
            dense[(d, d)] += shift;
        }
        nalgebra::Cholesky::new(dense).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_validation_accepts_diagonal() {
        let mut m = ModelIR::new();
        let x = m.add_continuous("x", 0.0, 1.0);
        m.objective.quad.push((x, x, 2.0));
        assert!(m.validate().is_ok());
    }

    #[test]
    fn psd_validation_rejects_indefinite() {
        let mut m = ModelIR::new();
        let x = m.add_continuous("x", 0.0, 1.0);
        let y = m.add_continuous("y", 0.0, 1.0);
        // x*y alone has eigenvalues ±1/2
        m.objective.quad.push((x, y, 1.0));
        assert_eq!(m.validate().unwrap_err(), ModelError::ObjectiveNotPsd);
    }

    #[test]
    fn lin_expr_interval_bounds() {
        let mut m = ModelIR::new();
        let x = m.add_continuous("x", -1.0, 2.0);
        let y = m.add_continuous("y", 0.0, 3.0);
        let mut e = LinExpr::constant(1.0);
        e.push(x, 2.0);
        e.push(y, -1.0);
        assert_eq!(e.bounds(&m.vars), (1.0 - 2.0 - 3.0, 1.0 + 4.0));
    }

    #[test]
    fn empty_bounds_rejected() {
        let mut m = ModelIR::new();
        let x = m.add_continuous("x", 0.0, 1.0);
        m.set_bounds(x, 2.0, 1.0);
        assert!(matches!(
            m.validate().unwrap_err(),
            ModelError::EmptyBounds(..)
        ));
    }
}

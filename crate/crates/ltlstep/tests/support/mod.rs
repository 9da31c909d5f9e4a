//! Shared test oracles, independent of the production solve paths:
//! a propagation+DFS feasibility decider for pure-binary models, a dense
//! primal active-set QP solver, and brute-force mixed-integer enumeration.

#![allow(dead_code)]

use ltlstep::solver::{ModelIR, Sense, VarKind};
use nalgebra::{DMatrix, DVector};

const EPS: f64 = 1e-6;

/// Decide feasibility of a model whose variables are all binary, by bound
/// propagation with depth-first search on the undetermined variables.
pub fn binary_feasible(model: &ModelIR) -> bool {
    assert!(
        model
            .vars
            .iter()
            .all(|v| v.kind == VarKind::Binary),
        "the binary feasibility oracle only handles pure-binary models"
    );
    // domain bitmask: 1 = can be 0, 2 = can be 1
    let dom: Vec<u8> = model
        .vars
        .iter()
        .map(|v| {
            let mut d = 0;
            if v.lb < 0.5 {
                d |= 1;
            }
            if v.ub > 0.5 {
                d |= 2;
            }
            d
        })
        .collect();
    if dom.iter().any(|&d| d == 0) {
        return false;
    }
    search(model, dom)
}

fn search(model: &ModelIR, mut dom: Vec<u8>) -> bool {
    if !propagate(model, &mut dom) {
        return false;
    }
    match dom.iter().position(|&d| d == 3) {
        None => true, // all fixed and every row consistent
        Some(i) => {
            let mut zero = dom.clone();
            zero[i] = 1;
            if search(model, zero) {
                return true;
            }
            dom[i] = 2;
            search(model, dom)
        }
    }
}

/// Tighten domains against every row until a fixpoint; false on contradiction.
fn propagate(model: &ModelIR, dom: &mut [u8]) -> bool {
    loop {
        let mut changed = false;
        for row in &model.rows {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for &(v, c) in &row.terms {
                match dom[v.0] {
                    1 => {}
                    2 => {
                        lo += c;
                        hi += c;
                    }
                    _ => {
                        lo += c.min(0.0);
                        hi += c.max(0.0);
                    }
                }
            }
            let (row_lo, row_hi) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Eq => (row.rhs, row.rhs),
            };
            if lo > row_hi + EPS || hi < row_lo - EPS {
                return false;
            }
            for &(v, c) in &row.terms {
                if dom[v.0] != 3 {
                    continue;
                }
                // activity bounds with this variable forced to each value
                let (rest_lo, rest_hi) = (lo - c.min(0.0), hi - c.max(0.0));
                let feasible = |val: f64| {
                    rest_lo + c * val <= row_hi + EPS && rest_hi + c * val >= row_lo - EPS
                };
                let can0 = feasible(0.0);
                let can1 = feasible(1.0);
                match (can0, can1) {
                    (false, false) => return false,
                    (true, false) => {
                        dom[v.0] = 1;
                        changed = true;
                    }
                    (false, true) => {
                        dom[v.0] = 2;
                        changed = true;
                    }
                    (true, true) => {}
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Fix the binding binaries of `atoms` to a trace given as bit-columns and
/// decide feasibility. `assignment[a][k]` is atom `a` at step `k+1`.
pub fn feasible_under_assignment(
    model: &ModelIR,
    binding: &ltlstep::encoder::AtomBinding,
    atoms: &[&str],
    assignment: &[Vec<bool>],
) -> bool {
    let mut pinned = model.clone();
    for (ai, atom) in atoms.iter().enumerate() {
        let vars = binding.get(atom).expect("atom bound");
        for (k, &val) in assignment[ai].iter().enumerate() {
            pinned.fix(vars[k], if val { 1.0 } else { 0.0 });
        }
    }
    binary_feasible(&pinned)
}

/// Dense primal active-set method for `min ½xᵀPx + qᵀx  s.t.  Ax <= b`,
/// with `P` positive definite and a strictly feasible start `x0`.
pub fn active_set_qp(
    p: &DMatrix<f64>,
    q: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    x0: DVector<f64>,
) -> (DVector<f64>, f64) {
    let n = p.nrows();
    let m = a.nrows();
    let mut x = x0;
    let mut working: Vec<usize> = Vec::new();
    for _ in 0..10_000 {
        let nw = working.len();
        let mut kkt = DMatrix::<f64>::zeros(n + nw, n + nw);
        kkt.view_mut((0, 0), (n, n)).copy_from(p);
        for (wi, &row) in working.iter().enumerate() {
            for j in 0..n {
                kkt[(n + wi, j)] = a[(row, j)];
                kkt[(j, n + wi)] = a[(row, j)];
            }
        }
        let grad = p * &x + q;
        let mut rhs = DVector::<f64>::zeros(n + nw);
        for i in 0..n {
            rhs[i] = -grad[i];
        }
        let sol = kkt
            .full_piv_lu()
            .solve(&rhs)
            .expect("active-set KKT system is nonsingular for PD P");
        let d = sol.rows(0, n).into_owned();
        if d.amax() <= 1e-11 {
            // multipliers for the working set
            let lambda = sol.rows(n, nw).into_owned();
            let mut worst: Option<(usize, f64)> = None;
            for (wi, &l) in lambda.iter().enumerate() {
                if l < -1e-9 && worst.map_or(true, |(_, w)| l < w) {
                    worst = Some((wi, l));
                }
            }
            match worst {
                None => {
                    let obj = 0.5 * (x.transpose() * p * &x)[(0, 0)] + q.dot(&x);
                    return (x, obj);
                }
                Some((wi, _)) => {
                    working.remove(wi);
                }
            }
        } else {
            let mut alpha = 1.0f64;
            let mut blocker: Option<usize> = None;
            for i in 0..m {
                if working.contains(&i) {
                    continue;
                }
                let ad = a.row(i).transpose().dot(&d);
                if ad > 1e-12 {
                    let slack = b[i] - a.row(i).transpose().dot(&x);
                    let step = slack / ad;
                    if step < alpha {
                        alpha = step;
                        blocker = Some(i);
                    }
                }
            }
            x += alpha * &d;
            if let Some(bi) = blocker {
                working.push(bi);
            }
        }
    }
    panic!("active-set reference did not converge");
}

/// Brute-force the mixed-integer optimum: enumerate every assignment of the
/// free binaries, solve each continuous restriction, and take the best.
pub fn enumerate_mip(model: &ModelIR, admm: &ltlstep::solver::AdmmSettings) -> Option<f64> {
    use ltlstep::solver::{RelaxStatus, RelaxedQp};
    let free: Vec<usize> = model
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary && v.ub - v.lb > 0.5)
        .map(|(i, _)| i)
        .collect();
    assert!(free.len() <= 16, "enumeration oracle limited to 16 binaries");
    let mut qp = RelaxedQp::new(model, admm.clone()).expect("valid model");
    let base_lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
    let base_ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
    let mut best: Option<f64> = None;
    let mut warm: Option<(Vec<f64>, Vec<f64>)> = None;
    for seq in 0u32..(1u32 << free.len()) {
        let mask = seq ^ (seq >> 1); // Gray order keeps consecutive solves close
        let mut lb = base_lb.clone();
        let mut ub = base_ub.clone();
        for (bit, &v) in free.iter().enumerate() {
            let val = if mask & (1 << bit) != 0 { 1.0 } else { 0.0 };
            lb[v] = val;
            ub[v] = val;
        }
        let sol = qp.solve(
            &lb,
            &ub,
            warm.as_ref().map(|(x, y)| (x.as_slice(), y.as_slice())),
        );
        if sol.status == RelaxStatus::Solved {
            best = Some(match best {
                None => sol.objective,
                Some(b) => b.min(sol.objective),
            });
            warm = Some((sol.x, sol.y));
        }
    }
    best
}

/// All 2^(atoms·n) truth assignments as per-atom bit columns.
pub fn all_assignments(num_atoms: usize, n: usize) -> Vec<Vec<Vec<bool>>> {
    let bits = num_atoms * n;
    assert!(bits <= 20);
    (0u32..(1u32 << bits))
        .map(|mask| {
            (0..num_atoms)
                .map(|a| {
                    (0..n)
                        .map(|k| mask & (1 << (a * n + k)) != 0)
                        .collect::<Vec<bool>>()
                })
                .collect()
        })
        .collect()
}

/// Build a trace from per-atom bit columns.
pub fn trace_from(atoms: &[&str], assignment: &[Vec<bool>]) -> ltlstep::ltl::Trace {
    let n = assignment[0].len();
    ltlstep::ltl::Trace::new(
        n,
        atoms
            .iter()
            .zip(assignment)
            .map(|(a, col)| (a.to_string(), col.clone())),
    )
    .unwrap()
}

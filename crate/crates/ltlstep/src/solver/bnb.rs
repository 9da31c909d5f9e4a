//! Best-first branch-and-bound over the binary variables of a [`ModelIR`].
//!
//! Nodes carry bound-difference overlays on an immutable base model, so one
//! KKT factorization serves the whole tree and children warm-start from
//! their parent's primal/dual point. Branching prefers the registered
//! sum-to-one groups (region / trig-segment columns): the group whose most
//! fractional member is worst is split R-ways, fixing one member to 1 and
//! the rest to 0 per child. Remaining fractional binaries (the LTL
//! auxiliaries) get plain 0/1 branching. Ties break on the lowest variable
//! index, and the node queue orders by (bound, insertion counter), which
//! makes single-threaded searches fully deterministic.

use std::collections::BinaryHeap;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::admm::{AdmmSettings, RelaxSolution, RelaxStatus, RelaxedQp};
use super::ir::{ModelError, ModelIR, VarId, VarKind};

#[derive(Debug, Clone)]
pub struct BnbSettings {
    /// relative optimality gap at which incumbents are declared optimal
    pub gap_rel: f64,
    pub gap_abs: f64,
    pub time_limit: Option<Duration>,
    /// node limit; exhausting it reports the time-limit statuses
    pub node_limit: u64,
    /// worker threads servicing the node queue; 1 = deterministic
    pub threads: usize,
    /// a binary within this distance of 0/1 counts as integral
    pub int_tol: f64,
    /// run the rounding heuristic every this many nodes
    pub heuristic_period: u64,
    pub admm: AdmmSettings,
}

impl Default for BnbSettings {
    fn default() -> Self {
        Self {
            gap_rel: 1e-6,
            gap_abs: 1e-9,
            time_limit: Some(Duration::from_secs(300)),
            node_limit: 1_000_000,
            threads: 1,
            int_tol: 1e-6,
            heuristic_period: 40,
            admm: AdmmSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimeLimitIncumbent,
    TimeLimitNoIncumbent,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub x: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// (incumbent − best remaining bound) / max(1, |incumbent|)
    pub gap: f64,
    pub nodes: u64,
    pub wall_time: Duration,
    /// child relaxations observed below their parent bound beyond tolerance
    pub bound_violations: u64,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("relaxation did not converge (primal residual {r_prim:.3e}, dual residual {r_dual:.3e})")]
    Numerical { r_prim: f64, r_dual: f64 },
}

/// Relaxation engine plus a slack feasibility probe for nodes where the
/// iteration stalls without an infeasibility certificate: minimize Σ s²
/// with one slack per row; a positive optimum certifies infeasibility.
struct NodeSolver {
    main: RelaxedQp,
    probe: RelaxedQp,
    n: usize,
    probe_slacks: usize,
}

enum NodeOutcome {
    Solved(RelaxSolution),
    Infeasible,
}

impl NodeSolver {
    fn new(model: &ModelIR, admm: &AdmmSettings) -> Result<Self, SolverError> {
        let main = RelaxedQp::new(model, admm.clone())?;
        let mut probe_model = model.clone();
        probe_model.objective = Default::default();
        let n = model.num_vars();
        let mut slacks = 0;
        for ri in 0..probe_model.rows.len() {
            let s = probe_model.add_continuous(format!("slack_{slacks}"), -1e9, 1e9);
            probe_model.rows[ri].terms.push((s, 1.0));
            probe_model.objective.quad.push((s, s, 1.0));
            slacks += 1;
        }
        for ni in 0..probe_model.norm_rows.len() {
            let s = probe_model.add_continuous(format!("slack_{slacks}"), -1e9, 1e9);
            probe_model.norm_rows[ni].radius.terms.push((s, 1.0));
            probe_model.objective.quad.push((s, s, 1.0));
            slacks += 1;
        }
        let probe = RelaxedQp::new(&probe_model, admm.clone())?;
        Ok(Self {
            main,
            probe,
            n,
            probe_slacks: slacks,
        })
    }

    fn solve(
        &mut self,
        lb: &[f64],
        ub: &[f64],
        warm: Option<(&[f64], &[f64])>,
    ) -> Result<NodeOutcome, SolverError> {
        let sol = self.main.solve(lb, ub, warm);
        match sol.status {
            RelaxStatus::Solved => return Ok(NodeOutcome::Solved(sol)),
            RelaxStatus::PrimalInfeasible => return Ok(NodeOutcome::Infeasible),
            RelaxStatus::IterLimit => {}
        }
        // probe for infeasibility before escalating the effort
        let mut plb = lb.to_vec();
        let mut pub_ = ub.to_vec();
        plb.extend(std::iter::repeat(-1e9).take(self.probe_slacks));
        pub_.extend(std::iter::repeat(1e9).take(self.probe_slacks));
        let probe_sol = self.probe.solve(&plb, &pub_, None);
        if probe_sol.status == RelaxStatus::Solved {
            let max_slack = probe_sol.x[self.n..]
                .iter()
                .fold(0.0f64, |a, &s| a.max(s.abs()));
            if max_slack > 1e-6 {
                return Ok(NodeOutcome::Infeasible);
            }
        }
        // re-solve at tighter settings before giving up
        let sol = self.main.solve_with_effort(lb, ub, Some((&sol.x, &sol.y)), 4);
        match sol.status {
            RelaxStatus::Solved => Ok(NodeOutcome::Solved(sol)),
            RelaxStatus::PrimalInfeasible => Ok(NodeOutcome::Infeasible),
            RelaxStatus::IterLimit => Err(SolverError::Numerical {
                r_prim: sol.primal_residual,
                r_dual: sol.dual_residual,
            }),
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    /// accumulated (var, lb, ub) fixings from the root
    overlay: Vec<(usize, f64, f64)>,
    bound: f64,
    counter: u64,
    warm: Option<Arc<(Vec<f64>, Vec<f64>)>>,
}

struct HeapEntry(Node);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.counter == other.0.counter
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // reversed so the max-heap pops the lowest (bound, counter)
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then(other.0.counter.cmp(&self.0.counter))
    }
}

struct Shared {
    heap: BinaryHeap<HeapEntry>,
    incumbent: Option<(f64, Vec<f64>)>,
    next_counter: u64,
    nodes: u64,
    active: usize,
    stop: Option<StopReason>,
    bound_violations: u64,
}

#[derive(Clone)]
enum StopReason {
    Limit,
    Error(Arc<SolverError>),
}

enum Branch {
    Group(usize),
    Var(usize),
}

fn frac(v: f64) -> f64 {
    (v - v.round()).abs()
}

fn select_branch(
    model: &ModelIR,
    lb: &[f64],
    ub: &[f64],
    x: &[f64],
    int_tol: f64,
) -> Option<Branch> {
    let mut best_group: Option<(usize, f64)> = None;
    for (gi, group) in model.sos1_groups.iter().enumerate() {
        if group.iter().any(|v| lb[v.0] > 0.5) {
            continue; // a member is fixed to 1: group resolved
        }
        let free = group.iter().filter(|v| ub[v.0] > 0.5).count();
        if free < 2 {
            continue;
        }
        let score = group.iter().map(|v| frac(x[v.0])).fold(0.0f64, f64::max);
        if score > int_tol && best_group.map_or(true, |(_, s)| score > s) {
            best_group = Some((gi, score));
        }
    }
    if let Some((gi, _)) = best_group {
        return Some(Branch::Group(gi));
    }
    let mut best_var: Option<(usize, f64)> = None;
    for (i, var) in model.vars.iter().enumerate() {
        if var.kind == VarKind::Binary && ub[i] - lb[i] > 0.5 {
            let f = frac(x[i]);
            if f > int_tol && best_var.map_or(true, |(_, s)| f > s) {
                best_var = Some((i, f));
            }
        }
    }
    best_var.map(|(i, _)| Branch::Var(i))
}

/// Apply a node overlay on top of the model's base bounds.
fn node_bounds(model: &ModelIR, overlay: &[(usize, f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let mut lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
    let mut ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
    for &(i, l, u) in overlay {
        lb[i] = l;
        ub[i] = u;
    }
    (lb, ub)
}

/// Pin every binary to its rounded value (respecting node bounds) and
/// re-solve; a converged solve yields an exactly-integral incumbent.
fn pinned_resolve(
    solver: &mut NodeSolver,
    model: &ModelIR,
    lb: &[f64],
    ub: &[f64],
    x: &[f64],
    warm: Option<(&[f64], &[f64])>,
) -> Option<(f64, Vec<f64>)> {
    let mut plb = lb.to_vec();
    let mut pub_ = ub.to_vec();
    for group in &model.sos1_groups {
        // pick the group's best member deterministically
        let mut pick: Option<(usize, f64)> = None;
        for v in group {
            if pub_[v.0] > 0.5 {
                let val = x[v.0];
                if pick.map_or(true, |(_, best)| val > best) {
                    pick = Some((v.0, val));
                }
            }
        }
        let picked = pick?.0;
        for v in group {
            let val = if v.0 == picked { 1.0 } else { 0.0 };
            if plb[v.0] > val + 0.5 || pub_[v.0] < val - 0.5 {
                return None; // conflicts with node fixings
            }
            plb[v.0] = val;
            pub_[v.0] = val;
        }
    }
    for (i, var) in model.vars.iter().enumerate() {
        if var.kind == VarKind::Binary && pub_[i] - plb[i] > 0.5 {
            let val = x[i].round().clamp(plb[i], pub_[i]).round();
            plb[i] = val;
            pub_[i] = val;
        }
    }
    let sol = solver.main.solve(&plb, &pub_, warm);
    if sol.status != RelaxStatus::Solved {
        return None;
    }
    let mut xs = sol.x;
    for (i, var) in model.vars.iter().enumerate() {
        if var.kind == VarKind::Binary {
            xs[i] = plb[i]; // snap: bounds are collapsed, so this is exact
        }
    }
    Some((sol.objective, xs))
}

/// Branch-and-bound to global optimality (within the gap tolerance) or the
/// best incumbent at the time/node limit.
pub fn branch_and_bound(
    model: &ModelIR,
    settings: &BnbSettings,
) -> Result<SolveResult, SolverError> {
    model.validate()?;
    let start = Instant::now();
    let threads = settings.threads.max(1);

    let shared = Mutex::new(Shared {
        heap: BinaryHeap::new(),
        incumbent: None,
        next_counter: 1,
        nodes: 0,
        active: 0,
        stop: None,
        bound_violations: 0,
    });
    let work_ready = Condvar::new();
    shared.lock().unwrap().heap.push(HeapEntry(Node {
        overlay: Vec::new(),
        bound: f64::NEG_INFINITY,
        counter: 0,
        warm: None,
    }));

    if threads == 1 {
        let mut solver = NodeSolver::new(model, &settings.admm)?;
        worker_loop(model, settings, start, &shared, &work_ready, &mut solver);
    } else {
        let mut solvers = Vec::with_capacity(threads);
        for _ in 0..threads {
            solvers.push(NodeSolver::new(model, &settings.admm)?);
        }
        let shared_ref = &shared;
        let ready_ref = &work_ready;
        std::thread::scope(|scope| {
            for solver in &mut solvers {
                scope.spawn(move || {
                    worker_loop(model, settings, start, shared_ref, ready_ref, solver)
                });
            }
        });
    }

    let shared = shared.into_inner().unwrap();
    if let Some(StopReason::Error(e)) = &shared.stop {
        return Err(SolverError::Numerical {
            r_prim: match e.as_ref() {
                SolverError::Numerical { r_prim, .. } => *r_prim,
                _ => f64::NAN,
            },
            r_dual: match e.as_ref() {
                SolverError::Numerical { r_dual, .. } => *r_dual,
                _ => f64::NAN,
            },
        });
    }

    let wall_time = start.elapsed();
    let remaining_bound = shared
        .heap
        .iter()
        .map(|e| e.0.bound)
        .fold(f64::INFINITY, f64::min);
    let hit_limit = matches!(shared.stop, Some(StopReason::Limit));
    let result = match (&shared.incumbent, hit_limit) {
        (Some((obj, x)), false) => SolveResult {
            status: SolveStatus::Optimal,
            objective: Some(*obj),
            x: Some(x.clone()),
            gap: 0.0,
            nodes: shared.nodes,
            wall_time,
            bound_violations: shared.bound_violations,
        },
        (Some((obj, x)), true) => {
            let lb = remaining_bound.min(*obj);
            SolveResult {
                status: SolveStatus::TimeLimitIncumbent,
                objective: Some(*obj),
                x: Some(x.clone()),
                gap: ((obj - lb) / obj.abs().max(1.0)).max(0.0),
                nodes: shared.nodes,
                wall_time,
                bound_violations: shared.bound_violations,
            }
        }
        (None, false) => SolveResult {
            status: SolveStatus::Infeasible,
            objective: None,
            x: None,
            gap: f64::INFINITY,
            nodes: shared.nodes,
            wall_time,
            bound_violations: shared.bound_violations,
        },
        (None, true) => SolveResult {
            status: SolveStatus::TimeLimitNoIncumbent,
            objective: None,
            x: None,
            gap: f64::INFINITY,
            nodes: shared.nodes,
            wall_time,
            bound_violations: shared.bound_violations,
        },
    };
    Ok(result)
}

fn cutoff(incumbent: &Option<(f64, Vec<f64>)>, settings: &BnbSettings) -> f64 {
    match incumbent {
        Some((obj, _)) => obj - settings.gap_abs.max(settings.gap_rel * obj.abs()),
        None => f64::INFINITY,
    }
}

fn worker_loop(
    model: &ModelIR,
    settings: &BnbSettings,
    start: Instant,
    shared: &Mutex<Shared>,
    work_ready: &Condvar,
    solver: &mut NodeSolver,
) {
    loop {
        // acquire a node
        let (node, node_index) = {
            let mut s = shared.lock().unwrap();
            loop {
                if s.stop.is_some() {
                    work_ready.notify_all();
                    return;
                }
                if let Some(limit) = settings.time_limit {
                    if start.elapsed() >= limit {
                        s.stop = Some(StopReason::Limit);
                        work_ready.notify_all();
                        return;
                    }
                }
                if s.nodes >= settings.node_limit {
                    s.stop = Some(StopReason::Limit);
                    work_ready.notify_all();
                    return;
                }
                let cut = cutoff(&s.incumbent, settings);
                match s.heap.pop() {
                    Some(entry) => {
                        if entry.0.bound >= cut {
                            // bound-dominated: drop and keep draining
                            continue;
                        }
                        s.active += 1;
                        s.nodes += 1;
                        break (entry.0, s.nodes);
                    }
                    None => {
                        if s.active == 0 {
                            work_ready.notify_all();
                            return; // search exhausted
                        }
                        s = work_ready.wait(s).unwrap();
                    }
                }
            }
        };

        let (lb, ub) = node_bounds(model, &node.overlay);
        let warm = node.warm.as_deref().map(|(x, y)| (x.as_slice(), y.as_slice()));
        let outcome = solver.solve(&lb, &ub, warm);

        let mut s = shared.lock().unwrap();
        s.active -= 1;
        match outcome {
            Err(e) => {
                s.stop = Some(StopReason::Error(Arc::new(e)));
            }
            Ok(NodeOutcome::Infeasible) => {}
            Ok(NodeOutcome::Solved(sol)) => {
                if node.bound.is_finite()
                    && sol.objective < node.bound - 1e-8 * node.bound.abs().max(1.0)
                {
                    s.bound_violations += 1;
                }
                let cut = cutoff(&s.incumbent, settings);
                if sol.objective < cut {
                    match select_branch(model, &lb, &ub, &sol.x, settings.int_tol) {
                        None => {
                            // integral relaxation: pin and re-solve for an exact incumbent
                            drop(s);
                            let candidate = pinned_resolve(
                                solver,
                                model,
                                &lb,
                                &ub,
                                &sol.x,
                                Some((&sol.x, &sol.y)),
                            );
                            s = shared.lock().unwrap();
                            if let Some((obj, xs)) = candidate {
                                let better = s.incumbent.as_ref().map_or(true, |(b, _)| obj < *b);
                                if better {
                                    s.incumbent = Some((obj, xs));
                                }
                            }
                        }
                        Some(branch) => {
                            let warm_arc = Arc::new((sol.x.clone(), sol.y.clone()));
                            let children: Vec<Vec<(usize, f64, f64)>> = match branch {
                                Branch::Group(gi) => {
                                    let group = &model.sos1_groups[gi];
                                    group
                                        .iter()
                                        .filter(|v| ub[v.0] > 0.5)
                                        .map(|&pick| {
                                            let mut ov = node.overlay.clone();
                                            for &v in group {
                                                if v == pick {
                                                    ov.push((v.0, 1.0, 1.0));
                                                } else {
                                                    ov.push((v.0, 0.0, 0.0));
                                                }
                                            }
                                            ov
                                        })
                                        .collect()
                                }
                                Branch::Var(vi) => {
                                    vec![
                                        {
                                            let mut ov = node.overlay.clone();
                                            ov.push((vi, 0.0, 0.0));
                                            ov
                                        },
                                        {
                                            let mut ov = node.overlay.clone();
                                            ov.push((vi, 1.0, 1.0));
                                            ov
                                        },
                                    ]
                                }
                            };
                            for ov in children {
                                let counter = s.next_counter;
                                s.next_counter += 1;
                                s.heap.push(HeapEntry(Node {
                                    overlay: ov,
                                    bound: sol.objective,
                                    counter,
                                    warm: Some(warm_arc.clone()),
                                }));
                            }
                            // periodic rounding heuristic for early incumbents
                            if node_index % settings.heuristic_period == 1 {
                                drop(s);
                                let candidate = pinned_resolve(
                                    solver,
                                    model,
                                    &lb,
                                    &ub,
                                    &sol.x,
                                    Some((&sol.x, &sol.y)),
                                );
                                s = shared.lock().unwrap();
                                if let Some((obj, xs)) = candidate {
                                    let better =
                                        s.incumbent.as_ref().map_or(true, |(b, _)| obj < *b);
                                    if better {
                                        s.incumbent = Some((obj, xs));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        work_ready.notify_all();
        drop(s);
    }
}

/// Convenience wrapper: expose the raw relaxation solver on a model
/// (binaries relaxed to their bound intervals).
pub fn solve_relaxation(
    model: &ModelIR,
    admm: &AdmmSettings,
) -> Result<RelaxSolution, SolverError> {
    let mut qp = RelaxedQp::new(model, admm.clone())?;
    let lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
    let ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
    Ok(qp.solve(&lb, &ub, None))
}

/// Ids of variables whose value differs between 0/1 in `x` by more than `tol`.
pub fn fractional_binaries(model: &ModelIR, x: &[f64], tol: f64) -> Vec<VarId> {
    model
        .binary_ids()
        .into_iter()
        .filter(|v| frac(x[v.0]) > tol)
        .collect()
}

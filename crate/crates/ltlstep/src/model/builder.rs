use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use super::scenario::{Foot, ReachabilityParams, Scenario};
use super::trig::TrigApprox;
use crate::encoder::{encode_satisfaction, AtomBinding, EncodeError, EncodingContext};
use crate::solver::ir::{LinExpr, ModelIR, Sense, VarId};

pub const THETA_RATE_LIMIT: f64 = PI / 8.0;

/// How Euclidean-norm reachability rows enter the model: a K-sided
/// linearization (the built-in solver's path) or second-order-cone rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormRealization {
    Polygon { k: usize },
    Quadratic,
}

impl NormRealization {
    /// Largest true displacement admitted by one circle row set of radius r.
    pub fn radius_outer(&self, r: f64) -> f64 {
        match self {
            NormRealization::Polygon { k } => r / (PI / *k as f64).cos(),
            NormRealization::Quadratic => r,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub realization: NormRealization,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            realization: NormRealization::Polygon { k: 8 },
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("in `{formula}`: {source}")]
    Encode {
        formula: String,
        source: EncodeError,
    },
    #[error(transparent)]
    Model(#[from] crate::solver::ir::ModelError),
}

/// Variable ids of the assembled footstep model, indexed step−1.
#[derive(Debug, Clone)]
pub struct FootstepVars {
    pub x: Vec<VarId>,
    pub y: Vec<VarId>,
    pub theta: Vec<VarId>,
    pub sin: Vec<VarId>,
    pub cos: Vec<VarId>,
    /// region assignment binaries `h[r][j]`
    pub h: Vec<Vec<VarId>>,
    /// trig segment binaries `seg_sin[l][j]`, `seg_cos[l][j]`
    pub seg_sin: Vec<Vec<VarId>>,
    pub seg_cos: Vec<Vec<VarId>>,
    /// foot-selection binaries in contact-ordering mode
    pub left_leg: Option<Vec<VarId>>,
    pub right_leg: Option<Vec<VarId>>,
}

#[derive(Debug)]
pub struct BuiltModel {
    pub ir: ModelIR,
    pub vars: FootstepVars,
    pub binding: AtomBinding,
    /// auxiliary binaries allocated by the specification encoder
    pub ltl_aux_binaries: usize,
    pub sin_approx: TrigApprox,
    pub cos_approx: TrigApprox,
    pub realization: NormRealization,
}

/// Mirror a left-stride circle center for the stepping foot.
pub fn mirrored(p: [f64; 2], stepping: Foot) -> [f64; 2] {
    match stepping {
        Foot::Left => p,
        Foot::Right => [p[0], -p[1]],
    }
}

/// Displacement of step `cur` from the circle center offset `p` rotated by
/// the approximated orientation `(c, s)` about the previous foothold.
pub fn displacement(prev: [f64; 2], cur: [f64; 2], p: [f64; 2], c: f64, s: f64) -> [f64; 2] {
    [
        cur[0] - prev[0] - (c * p[0] - s * p[1]),
        cur[1] - prev[1] - (s * p[0] + c * p[1]),
    ]
}

/// Upper bound on a single stride length under the nominal circles.
pub fn stride_bound(reach: &ReachabilityParams, realization: NormRealization) -> f64 {
    let b1 = (reach.p1[0].powi(2) + reach.p1[1].powi(2)).sqrt() + realization.radius_outer(reach.r1);
    let b2 = (reach.p2[0].powi(2) + reach.p2[1].powi(2)).sqrt() + realization.radius_outer(reach.r2);
    b1.min(b2)
}

struct Builder<'a> {
    s: &'a Scenario,
    opts: &'a BuildOptions,
    ir: ModelIR,
    vars: FootstepVars,
    sin_approx: TrigApprox,
    cos_approx: TrigApprox,
    /// per-step reachable position box (after workspace clamping)
    step_box: Vec<[[f64; 2]; 2]>,
    /// per-step orientation interval from the rate-limit chain
    theta_range: Vec<[f64; 2]>,
}

pub fn build(scenario: &Scenario, opts: &BuildOptions) -> Result<BuiltModel, BuildError> {
    let mut b = Builder::new(scenario, opts);
    b.allocate_variables();
    b.fix_initial_stance();
    b.add_region_assignment();
    b.add_trig_approx();
    b.add_theta_rate_limit();
    b.add_reachability();
    if scenario.contact_ordering {
        b.add_contact_ordering();
    }
    b.build_objective();
    let binding = b.bind_atoms();
    let mut ctx = EncodingContext::new(scenario.num_steps);
    for (text, formula) in &scenario.specs {
        encode_satisfaction(&formula.desugar(), &binding, 1, &mut b.ir, &mut ctx).map_err(
            |source| BuildError::Encode {
                formula: text.clone(),
                source,
            },
        )?;
    }
    b.ir.validate()?;
    Ok(BuiltModel {
        ir: b.ir,
        vars: b.vars,
        binding,
        ltl_aux_binaries: ctx.aux_binaries(),
        sin_approx: b.sin_approx,
        cos_approx: b.cos_approx,
        realization: opts.realization,
    })
}

impl<'a> Builder<'a> {
    fn new(s: &'a Scenario, opts: &'a BuildOptions) -> Self {
        let n = s.num_steps;
        // travel boxes: step j stays within (j−2) strides of the stance
        let stride = stride_bound(&s.reachability, opts.realization);
        let anchor = [s.initial_stance[1].x, s.initial_stance[1].y];
        let ws = s.workspace;
        let mut step_box = Vec::with_capacity(n);
        let mut theta_range = Vec::with_capacity(n);
        for j in 1..=n {
            if j <= 2 {
                let p = &s.initial_stance[j - 1];
                step_box.push([[p.x, p.x], [p.y, p.y]]);
                theta_range.push([p.theta, p.theta]);
            } else {
                let radius = (j - 2) as f64 * stride + 1e-9;
                step_box.push([
                    [
                        (anchor[0] - radius).max(ws[0][0]),
                        (anchor[0] + radius).min(ws[0][1]),
                    ],
                    [
                        (anchor[1] - radius).max(ws[1][0]),
                        (anchor[1] + radius).min(ws[1][1]),
                    ],
                ]);
                let swing = (j - 2) as f64 * THETA_RATE_LIMIT + 1e-12;
                let base = s.initial_stance[1].theta;
                theta_range.push([(base - swing).max(-PI), (base + swing).min(PI)]);
            }
        }
        Self {
            s,
            opts,
            ir: ModelIR::new(),
            vars: FootstepVars {
                x: Vec::new(),
                y: Vec::new(),
                theta: Vec::new(),
                sin: Vec::new(),
                cos: Vec::new(),
                h: Vec::new(),
                seg_sin: Vec::new(),
                seg_cos: Vec::new(),
                left_leg: None,
                right_leg: None,
            },
            sin_approx: TrigApprox::sin_approx(),
            cos_approx: TrigApprox::cos_approx(),
            step_box,
            theta_range,
        }
    }

    fn n(&self) -> usize {
        self.s.num_steps
    }

    fn allocate_variables(&mut self) {
        let n = self.n();
        for j in 1..=n {
            let bx = self.step_box[j - 1];
            let th = self.theta_range[j - 1];
            self.vars
                .x
                .push(self.ir.add_continuous(format!("x_{j}"), bx[0][0], bx[0][1]));
            self.vars
                .y
                .push(self.ir.add_continuous(format!("y_{j}"), bx[1][0], bx[1][1]));
            self.vars
                .theta
                .push(self.ir.add_continuous(format!("th_{j}"), th[0], th[1]));
            self.vars
                .sin
                .push(self.ir.add_continuous(format!("s_{j}"), -1.0, 1.0));
            self.vars
                .cos
                .push(self.ir.add_continuous(format!("c_{j}"), -1.0, 1.0));
        }
        for (ri, _) in self.s.regions.iter().enumerate() {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                row.push(self.ir.add_binary(format!("H_{}_{}", ri + 1, j)));
            }
            self.vars.h.push(row);
        }
        for l in 1..=self.sin_approx.segments() {
            let mut srow = Vec::with_capacity(n);
            for j in 1..=n {
                srow.push(self.ir.add_binary(format!("S_{l}_{j}")));
            }
            self.vars.seg_sin.push(srow);
        }
        for l in 1..=self.cos_approx.segments() {
            let mut crow = Vec::with_capacity(n);
            for j in 1..=n {
                crow.push(self.ir.add_binary(format!("C_{l}_{j}")));
            }
            self.vars.seg_cos.push(crow);
        }
        if self.s.contact_ordering {
            let mut ll = Vec::with_capacity(n);
            let mut rl = Vec::with_capacity(n);
            for j in 1..=n {
                ll.push(self.ir.add_binary(format!("LL_{j}")));
                rl.push(self.ir.add_binary(format!("RL_{j}")));
            }
            self.vars.left_leg = Some(ll);
            self.vars.right_leg = Some(rl);
        }

        // sum-to-one rows and branching groups per step
        for j in 0..n {
            let h_col: Vec<VarId> = self.vars.h.iter().map(|row| row[j]).collect();
            self.ir.add_tagged_row(
                "H_sum",
                h_col.iter().map(|&v| (v, 1.0)).collect(),
                Sense::Eq,
                1.0,
            );
            self.ir.add_sos1_group(h_col);
            let s_col: Vec<VarId> = self.vars.seg_sin.iter().map(|row| row[j]).collect();
            self.ir.add_tagged_row(
                "S_sum",
                s_col.iter().map(|&v| (v, 1.0)).collect(),
                Sense::Eq,
                1.0,
            );
            self.ir.add_sos1_group(s_col);
            let c_col: Vec<VarId> = self.vars.seg_cos.iter().map(|row| row[j]).collect();
            self.ir.add_tagged_row(
                "C_sum",
                c_col.iter().map(|&v| (v, 1.0)).collect(),
                Sense::Eq,
                1.0,
            );
            self.ir.add_sos1_group(c_col);
        }

        // segments incompatible with a step's orientation interval can never
        // be active; fixing them shrinks the branching space
        for j in 3..=n {
            let th = self.theta_range[j - 1];
            for l in 0..self.sin_approx.segments() {
                if self.sin_approx.breaks[l + 1] < th[0] || self.sin_approx.breaks[l] > th[1] {
                    self.ir.fix(self.vars.seg_sin[l][j - 1], 0.0);
                }
                if self.cos_approx.breaks[l + 1] < th[0] || self.cos_approx.breaks[l] > th[1] {
                    self.ir.fix(self.vars.seg_cos[l][j - 1], 0.0);
                }
            }
        }
    }

    fn fix_initial_stance(&mut self) {
        for j in 0..2 {
            let p = self.s.initial_stance[j];
            self.ir.fix(self.vars.x[j], p.x);
            self.ir.fix(self.vars.y[j], p.y);
            self.ir.fix(self.vars.theta[j], p.theta);
            self.ir.fix(self.vars.sin[j], self.sin_approx.eval(p.theta));
            self.ir.fix(self.vars.cos[j], self.cos_approx.eval(p.theta));
            let ls = self.sin_approx.segment_of(p.theta);
            let lc = self.cos_approx.segment_of(p.theta);
            for l in 0..self.sin_approx.segments() {
                self.ir
                    .fix(self.vars.seg_sin[l][j], if l == ls { 1.0 } else { 0.0 });
                self.ir
                    .fix(self.vars.seg_cos[l][j], if l == lc { 1.0 } else { 0.0 });
            }
            if self.s.contact_ordering {
                let foot = self.s.foot_of_step(j + 1);
                let (ll, rl) = (
                    self.vars.left_leg.as_ref().unwrap()[j],
                    self.vars.right_leg.as_ref().unwrap()[j],
                );
                self.ir.fix(ll, if foot == Foot::Left { 1.0 } else { 0.0 });
                self.ir.fix(rl, if foot == Foot::Right { 1.0 } else { 0.0 });
            }
        }
    }

    /// Big-M indicator rows tying each region binary to its halfspaces, with
    /// per-row M computed over the step's travel box.
    fn add_region_assignment(&mut self) {
        for j in 1..=self.n() {
            let bx = self.step_box[j - 1];
            for (ri, region) in self.s.regions.iter().enumerate() {
                let h = self.vars.h[ri][j - 1];
                for (row_idx, (a, &b)) in region.a.iter().zip(&region.b).enumerate() {
                    let m = region.row_big_m(row_idx, bx);
                    if m == 0.0 {
                        continue; // satisfied everywhere in the box
                    }
                    self.ir.add_tagged_row(
                        "region",
                        vec![
                            (self.vars.x[j - 1], a[0]),
                            (self.vars.y[j - 1], a[1]),
                            (h, m),
                        ],
                        Sense::Le,
                        b + m,
                    );
                }
            }
        }
    }

    /// Segment-selection big-M rows: the interval bracket and the affine
    /// sin/cos relation per (step, segment).
    fn add_trig_approx(&mut self) {
        let n = self.n();
        let sin_approx = self.sin_approx.clone();
        let cos_approx = self.cos_approx.clone();
        for j in 3..=n {
            let th = self.theta_range[j - 1];
            let (sin_v, th_v, cos_v) = (
                self.vars.sin[j - 1],
                self.vars.theta[j - 1],
                self.vars.cos[j - 1],
            );
            for (ta, segs, val_v, tag) in [
                (&sin_approx, &self.vars.seg_sin, sin_v, "sin"),
                (&cos_approx, &self.vars.seg_cos, cos_v, "cos"),
            ] {
                for l in 0..ta.segments() {
                    let seg = segs[l][j - 1];
                    // skip segments eliminated by the orientation interval
                    if ta.breaks[l + 1] < th[0] || ta.breaks[l] > th[1] {
                        continue;
                    }
                    let (phi_lo, phi_hi) = (ta.breaks[l], ta.breaks[l + 1]);
                    let m_lo = (phi_lo - th[0]).max(0.0);
                    if m_lo > 0.0 {
                        self.ir.add_tagged_row(
                            &format!("{tag}_lo"),
                            vec![(th_v, 1.0), (seg, -m_lo)],
                            Sense::Ge,
                            phi_lo - m_lo,
                        );
                    }
                    let m_hi = (th[1] - phi_hi).max(0.0);
                    if m_hi > 0.0 {
                        self.ir.add_tagged_row(
                            &format!("{tag}_hi"),
                            vec![(th_v, 1.0), (seg, m_hi)],
                            Sense::Le,
                            phi_hi + m_hi,
                        );
                    }
                    let (g, h) = (ta.slope[l], ta.intercept[l]);
                    let m_eq = 1.0 + (g * th[0] + h).abs().max((g * th[1] + h).abs());
                    self.ir.add_tagged_row(
                        &format!("{tag}_eq"),
                        vec![(val_v, 1.0), (th_v, -g), (seg, m_eq)],
                        Sense::Le,
                        h + m_eq,
                    );
                    self.ir.add_tagged_row(
                        &format!("{tag}_eq"),
                        vec![(val_v, 1.0), (th_v, -g), (seg, -m_eq)],
                        Sense::Ge,
                        h - m_eq,
                    );
                }
            }
        }
    }

    /// |θ_j − θ_{j−1}| <= π/8, both signs.
    fn add_theta_rate_limit(&mut self) {
        for j in 2..=self.n() {
            let (cur, prev) = (self.vars.theta[j - 1], self.vars.theta[j - 2]);
            self.ir.add_tagged_row(
                "rate",
                vec![(cur, 1.0), (prev, -1.0)],
                Sense::Le,
                THETA_RATE_LIMIT,
            );
            self.ir.add_tagged_row(
                "rate",
                vec![(prev, 1.0), (cur, -1.0)],
                Sense::Le,
                THETA_RATE_LIMIT,
            );
        }
    }

    /// Circle-intersection reachability for steps 3..N, realized per
    /// [`NormRealization`]; adds reduced-stride rows guarded by the region
    /// binary, and per-foot guarded variants in contact-ordering mode.
    fn add_reachability(&mut self) {
        let n = self.n();
        let reach = self.s.reachability.clone();
        let circles = [(reach.p1, reach.r1), (reach.p2, reach.r2)];
        let reduced: Vec<(usize, [([f64; 2], f64); 2])> = match &reach.reduced {
            Some(red) if !self.s.reduced_stride_regions.is_empty() => self
                .s
                .reduced_stride_regions
                .iter()
                .map(|name| {
                    let ri = self
                        .s
                        .regions
                        .iter()
                        .position(|r| &r.name == name)
                        .expect("validated at load");
                    (ri, [(red.p1, red.r1), (red.p2, red.r2)])
                })
                .collect(),
            _ => Vec::new(),
        };

        for j in 3..=n {
            let feet: Vec<(Foot, Option<VarId>)> = if self.s.contact_ordering {
                vec![
                    (Foot::Left, Some(self.vars.left_leg.as_ref().unwrap()[j - 1])),
                    (
                        Foot::Right,
                        Some(self.vars.right_leg.as_ref().unwrap()[j - 1]),
                    ),
                ]
            } else {
                vec![(self.s.foot_of_step(j), None)]
            };
            for (foot, foot_guard) in feet {
                for (ci, &(p, r)) in circles.iter().enumerate() {
                    let guards: Vec<VarId> = foot_guard.into_iter().collect();
                    self.add_circle_rows(j, mirrored(p, foot), r, &guards, &format!("reach{}", ci + 1));
                }
                for (ri, red_circles) in &reduced {
                    for (ci, &(p, r)) in red_circles.iter().enumerate() {
                        let mut guards: Vec<VarId> = foot_guard.into_iter().collect();
                        guards.push(self.vars.h[*ri][j - 1]);
                        self.add_circle_rows(
                            j,
                            mirrored(p, foot),
                            r,
                            &guards,
                            &format!("stride{}", ci + 1),
                        );
                    }
                }
            }
        }
    }

    /// `‖(x_j, y_j) − ((x_{j−1}, y_{j−1}) + Rot(c_j, s_j)·p)‖ <= r`,
    /// relaxed by big-M for every guard binary that is 0.
    fn add_circle_rows(&mut self, j: usize, p: [f64; 2], r: f64, guards: &[VarId], tag: &str) {
        let (xj, yj) = (self.vars.x[j - 1], self.vars.y[j - 1]);
        let (xp, yp) = (self.vars.x[j - 2], self.vars.y[j - 2]);
        let (sj, cj) = (self.vars.sin[j - 1], self.vars.cos[j - 1]);
        let mut dx = LinExpr::default();
        dx.push(xj, 1.0);
        dx.push(xp, -1.0);
        dx.push(cj, -p[0]);
        dx.push(sj, p[1]);
        let mut dy = LinExpr::default();
        dy.push(yj, 1.0);
        dy.push(yp, -1.0);
        dy.push(sj, -p[0]);
        dy.push(cj, -p[1]);

        match self.opts.realization {
            NormRealization::Polygon { k } => {
                for kappa in 0..k {
                    let ang = 2.0 * PI * kappa as f64 / k as f64;
                    let (ax, ay) = (ang.cos(), ang.sin());
                    let mut terms: Vec<(VarId, f64)> = Vec::new();
                    for &(v, c) in &dx.terms {
                        terms.push((v, ax * c));
                    }
                    for &(v, c) in &dy.terms {
                        terms.push((v, ay * c));
                    }
                    let mut rhs = r;
                    if !guards.is_empty() {
                        let expr = LinExpr {
                            terms: terms.clone(),
                            constant: 0.0,
                        };
                        let (_, hi) = expr.bounds(&self.ir.vars);
                        let m = (hi - r).max(0.0);
                        for &g in guards {
                            terms.push((g, m));
                            rhs += m;
                        }
                    }
                    self.ir.add_tagged_row(tag, terms, Sense::Le, rhs);
                }
            }
            NormRealization::Quadratic => {
                let (xlo, xhi) = dx.bounds(&self.ir.vars);
                let (ylo, yhi) = dy.bounds(&self.ir.vars);
                let dmax =
                    (xlo.abs().max(xhi.abs()).powi(2) + ylo.abs().max(yhi.abs()).powi(2)).sqrt();
                let m = (dmax - r).max(0.0);
                let mut radius = LinExpr::constant(r + guards.len() as f64 * m);
                for &g in guards {
                    radius.push(g, -m);
                }
                let name = format!("{tag}_{j}");
                self.ir.add_norm_row(name, [dx, dy], radius);
            }
        }
    }

    /// Foot alternation (contact-ordering mode): exactly one foot per step
    /// and each foot followed by the other, in both directions.
    fn add_contact_ordering(&mut self) {
        let n = self.n();
        let ll = self.vars.left_leg.as_ref().unwrap().clone();
        let rl = self.vars.right_leg.as_ref().unwrap().clone();
        let m = 2.0;
        for j in 3..=n {
            self.ir.add_tagged_row(
                "one_foot",
                vec![(ll[j - 1], 1.0), (rl[j - 1], 1.0)],
                Sense::Eq,
                1.0,
            );
            self.ir.add_sos1_group(vec![ll[j - 1], rl[j - 1]]);
            // −M(1−LL^{j−1}) + RL^j <= 1  and  M(1−LL^{j−1}) + RL^j >= 1
            self.ir.add_tagged_row(
                "order_lr",
                vec![(ll[j - 2], m), (rl[j - 1], 1.0)],
                Sense::Le,
                1.0 + m,
            );
            self.ir.add_tagged_row(
                "order_lr",
                vec![(ll[j - 2], -m), (rl[j - 1], 1.0)],
                Sense::Ge,
                1.0 - m,
            );
            // the mirrored pair: a right step forces a left step next
            self.ir.add_tagged_row(
                "order_rl",
                vec![(rl[j - 2], m), (ll[j - 1], 1.0)],
                Sense::Le,
                1.0 + m,
            );
            self.ir.add_tagged_row(
                "order_rl",
                vec![(rl[j - 2], -m), (ll[j - 1], 1.0)],
                Sense::Ge,
                1.0 - m,
            );
        }
    }

    /// Terminal goal cost plus stride cost:
    /// `(f_N − g)ᵀQ(f_N − g) + Σ_j (f_{j+1} − f_j)ᵀR(f_{j+1} − f_j)`.
    fn build_objective(&mut self) {
        let n = self.n();
        let mut quad: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();
        let mut lin: BTreeMap<VarId, f64> = BTreeMap::new();
        let mut constant = 0.0;
        let acc = |map: &mut BTreeMap<(VarId, VarId), f64>, a: VarId, b: VarId, c: f64| {
            if c != 0.0 {
                let key = if a <= b { (a, b) } else { (b, a) };
                *map.entry(key).or_insert(0.0) += c;
            }
        };
        let f_vars = |j: usize, vars: &FootstepVars| {
            [vars.x[j - 1], vars.y[j - 1], vars.theta[j - 1]]
        };

        // terminal: f_Nᵀ Q f_N − 2 gᵀQ f_N + gᵀQ g
        let fn_vars = f_vars(n, &self.vars);
        let g = [self.s.goal.x, self.s.goal.y, self.s.goal.theta];
        let q = self.s.q;
        for a in 0..3 {
            for b in 0..3 {
                acc(&mut quad, fn_vars[a], fn_vars[b], q[a][b]);
            }
            let coef = -2.0 * (0..3).map(|b| q[a][b] * g[b]).sum::<f64>();
            if coef != 0.0 {
                *lin.entry(fn_vars[a]).or_insert(0.0) += coef;
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                constant += g[a] * q[a][b] * g[b];
            }
        }

        // strides: Σ_{j=1..N−1} (f_{j+1} − f_j)ᵀ R (f_{j+1} − f_j)
        let r = self.s.r_step;
        for j in 1..n {
            let u = f_vars(j + 1, &self.vars);
            let v = f_vars(j, &self.vars);
            for a in 0..3 {
                for b in 0..3 {
                    let c = r[a][b];
                    if c != 0.0 {
                        acc(&mut quad, u[a], u[b], c);
                        acc(&mut quad, v[a], v[b], c);
                        acc(&mut quad, u[a], v[b], -c);
                        acc(&mut quad, v[a], u[b], -c);
                    }
                }
            }
        }

        self.ir.objective.quad = quad
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((a, b), c)| (a, b, c))
            .collect();
        self.ir.objective.lin = lin.into_iter().filter(|&(_, c)| c != 0.0).collect();
        self.ir.objective.constant = constant;
    }

    /// Region atoms `p_<region>` bind to rows of H; foot atoms `p_lleg` /
    /// `p_rleg` bind to the LL/RL columns when contact ordering is on.
    fn bind_atoms(&self) -> AtomBinding {
        let mut binding = AtomBinding::new();
        for (ri, region) in self.s.regions.iter().enumerate() {
            binding.bind(format!("p_{}", region.name), self.vars.h[ri].clone());
        }
        if let (Some(ll), Some(rl)) = (&self.vars.left_leg, &self.vars.right_leg) {
            binding.bind("p_lleg", ll.clone());
            binding.bind("p_rleg", rl.clone());
        }
        binding
    }
}

/// Recompute the objective of a plan directly from poses (the independent
/// evaluator used by verification).
pub fn objective_of(scenario: &Scenario, poses: &[[f64; 3]]) -> f64 {
    let n = poses.len();
    let g = [scenario.goal.x, scenario.goal.y, scenario.goal.theta];
    let d = [
        poses[n - 1][0] - g[0],
        poses[n - 1][1] - g[1],
        poses[n - 1][2] - g[2],
    ];
    let mut total = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            total += d[a] * scenario.q[a][b] * d[b];
        }
    }
    for j in 0..n - 1 {
        let s = [
            poses[j + 1][0] - poses[j][0],
            poses[j + 1][1] - poses[j][1],
            poses[j + 1][2] - poses[j][2],
        ];
        for a in 0..3 {
            for b in 0..3 {
                total += s[a] * scenario.r_step[a][b] * s[b];
            }
        }
    }
    total
}

//! Operator-splitting (ADMM) solver for the convex relaxations.
//!
//! Solves `min ½xᵀPx + qᵀx  s.t.  l <= Ax <= u` where the rows of `A` are the
//! model's linear rows, one triple per Euclidean-norm row (projected onto a
//! second-order cone), and one bound row per variable. Binary variables are
//! relaxed to their current bound interval, so the same factorization serves
//! every branch-and-bound node: node-to-node changes touch only `l`/`u`.
//!
//! The iteration follows the standard QP splitting: a ridge-regularized KKT
//! solve for the primal candidate, over-relaxation, projection of the row
//! values onto their intervals/cones, and a scaled dual update. Problem data
//! is Ruiz-equilibrated once per model. Converged solutions are polished by
//! re-solving the active-set KKT system, which drives residuals to machine
//! precision on the all-linear path.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::ir::{ModelError, ModelIR, Sense};

#[derive(Debug, Clone)]
pub struct AdmmSettings {
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
    /// residual target while iterating (unscaled, absolute + relative)
    pub eps_abs: f64,
    pub eps_rel: f64,
    /// residual level at which a solution is accepted as solved
    pub accept_tol: f64,
    pub max_iter: usize,
    pub check_interval: usize,
    pub scaling_iters: usize,
    pub adaptive_rho: bool,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self {
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
            eps_abs: 1e-8,
            eps_rel: 1e-8,
            accept_tol: 1e-6,
            max_iter: 20_000,
            check_interval: 25,
            scaling_iters: 10,
            adaptive_rho: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxStatus {
    Solved,
    PrimalInfeasible,
    IterLimit,
}

#[derive(Debug, Clone)]
pub struct RelaxSolution {
    pub status: RelaxStatus,
    pub x: Vec<f64>,
    /// row duals in model order (linear rows, then cone triples, then bounds)
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub polished: bool,
}

/// Compressed sparse rows; all we need is `A·x`, `Aᵀ·y`, and row iteration.
#[derive(Debug, Clone)]
struct Csr {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl Csr {
    fn nrows(&self) -> usize {
        self.indptr.len() - 1
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(|k| (self.indices[k], self.data[k]))
    }

    fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.nrows() {
            let mut acc = 0.0;
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            out[r] = acc;
        }
    }

    fn mul_transpose_vec(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows() {
            let yr = y[r];
            if yr != 0.0 {
                for (c, v) in self.row(r) {
                    out[c] += v * yr;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum RowKind {
    /// interval row for a model linear row
    LinRow,
    /// component of a second-order-cone triple
    Cone,
    /// bound row for variable `v`
    Bound(usize),
}

/// Relaxation solver bound to one model; reusable across bound overlays.
#[derive(Debug, Clone)]
pub struct RelaxedQp {
    n: usize,
    m: usize,
    settings: AdmmSettings,
    // scaled data
    p: DMatrix<f64>,
    q: DVector<f64>,
    a: Csr,
    /// per-row scaling E, per-variable scaling D, cost scaling c
    e: Vec<f64>,
    d: Vec<f64>,
    c_obj: f64,
    obj_const: f64,
    row_kinds: Vec<RowKind>,
    /// scaled shift constants for cone rows (zero elsewhere)
    cone_shift: Vec<f64>,
    /// base scaled l/u (bound rows filled per solve)
    l_base: Vec<f64>,
    u_base: Vec<f64>,
    rho_scale: Vec<f64>, // per-row multiplier (equality rows boosted)
    rho: f64,
    factor: Option<(f64, Cholesky<f64, Dyn>)>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

impl RelaxedQp {
    pub fn new(model: &ModelIR, settings: AdmmSettings) -> Result<Self, ModelError> {
        model.validate()?;
        let n = model.num_vars();

        // assemble unscaled rows: linear rows, cone triples, bound rows
        let mut indptr = vec![0usize];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut row_kinds = Vec::new();
        let mut l = Vec::new();
        let mut u = Vec::new();
        let mut shift = Vec::new();
        let mut rho_scale = Vec::new();
        let mut cone_starts = Vec::new();

        let push_row = |terms: &[(super::ir::VarId, f64)],
                            kind: RowKind,
                            lo: f64,
                            hi: f64,
                            sh: f64,
                            indptr: &mut Vec<usize>,
                            indices: &mut Vec<usize>,
                            data: &mut Vec<f64>,
                            row_kinds: &mut Vec<RowKind>,
                            l: &mut Vec<f64>,
                            u: &mut Vec<f64>,
                            shift: &mut Vec<f64>,
                            rho_scale: &mut Vec<f64>| {
            // accumulate duplicate terms
            let mut acc: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
            for &(v, c) in terms {
                match acc.iter_mut().find(|(i, _)| *i == v.0) {
                    Some(entry) => entry.1 += c,
                    None => acc.push((v.0, c)),
                }
            }
            acc.sort_by_key(|&(i, _)| i);
            for (i, c) in acc {
                indices.push(i);
                data.push(c);
            }
            indptr.push(indices.len());
            row_kinds.push(kind);
            l.push(lo);
            u.push(hi);
            shift.push(sh);
            rho_scale.push(if lo == hi && lo.is_finite() { 1e3 } else { 1.0 });
        };

        for row in model.rows.iter() {
            let (lo, hi) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Eq => (row.rhs, row.rhs),
            };
            push_row(
                &row.terms,
                RowKind::LinRow,
                lo,
                hi,
                0.0,
                &mut indptr,
                &mut indices,
                &mut data,
                &mut row_kinds,
                &mut l,
                &mut u,
                &mut shift,
                &mut rho_scale,
            );
        }
        for nr in model.norm_rows.iter() {
            cone_starts.push(row_kinds.len());
            for comp in 0..3 {
                let (terms, sh) = match comp {
                    0 => (&nr.exprs[0].terms, nr.exprs[0].constant),
                    1 => (&nr.exprs[1].terms, nr.exprs[1].constant),
                    _ => (&nr.radius.terms, nr.radius.constant),
                };
                push_row(
                    terms,
                    RowKind::Cone,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    sh,
                    &mut indptr,
                    &mut indices,
                    &mut data,
                    &mut row_kinds,
                    &mut l,
                    &mut u,
                    &mut shift,
                    &mut rho_scale,
                );
            }
        }
        for v in 0..n {
            push_row(
                &[(super::ir::VarId(v), 1.0)],
                RowKind::Bound(v),
                model.vars[v].lb,
                model.vars[v].ub,
                0.0,
                &mut indptr,
                &mut indices,
                &mut data,
                &mut row_kinds,
                &mut l,
                &mut u,
                &mut shift,
                &mut rho_scale,
            );
        }

        let m = row_kinds.len();
        let mut a = Csr {
            indptr,
            indices,
            data,
        };

        // dense P in ½xᵀPx form
        let mut p = DMatrix::<f64>::zeros(n, n);
        for &(i, j, c) in &model.objective.quad {
            if i == j {
                p[(i.0, i.0)] += 2.0 * c;
            } else {
                p[(i.0, j.0)] += c;
                p[(j.0, i.0)] += c;
            }
        }
        let mut q = DVector::<f64>::zeros(n);
        for &(v, c) in &model.objective.lin {
            q[v.0] += c;
        }

        // Ruiz equilibration of [P Aᵀ; A 0] plus cost normalization
        let mut d = vec![1.0f64; n];
        let mut e = vec![1.0f64; m];
        let mut c_obj = 1.0f64;
        for _ in 0..settings.scaling_iters {
            // column norms over P and A
            let mut col = vec![0.0f64; n];
            for i in 0..n {
                for j in 0..n {
                    col[j] = col[j].max(p[(i, j)].abs());
                }
            }
            let mut row = vec![0.0f64; m];
            for r in 0..m {
                for (cix, v) in a.row(r) {
                    let av = v.abs();
                    col[cix] = col[cix].max(av);
                    row[r] = row[r].max(av);
                }
            }
            let dd: Vec<f64> = col
                .iter()
                .map(|&v| if v > 1e-12 { 1.0 / v.sqrt() } else { 1.0 })
                .collect();
            let mut ee: Vec<f64> = row
                .iter()
                .map(|&v| if v > 1e-12 { 1.0 / v.sqrt() } else { 1.0 })
                .collect();
            // cone triples must share one scaling to preserve the cone
            for &start in &cone_starts {
                let g = (ee[start] * ee[start + 1] * ee[start + 2]).powf(1.0 / 3.0);
                ee[start] = g;
                ee[start + 1] = g;
                ee[start + 2] = g;
            }
            // apply
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] *= dd[i] * dd[j];
                }
                q[i] *= dd[i];
            }
            for r in 0..m {
                for k in a.indptr[r]..a.indptr[r + 1] {
                    a.data[k] *= ee[r] * dd[a.indices[k]];
                }
            }
            for i in 0..n {
                d[i] *= dd[i];
            }
            for r in 0..m {
                e[r] *= ee[r];
            }
            // cost scaling: normalize objective magnitude
            let mut pmax = 0.0f64;
            for i in 0..n {
                let mut cmax = 0.0f64;
                for j in 0..n {
                    cmax = cmax.max(p[(i, j)].abs());
                }
                pmax += cmax;
            }
            pmax /= n.max(1) as f64;
            let qn = q.amax();
            let gamma = pmax.max(qn);
            let cc = if gamma > 1e-12 { 1.0 / gamma } else { 1.0 };
            p *= cc;
            q *= cc;
            c_obj *= cc;
        }
        // scale bounds and shifts into the scaled row space
        for r in 0..m {
            if l[r].is_finite() {
                l[r] *= e[r];
            }
            if u[r].is_finite() {
                u[r] *= e[r];
            }
            shift[r] *= e[r];
        }

        Ok(Self {
            n,
            m,
            rho: settings.rho,
            settings,
            p,
            q,
            a,
            e,
            d,
            c_obj,
            obj_const: model.objective.constant,
            row_kinds,
            cone_shift: shift,
            l_base: l,
            u_base: u,
            rho_scale,
            factor: None,
        })
    }

    fn factorize(&mut self) {
        if let Some((r, _)) = &self.factor {
            if *r == self.rho {
                return;
            }
        }
        let mut kkt = self.p.clone();
        for i in 0..self.n {
            kkt[(i, i)] += self.settings.sigma;
        }
        for r in 0..self.m {
            let rho_r = self.rho * self.rho_scale[r];
            let lo = self.a.indptr[r];
            let hi = self.a.indptr[r + 1];
            for k1 in lo..hi {
                let (i, vi) = (self.a.indices[k1], self.a.data[k1]);
                for k2 in lo..hi {
                    let (j, vj) = (self.a.indices[k2], self.a.data[k2]);
                    kkt[(i, j)] += rho_r * vi * vj;
                }
            }
        }
        let chol = Cholesky::new(kkt).expect("KKT matrix is positive definite by construction");
        self.factor = Some((self.rho, chol));
    }

    /// Project scaled row values onto their intervals / shifted cones.
    fn project(&self, v: &mut [f64], l: &[f64], u: &[f64]) {
        let mut r = 0;
        while r < self.m {
            match self.row_kinds[r] {
                RowKind::Cone => {
                    let (s0, s1, s2) = (
                        self.cone_shift[r],
                        self.cone_shift[r + 1],
                        self.cone_shift[r + 2],
                    );
                    let z0 = v[r] + s0;
                    let z1 = v[r + 1] + s1;
                    let t = v[r + 2] + s2;
                    let nz = (z0 * z0 + z1 * z1).sqrt();
                    if nz <= t {
                        // inside the cone
                    } else if nz <= -t {
                        v[r] = -s0;
                        v[r + 1] = -s1;
                        v[r + 2] = -s2;
                    } else {
                        let c = (nz + t) / 2.0;
                        let scale = c / nz;
                        v[r] = z0 * scale - s0;
                        v[r + 1] = z1 * scale - s1;
                        v[r + 2] = c - s2;
                    }
                    r += 3;
                }
                _ => {
                    v[r] = v[r].clamp(l[r], u[r]);
                    r += 1;
                }
            }
        }
    }

    /// Assemble scaled `l`/`u` for the given variable bounds.
    fn scaled_bounds(&self, lb: &[f64], ub: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut l = self.l_base.clone();
        let mut u = self.u_base.clone();
        for r in 0..self.m {
            if let RowKind::Bound(v) = self.row_kinds[r] {
                l[r] = if lb[v].is_finite() {
                    lb[v] * self.e[r]
                } else {
                    lb[v]
                };
                u[r] = if ub[v].is_finite() {
                    ub[v] * self.e[r]
                } else {
                    ub[v]
                };
            }
        }
        (l, u)
    }

    /// Unscaled objective at unscaled `x`.
    fn objective_at(&self, x_unscaled: &[f64]) -> f64 {
        // recompute from scaled data: ½ x̂ᵀP̂x̂/c + q̂ᵀx̂/c + const with x̂ = D⁻¹x
        let xh = DVector::from_iterator(
            self.n,
            x_unscaled.iter().enumerate().map(|(i, &v)| v / self.d[i]),
        );
        let quad = 0.5 * (&xh.transpose() * &self.p * &xh)[(0, 0)];
        let lin = self.q.dot(&xh);
        (quad + lin) / self.c_obj + self.obj_const
    }

    /// [`RelaxedQp::solve`] with the iteration cap multiplied by `effort`.
    pub fn solve_with_effort(
        &mut self,
        lb: &[f64],
        ub: &[f64],
        warm: Option<(&[f64], &[f64])>,
        effort: usize,
    ) -> RelaxSolution {
        let saved = self.settings.max_iter;
        self.settings.max_iter = saved.saturating_mul(effort);
        let sol = self.solve(lb, ub, warm);
        self.settings.max_iter = saved;
        sol
    }

    /// Solve with variable bounds `lb`/`ub` (length n), optionally warm
    /// starting from an unscaled `(x, y)` pair.
    pub fn solve(
        &mut self,
        lb: &[f64],
        ub: &[f64],
        warm: Option<(&[f64], &[f64])>,
    ) -> RelaxSolution {
        assert_eq!(lb.len(), self.n);
        if self.n == 0 {
            return RelaxSolution {
                status: RelaxStatus::Solved,
                x: Vec::new(),
                y: Vec::new(),
                objective: self.obj_const,
                iterations: 0,
                primal_residual: 0.0,
                dual_residual: 0.0,
                polished: true,
            };
        }
        self.factorize();
        let (l, u) = self.scaled_bounds(lb, ub);

        let (mut x, mut y) = match warm {
            Some((wx, wy)) => (
                DVector::from_iterator(
                    self.n,
                    wx.iter().enumerate().map(|(i, &v)| v / self.d[i]),
                ),
                DVector::from_iterator(
                    self.m,
                    wy.iter()
                        .enumerate()
                        .map(|(r, &v)| v * self.c_obj / self.e[r]),
                ),
            ),
            None => (DVector::zeros(self.n), DVector::zeros(self.m)),
        };
        let mut z = DVector::zeros(self.m);
        {
            let mut ax = vec![0.0; self.m];
            self.a.mul_vec(x.as_slice(), &mut ax);
            z.as_mut_slice().copy_from_slice(&ax);
            self.project(z.as_mut_slice(), &l, &u);
        }

        let mut ax = vec![0.0; self.m];
        let mut aty = vec![0.0; self.n];
        let mut px = DVector::zeros(self.n);
        let mut last_y = y.clone();
        let mut rho_updates = 0usize;
        let alpha = self.settings.alpha;
        let sigma = self.settings.sigma;

        let mut status = RelaxStatus::IterLimit;
        let mut iterations = self.settings.max_iter;
        let mut r_prim = f64::INFINITY;
        let mut r_dual = f64::INFINITY;

        for it in 0..self.settings.max_iter {
            // x̃ = K⁻¹(σx − q + Aᵀ(ρz − y))
            let mut rhs = DVector::zeros(self.n);
            let rz: Vec<f64> = (0..self.m)
                .map(|r| self.rho * self.rho_scale[r] * z[r] - y[r])
                .collect();
            self.a.mul_transpose_vec(&rz, aty.as_mut_slice());
            for i in 0..self.n {
                rhs[i] = sigma * x[i] - self.q[i] + aty[i];
            }
            let xt = self.factor.as_ref().unwrap().1.solve(&rhs);

            // over-relaxed updates
            let mut axt = vec![0.0; self.m];
            self.a.mul_vec(xt.as_slice(), &mut axt);
            let mut z_new = DVector::zeros(self.m);
            for r in 0..self.m {
                let rho_r = self.rho * self.rho_scale[r];
                z_new[r] = alpha * axt[r] + (1.0 - alpha) * z[r] + y[r] / rho_r;
            }
            self.project(z_new.as_mut_slice(), &l, &u);
            for r in 0..self.m {
                let rho_r = self.rho * self.rho_scale[r];
                y[r] += rho_r * (alpha * axt[r] + (1.0 - alpha) * z[r] - z_new[r]);
            }
            for i in 0..self.n {
                x[i] = alpha * xt[i] + (1.0 - alpha) * x[i];
            }
            z = z_new;

            if (it + 1) % self.settings.check_interval == 0 || it + 1 == self.settings.max_iter {
                // unscaled residuals
                self.a.mul_vec(x.as_slice(), &mut ax);
                px.copy_from(&(&self.p * &x));
                self.a.mul_transpose_vec(y.as_slice(), aty.as_mut_slice());

                let mut rp: f64 = 0.0;
                let mut ax_n: f64 = 0.0;
                let mut z_n: f64 = 0.0;
                for r in 0..self.m {
                    let inv_e = 1.0 / self.e[r];
                    rp = rp.max((ax[r] - z[r]).abs() * inv_e);
                    ax_n = ax_n.max(ax[r].abs() * inv_e);
                    z_n = z_n.max(z[r].abs() * inv_e);
                }
                let mut rd: f64 = 0.0;
                let mut px_n: f64 = 0.0;
                let mut aty_n: f64 = 0.0;
                let mut q_n: f64 = 0.0;
                for i in 0..self.n {
                    let inv_d = 1.0 / self.d[i];
                    rd = rd.max((px[i] + self.q[i] + aty[i]).abs() * inv_d);
                    px_n = px_n.max(px[i].abs() * inv_d);
                    aty_n = aty_n.max(aty[i].abs() * inv_d);
                    q_n = q_n.max(self.q[i].abs() * inv_d);
                }
                rd /= self.c_obj;
                px_n /= self.c_obj;
                aty_n /= self.c_obj;
                q_n /= self.c_obj;

                let eps_p = self.settings.eps_abs + self.settings.eps_rel * ax_n.max(z_n);
                let eps_d = self.settings.eps_abs + self.settings.eps_rel * px_n.max(aty_n).max(q_n);
                r_prim = rp;
                r_dual = rd;
                if rp <= eps_p && rd <= eps_d {
                    status = RelaxStatus::Solved;
                    iterations = it + 1;
                    break;
                }

                // primal infeasibility certificate from the dual increment
                let dy: Vec<f64> = (0..self.m).map(|r| y[r] - last_y[r]).collect();
                if self.primal_infeasibility_certificate(&dy, lb, ub) {
                    status = RelaxStatus::PrimalInfeasible;
                    iterations = it + 1;
                    break;
                }
                last_y.copy_from(&y);

                // adaptive step size
                if self.settings.adaptive_rho && rho_updates < 12 {
                    let p_rat = rp / eps_p.max(1e-30);
                    let d_rat = rd / eps_d.max(1e-30);
                    let ratio = (p_rat / d_rat.max(1e-30)).sqrt();
                    if ratio > 5.0 || ratio < 0.2 {
                        self.rho = (self.rho * ratio).clamp(1e-6, 1e6);
                        self.factorize();
                        rho_updates += 1;
                    }
                }
            }
        }

        // unscale
        let x_out: Vec<f64> = (0..self.n).map(|i| x[i] * self.d[i]).collect();
        let y_out: Vec<f64> = (0..self.m)
            .map(|r| y[r] * self.e[r] / self.c_obj)
            .collect();

        let mut sol = RelaxSolution {
            status,
            objective: self.objective_at(&x_out),
            x: x_out,
            y: y_out,
            iterations,
            primal_residual: r_prim,
            dual_residual: r_dual,
            polished: false,
        };

        if sol.status == RelaxStatus::Solved {
            if let Some(polished) = self.polish(&sol, lb, ub) {
                sol = polished;
            }
            if sol.primal_residual > self.settings.accept_tol
                || sol.dual_residual > self.settings.accept_tol
            {
                sol.status = RelaxStatus::IterLimit;
            }
        }
        sol
    }

    /// Farkas-style certificate on the (unscaled) dual increment: if the
    /// support function of the constraint set at δy is more negative than
    /// ‖Aᵀδy‖₁ times the largest variable-box magnitude, no feasible point
    /// exists. All variables must be boxed for the bound to apply.
    fn primal_infeasibility_certificate(&self, dy_scaled: &[f64], lb: &[f64], ub: &[f64]) -> bool {
        let mut box_max = 0.0f64;
        for v in 0..self.n {
            if !lb[v].is_finite() || !ub[v].is_finite() {
                return false;
            }
            box_max = box_max.max(lb[v].abs()).max(ub[v].abs());
        }
        let dy: Vec<f64> = (0..self.m)
            .map(|r| dy_scaled[r] * self.e[r] / self.c_obj)
            .collect();
        let norm = inf_norm(&dy);
        if norm < 1e-12 {
            return false;
        }
        let tol = 1e-7 * norm;
        // ‖Aᵀδy‖₁ in unscaled space
        let mut at_dy = vec![0.0; self.n];
        for r in 0..self.m {
            if dy[r] != 0.0 {
                for (cix, v) in self.a.row(r) {
                    at_dy[cix] += v / (self.e[r] * self.d[cix]) * dy[r];
                }
            }
        }
        let at_dy_l1: f64 = at_dy.iter().map(|v| v.abs()).sum();

        let mut support = 0.0;
        let mut r = 0;
        while r < self.m {
            match self.row_kinds[r] {
                RowKind::Cone => {
                    // shifted cone K − c: support is −cᵀv on the polar cone
                    let v = [dy[r], dy[r + 1], dy[r + 2]];
                    let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    if nv > -v[2] + tol {
                        return false; // not in the polar cone: support unbounded
                    }
                    support -= self.cone_shift[r] / self.e[r] * v[0]
                        + self.cone_shift[r + 1] / self.e[r + 1] * v[1]
                        + self.cone_shift[r + 2] / self.e[r + 2] * v[2];
                    r += 3;
                }
                _ => {
                    let v = dy[r];
                    let (lo, hi) = self.unscaled_interval(r, lb, ub);
                    if v > tol {
                        if !hi.is_finite() {
                            return false;
                        }
                        support += hi * v;
                    } else if v < -tol {
                        if !lo.is_finite() {
                            return false;
                        }
                        support += lo * v;
                    }
                    r += 1;
                }
            }
        }
        support < -(at_dy_l1 * box_max + 1e-10)
    }

    /// Re-solve the KKT system restricted to the active rows. Cone rows are
    /// only tolerated when inactive (slack); an active cone makes us keep the
    /// iterative solution instead.
    fn polish(&self, sol: &RelaxSolution, lb: &[f64], ub: &[f64]) -> Option<RelaxSolution> {
        let act_tol = 1e-10;
        let mut active: Vec<(usize, f64)> = Vec::new(); // (row, target value)
        let mut r = 0;
        while r < self.m {
            match self.row_kinds[r] {
                RowKind::Cone => {
                    let v0 = self.row_value_unscaled(r, &sol.x);
                    let v1 = self.row_value_unscaled(r + 1, &sol.x);
                    let t = self.row_value_unscaled(r + 2, &sol.x);
                    let slack = t - (v0 * v0 + v1 * v1).sqrt();
                    if slack < 1e-7 {
                        return None; // active cone: no linear polish
                    }
                    r += 3;
                }
                RowKind::LinRow | RowKind::Bound(_) => {
                    let (lo, hi) = self.unscaled_interval(r, lb, ub);
                    let y_r = sol.y[r];
                    if (lo - hi).abs() < 1e-15 && lo.is_finite() {
                        active.push((r, lo));
                    } else if y_r < -act_tol && lo.is_finite() {
                        active.push((r, lo));
                    } else if y_r > act_tol && hi.is_finite() {
                        active.push((r, hi));
                    }
                    r += 1;
                }
            }
        }

        let na = active.len();
        let dim = self.n + na;
        // unscaled KKT: [P Âᵀ; Â 0] with small regularization
        let mut kkt = DMatrix::<f64>::zeros(dim, dim);
        let reg = 1e-11;
        for i in 0..self.n {
            for j in 0..self.n {
                // unscale P: P_unscaled = D⁻¹ P̂ D⁻¹ / c
                kkt[(i, j)] = self.p[(i, j)] / (self.d[i] * self.d[j] * self.c_obj);
            }
            kkt[(i, i)] += reg;
        }
        for (ai, &(row, _)) in active.iter().enumerate() {
            for (cix, v) in self.a.row(row) {
                let unscaled = v / (self.e[row] * self.d[cix]);
                kkt[(self.n + ai, cix)] = unscaled;
                kkt[(cix, self.n + ai)] = unscaled;
            }
            kkt[(self.n + ai, self.n + ai)] = -reg;
        }
        let mut rhs = DVector::<f64>::zeros(dim);
        for i in 0..self.n {
            rhs[i] = -self.q[i] / (self.d[i] * self.c_obj);
        }
        for (ai, &(_, target)) in active.iter().enumerate() {
            rhs[self.n + ai] = target;
        }
        let lu = kkt.clone().full_piv_lu();
        let mut sol_vec = lu.solve(&rhs)?;
        // one round of iterative refinement against the regularized system
        let resid = &rhs - &kkt * &sol_vec;
        if let Some(corr) = lu.solve(&resid) {
            sol_vec += corr;
        }

        let x: Vec<f64> = (0..self.n).map(|i| sol_vec[i]).collect();
        let mut y = vec![0.0; self.m];
        for (ai, &(row, _)) in active.iter().enumerate() {
            y[row] = -sol_vec[self.n + ai];
        }

        // check the polished point: all rows feasible, duals consistent
        let (rp, rd) = self.residuals_unscaled(&x, &y, lb, ub);
        if rp <= sol.primal_residual.max(1e-9) && rd <= sol.dual_residual.max(1e-9) {
            Some(RelaxSolution {
                status: RelaxStatus::Solved,
                objective: self.objective_at(&x),
                x,
                y,
                iterations: sol.iterations,
                primal_residual: rp,
                dual_residual: rd,
                polished: true,
            })
        } else {
            None
        }
    }

    fn unscaled_interval(&self, r: usize, lb: &[f64], ub: &[f64]) -> (f64, f64) {
        match self.row_kinds[r] {
            RowKind::Bound(v) => (lb[v], ub[v]),
            RowKind::LinRow => {
                let lo = self.l_base[r];
                let hi = self.u_base[r];
                (
                    if lo.is_finite() { lo / self.e[r] } else { lo },
                    if hi.is_finite() { hi / self.e[r] } else { hi },
                )
            }
            RowKind::Cone => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Unscaled value of row `r` at unscaled `x` (shift included for cone rows).
    fn row_value_unscaled(&self, r: usize, x: &[f64]) -> f64 {
        let mut acc = self.cone_shift[r] / self.e[r];
        for (cix, v) in self.a.row(r) {
            acc += v / (self.e[r] * self.d[cix]) * x[cix];
        }
        acc
    }

    /// Unscaled primal/dual residuals of an unscaled `(x, y)` pair.
    pub fn residuals_unscaled(&self, x: &[f64], y: &[f64], lb: &[f64], ub: &[f64]) -> (f64, f64) {
        let mut rp: f64 = 0.0;
        let mut r = 0;
        while r < self.m {
            match self.row_kinds[r] {
                RowKind::Cone => {
                    let v0 = self.row_value_unscaled(r, x);
                    let v1 = self.row_value_unscaled(r + 1, x);
                    let t = self.row_value_unscaled(r + 2, x);
                    rp = rp.max(((v0 * v0 + v1 * v1).sqrt() - t).max(0.0));
                    r += 3;
                }
                _ => {
                    let val = self.row_value_unscaled(r, x);
                    let (lo, hi) = self.unscaled_interval(r, lb, ub);
                    rp = rp.max((lo - val).max(val - hi).max(0.0));
                    r += 1;
                }
            }
        }
        // dual residual: Px + q + Aᵀy, all unscaled
        let mut grad = vec![0.0f64; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.p[(i, j)] / (self.d[i] * self.d[j] * self.c_obj) * x[j];
            }
            grad[i] = acc + self.q[i] / (self.d[i] * self.c_obj);
        }
        for r2 in 0..self.m {
            if y[r2] != 0.0 {
                for (cix, v) in self.a.row(r2) {
                    grad[cix] += v / (self.e[r2] * self.d[cix]) * y[r2];
                }
            }
        }
        (rp, inf_norm(&grad))
    }
}

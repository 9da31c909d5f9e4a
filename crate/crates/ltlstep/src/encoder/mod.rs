//! Compilation of LTL formulas into mixed-integer linear constraints.
//!
//! Every atom is bound to one binary variable per step (`P^k` = 1 iff the
//! atom holds at step k). A specification asserted at step k is compiled so
//! that the constraint set is feasible exactly when the binaries, read back
//! as a trace, satisfy the formula under the finite-trace semantics of
//! [`crate::ltl::evaluate`].
//!
//! Top-level Boolean combinations of literals under a single temporal
//! pattern compile to compact sum constraints (a disjunction of atoms under
//! `F` becomes one `Σ_k Σ_atoms P >= 1` row). Nested formulas fall back to
//! reification: a fresh binary `z` is tied to the subformula's truth value
//! with a two-sided big-M pair, and the parent pattern is applied to `z`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::ltl::Formula;
use crate::solver::ir::{ModelIR, Sense, VarId};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EncodeError {
    #[error("atom `{atom}` is not bound to model variables (known atoms: {})", known.join(", "))]
    UnboundAtom { atom: String, known: Vec<String> },
    #[error("binding for `{atom}` has {got} steps, horizon is {want}")]
    BindingLength {
        atom: String,
        got: usize,
        want: usize,
    },
    #[error("step {step} out of range 1..={horizon}")]
    StepOutOfRange { step: usize, horizon: usize },
    #[error("time bound [{from},{to}] does not intersect steps {lo}..={hi}; the specification can never hold at this horizon")]
    EmptyTimeBound {
        from: usize,
        to: usize,
        lo: usize,
        hi: usize,
    },
    #[error("formula contains `{0}`, which must be desugared before encoding")]
    NotDesugared(&'static str),
}

/// Maps atom names to their per-step binary variables (index 0 = step 1).
#[derive(Debug, Clone, Default)]
pub struct AtomBinding {
    map: BTreeMap<String, Vec<VarId>>,
}

impl AtomBinding {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bind `atom` to `vars`; the vector length must equal the horizon used
    /// at encoding time (checked in [`EncodingContext::binding_of`]).
    pub fn bind(&mut self, atom: impl Into<String>, vars: Vec<VarId>) {
        self.map.insert(atom.into(), vars);
    }

    pub fn get(&self, atom: &str) -> Option<&[VarId]> {
        self.map.get(atom).map(|v| v.as_slice())
    }

    pub fn names(&self) -> Vec<String> {
        self.map.keys().cloned().collect()
    }
}

/// Shared state for one specification-encoding pass: horizon, big-M/little-m
/// constants, the auxiliary-variable counter, and the reification cache.
#[derive(Debug)]
pub struct EncodingContext {
    horizon: usize,
    big_m: f64,
    small_m: f64,
    aux_count: usize,
    reify_cache: HashMap<(String, usize), VarId>,
}

impl EncodingContext {
    /// `big_m` defaults to N+1 (enough to relax any sum of N binaries) and
    /// is raised per row to twice the child count when that is larger;
    /// `small_m` is 1, exact for integer-valued left-hand sides.
    pub fn new(horizon: usize) -> Self {
        assert!(horizon >= 1, "horizon must be positive");
        Self {
            horizon,
            big_m: (horizon + 1) as f64,
            small_m: 1.0,
            aux_count: 0,
        reify_cache: HashMap::new(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of auxiliary binaries allocated so far.
    pub fn aux_binaries(&self) -> usize {
        self.aux_count
    }

    fn fresh_aux(&mut self, model: &mut ModelIR) -> VarId {
        let id = model.add_binary(format!("aux_{}", self.aux_count));
        self.aux_count += 1;
        id
    }

    fn effective_m(&self, child_count: usize) -> f64 {
        self.big_m.max(2.0 * child_count as f64)
    }

    fn binding_of<'a>(
        &self,
        binding: &'a AtomBinding,
        atom: &str,
    ) -> Result<&'a [VarId], EncodeError> {
        let vars = binding.get(atom).ok_or_else(|| EncodeError::UnboundAtom {
            atom: atom.to_string(),
            known: binding.names(),
        })?;
        if vars.len() != self.horizon {
            return Err(EncodeError::BindingLength {
                atom: atom.to_string(),
                got: vars.len(),
                want: self.horizon,
            });
        }
        Ok(vars)
    }

    fn check_step(&self, k: usize) -> Result<(), EncodeError> {
        if k == 0 || k > self.horizon {
            return Err(EncodeError::StepOutOfRange {
                step: k,
                horizon: self.horizon,
            });
        }
        Ok(())
    }
}

/// A literal (atom or negated atom) contributes one ±1 term to a sum row;
/// anything else must be reified first.
fn literal_term(
    f: &Formula,
    binding: &AtomBinding,
    ctx: &EncodingContext,
    k: usize,
) -> Option<Result<(VarId, f64, f64), EncodeError>> {
    match f {
        Formula::Atom(a) => Some(ctx.binding_of(binding, a).map(|vs| (vs[k - 1], 1.0, 0.0))),
        Formula::Not(inner) => match inner.as_ref() {
            // ¬p contributes (1 − P): coefficient −1, constant +1
            Formula::Atom(a) => {
                Some(ctx.binding_of(binding, a).map(|vs| (vs[k - 1], -1.0, 1.0)))
            }
            _ => None,
        },
        _ => None,
    }
}

fn is_literal(f: &Formula) -> bool {
    matches!(f, Formula::Atom(_))
        || matches!(f, Formula::Not(inner) if matches!(inner.as_ref(), Formula::Atom(_)))
}

/// Step-k truth count of a Boolean body as a flat sum: returns the terms,
/// the accumulated constant, and the threshold at which the body is true
/// (`count >= threshold` for Or-like, `count = threshold` for And-like).
struct FlatBody {
    /// true when the body is an And of literals (all must hold), false for
    /// Or of literals / single literal (at least one must hold)
    conjunctive: bool,
    literals: Vec<Formula>,
}

/// Classify a body that can be summed directly at each step without
/// reification, reproducing the compact hand encodings.
fn flat_body(f: &Formula) -> Option<FlatBody> {
    if is_literal(f) {
        return Some(FlatBody {
            conjunctive: true, // single literal: both readings coincide
            literals: vec![f.clone()],
        });
    }
    match f {
        Formula::Or(cs) if cs.iter().all(is_literal) => Some(FlatBody {
            conjunctive: false,
            literals: cs.clone(),
        }),
        Formula::And(cs) if cs.iter().all(is_literal) => Some(FlatBody {
            conjunctive: true,
            literals: cs.clone(),
        }),
        _ => None,
    }
}

/// Terms and constant for `Σ literals` of `body` at step `i`.
fn flat_terms_at(
    body: &FlatBody,
    binding: &AtomBinding,
    ctx: &EncodingContext,
    i: usize,
    terms: &mut Vec<(VarId, f64)>,
    constant: &mut f64,
) -> Result<(), EncodeError> {
    for lit in &body.literals {
        let (v, c, k0) = literal_term(lit, binding, ctx, i)
            .expect("flat bodies contain only literals")?;
        terms.push((v, c));
        *constant += k0;
    }
    Ok(())
}

/// Allocate a fresh binary `z` and add the two-sided big-M biconditional
/// `z = 1  ⟺  Σ terms + constant >= threshold` (child sums are integral, so
/// `m = 1` makes the reverse side exact).
fn reify_threshold(
    model: &mut ModelIR,
    ctx: &mut EncodingContext,
    tag: &str,
    terms: Vec<(VarId, f64)>,
    constant: f64,
    threshold: f64,
    child_count: usize,
) -> VarId {
    let z = ctx.fresh_aux(model);
    let m_big = ctx.effective_m(child_count);
    // Σ >= t − M(1−z)   ⟹   Σ + (−M)·z... rearranged: Σ + M·z' with z' = (1−z):
    //   Σ − t + M − M·z >= 0   ⟸   terms − M·z >= t − M − constant
    let mut lower = terms.clone();
    lower.push((z, -m_big));
    model.add_tagged_row(tag, lower, Sense::Ge, threshold - m_big - constant);
    // Σ <= t − m + M·z   ⟹   terms − M·z <= t − m − constant
    let mut upper = terms;
    upper.push((z, -m_big));
    model.add_tagged_row(
        tag,
        upper,
        Sense::Le,
        threshold - ctx.small_m - constant,
    );
    z
}

/// Return a binary variable equal (in every feasible solution) to the truth
/// value of `f` at step `k`. Atoms return their bound variable directly;
/// everything else allocates auxiliaries. Results are cached per
/// (formula, step).
pub fn reify(
    f: &Formula,
    binding: &AtomBinding,
    k: usize,
    model: &mut ModelIR,
    ctx: &mut EncodingContext,
) -> Result<VarId, EncodeError> {
    ctx.check_step(k)?;
    let key = (f.to_string(), k);
    if let Some(&v) = ctx.reify_cache.get(&key) {
        return Ok(v);
    }
    let n = ctx.horizon;
    let z = match f {
        Formula::True => {
            let z = ctx.fresh_aux(model);
            model.fix(z, 1.0);
            z
        }
        Formula::Atom(a) => ctx.binding_of(binding, a)?[k - 1],
        Formula::Not(inner) => {
            let child = reify(inner, binding, k, model, ctx)?;
            let z = ctx.fresh_aux(model);
            model.add_tagged_row("not", vec![(z, 1.0), (child, 1.0)], Sense::Eq, 1.0);
            z
        }
        Formula::And(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            for c in cs {
                terms.push((reify(c, binding, k, model, ctx)?, 1.0));
            }
            let t = cs.len() as f64;
            reify_threshold(model, ctx, "and", terms, 0.0, t, cs.len())
        }
        Formula::Or(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            for c in cs {
                terms.push((reify(c, binding, k, model, ctx)?, 1.0));
            }
            reify_threshold(model, ctx, "or", terms, 0.0, 1.0, cs.len())
        }
        Formula::Implies(..) => return Err(EncodeError::NotDesugared("->")),
        Formula::Iff(..) => return Err(EncodeError::NotDesugared("<->")),
        Formula::Next(inner) => {
            if k < n {
                reify(inner, binding, k + 1, model, ctx)?
            } else {
                // strong next: no successor at the horizon
                let z = ctx.fresh_aux(model);
                model.fix(z, 0.0);
                z
            }
        }
        Formula::Until(lhs, rhs) => {
            let t = encode_until(lhs, rhs, binding, k, model, ctx, false)?;
            t[0]
        }
        Formula::Eventually(bound, body) => {
            match clamp_range(bound, k, n) {
                None => {
                    let z = ctx.fresh_aux(model);
                    model.fix(z, 0.0); // empty window: eventually is false
                    z
                }
                Some((lo, hi)) => {
                    let mut terms = Vec::with_capacity(hi - lo + 1);
                    for i in lo..=hi {
                        terms.push((reify(body, binding, i, model, ctx)?, 1.0));
                    }
                    let count = terms.len();
                    reify_threshold(model, ctx, "ev", terms, 0.0, 1.0, count)
                }
            }
        }
        Formula::Always(bound, body) => {
            match clamp_range(bound, k, n) {
                None => {
                    let z = ctx.fresh_aux(model);
                    model.fix(z, 1.0); // empty window: always is vacuously true
                    z
                }
                Some((lo, hi)) => {
                    let mut terms = Vec::with_capacity(hi - lo + 1);
                    for i in lo..=hi {
                        terms.push((reify(body, binding, i, model, ctx)?, 1.0));
                    }
                    let count = terms.len();
                    reify_threshold(model, ctx, "alw", terms, 0.0, count as f64, count)
                }
            }
        }
        Formula::AlwaysEventually(body) => {
            // z = ∧_{j=k..N} reify(F body, j); inner reifications are cached
            let ev = Formula::Eventually(None, body.clone());
            let mut terms = Vec::with_capacity(n - k + 1);
            for j in k..=n {
                terms.push((reify(&ev, binding, j, model, ctx)?, 1.0));
            }
            let t = terms.len() as f64;
            let count = terms.len();
            reify_threshold(model, ctx, "alwev", terms, 0.0, t, count)
        }
        Formula::EventuallyAlways(body) => {
            let alw = Formula::Always(None, body.clone());
            let mut terms = Vec::with_capacity(n - k + 1);
            for j in k..=n {
                terms.push((reify(&alw, binding, j, model, ctx)?, 1.0));
            }
            let count = terms.len();
            reify_threshold(model, ctx, "evalw", terms, 0.0, 1.0, count)
        }
    };
    ctx.reify_cache.insert(key, z);
    Ok(z)
}

fn clamp_range(
    bound: &Option<crate::ltl::StepRange>,
    k: usize,
    n: usize,
) -> Option<(usize, usize)> {
    match bound {
        Some(r) => r.clamp(k, n),
        None => Some((k, n)),
    }
}

/// Encode the until chain `T^k..T^N` with the expansion-law recursion:
/// base case `T^N = z_rhs^N`, then for i = N−1 down to k a conjunction
/// binary `B^i ⟺ z_lhs^i ∧ T^{i+1}` and `T^i ⟺ z_rhs^i ∨ B^i`. When
/// `top_level`, additionally pins `T^k = 1`; otherwise the caller uses the
/// returned `T^k` as the reified truth value.
pub fn encode_until(
    lhs: &Formula,
    rhs: &Formula,
    binding: &AtomBinding,
    k: usize,
    model: &mut ModelIR,
    ctx: &mut EncodingContext,
    top_level: bool,
) -> Result<Vec<VarId>, EncodeError> {
    ctx.check_step(k)?;
    let n = ctx.horizon;
    let t_vars: Vec<VarId> = (k..=n)
        .map(|_| ctx.fresh_aux(model))
        .collect();
    let t_at = |i: usize| t_vars[i - k];

    let rhs_n = reify(rhs, binding, n, model, ctx)?;
    model.add_tagged_row(
        "until_base",
        vec![(t_at(n), 1.0), (rhs_n, -1.0)],
        Sense::Eq,
        0.0,
    );

    for i in (k..n).rev() {
        let lhs_i = reify(lhs, binding, i, model, ctx)?;
        let rhs_i = reify(rhs, binding, i, model, ctx)?;
        let b_i = reify_threshold(
            model,
            ctx,
            "until_and",
            vec![(lhs_i, 1.0), (t_at(i + 1), 1.0)],
            0.0,
            2.0,
            2,
        );
        // T^i ⟺ rhs_i ∨ B^i, written on T^i rather than a fresh binary
        let m_big = ctx.effective_m(2);
        model.add_tagged_row(
            "until_or",
            vec![(rhs_i, 1.0), (b_i, 1.0), (t_at(i), -m_big)],
            Sense::Ge,
            1.0 - m_big,
        );
        model.add_tagged_row(
            "until_or",
            vec![(rhs_i, 1.0), (b_i, 1.0), (t_at(i), -m_big)],
            Sense::Le,
            1.0 - ctx.small_m,
        );
    }

    if top_level {
        model.add_tagged_row("until_sat", vec![(t_at(k), 1.0)], Sense::Eq, 1.0);
    }
    Ok(t_vars)
}

/// Encode a temporal pattern (`G`, `F`, `GF`, `FG`, optionally bounded)
/// asserted at step `k`, using the compact sum forms where the body is a
/// Boolean combination of literals.
pub fn encode_pattern(
    f: &Formula,
    binding: &AtomBinding,
    k: usize,
    model: &mut ModelIR,
    ctx: &mut EncodingContext,
) -> Result<(), EncodeError> {
    ctx.check_step(k)?;
    let n = ctx.horizon;
    match f {
        Formula::Always(bound, body) => {
            let (lo, hi) = clamp_range(bound, k, n).ok_or_else(|| {
                let r = bound.expect("unbounded range is never empty");
                EncodeError::EmptyTimeBound {
                    from: r.from,
                    to: r.to,
                    lo: k,
                    hi: n,
                }
            })?;
            let steps = (hi - lo + 1) as f64;
            match flat_body(body) {
                // all literals must hold at every step: one sum row
                // (>= is equivalent to = here because each addend is <= 1)
                Some(fb) if fb.conjunctive => {
                    let mut terms = Vec::new();
                    let mut constant = 0.0;
                    for i in lo..=hi {
                        flat_terms_at(&fb, binding, ctx, i, &mut terms, &mut constant)?;
                    }
                    let want = steps * fb.literals.len() as f64;
                    model.add_tagged_row("safety", terms, Sense::Ge, want - constant);
                }
                _ => {
                    let mut terms = Vec::new();
                    for i in lo..=hi {
                        terms.push((reify(body, binding, i, model, ctx)?, 1.0));
                    }
                    model.add_tagged_row("safety", terms, Sense::Ge, steps);
                }
            }
        }
        Formula::Eventually(bound, body) => {
            let (lo, hi) = clamp_range(bound, k, n).ok_or_else(|| {
                let r = bound.expect("unbounded range is never empty");
                EncodeError::EmptyTimeBound {
                    from: r.from,
                    to: r.to,
                    lo: k,
                    hi: n,
                }
            })?;
            match flat_body(body) {
                // at least one literal at one step: a single flat sum row
                Some(fb) if !fb.conjunctive || fb.literals.len() == 1 => {
                    let mut terms = Vec::new();
                    let mut constant = 0.0;
                    for i in lo..=hi {
                        flat_terms_at(&fb, binding, ctx, i, &mut terms, &mut constant)?;
                    }
                    model.add_tagged_row("liveness", terms, Sense::Ge, 1.0 - constant);
                }
                _ => {
                    let mut terms = Vec::new();
                    for i in lo..=hi {
                        terms.push((reify(body, binding, i, model, ctx)?, 1.0));
                    }
                    model.add_tagged_row("liveness", terms, Sense::Ge, 1.0);
                }
            }
        }
        Formula::AlwaysEventually(body) => {
            // one liveness row per suffix j = k..N
            let flat = flat_body(body)
                .filter(|fb| !fb.conjunctive || fb.literals.len() == 1);
            for j in k..=n {
                match &flat {
                    Some(fb) => {
                        let mut terms = Vec::new();
                        let mut constant = 0.0;
                        for i in j..=n {
                            flat_terms_at(fb, binding, ctx, i, &mut terms, &mut constant)?;
                        }
                        model.add_tagged_row("rep_liveness", terms, Sense::Ge, 1.0 - constant);
                    }
                    None => {
                        let mut terms = Vec::new();
                        for i in j..=n {
                            terms.push((reify(body, binding, i, model, ctx)?, 1.0));
                        }
                        model.add_tagged_row("rep_liveness", terms, Sense::Ge, 1.0);
                    }
                }
            }
        }
        Formula::EventuallyAlways(body) => {
            // indicator D^j per suffix: D^j = 1 forces the body at j..N,
            // and at least one indicator must be chosen
            let flat = flat_body(body).filter(|fb| fb.conjunctive);
            let mut indicators = Vec::with_capacity(n - k + 1);
            for j in k..=n {
                let d_j = ctx.fresh_aux(model);
                let suffix = (n - j + 1) as f64;
                match &flat {
                    Some(fb) => {
                        let mut terms = Vec::new();
                        let mut constant = 0.0;
                        for i in j..=n {
                            flat_terms_at(fb, binding, ctx, i, &mut terms, &mut constant)?;
                        }
                        let want = suffix * fb.literals.len() as f64;
                        terms.push((d_j, -want));
                        model.add_tagged_row("persistence", terms, Sense::Ge, -constant);
                    }
                    None => {
                        let mut terms = Vec::new();
                        for i in j..=n {
                            terms.push((reify(body, binding, i, model, ctx)?, 1.0));
                        }
                        terms.push((d_j, -suffix));
                        model.add_tagged_row("persistence", terms, Sense::Ge, 0.0);
                    }
                }
                indicators.push((d_j, 1.0));
            }
            model.add_tagged_row("persistence_pick", indicators, Sense::Ge, 1.0);
        }
        _ => unreachable!("encode_pattern called on a non-pattern node"),
    }
    Ok(())
}

/// Add constraints forcing the suffix starting at step `k` to satisfy `f`.
/// `f` must be desugared (no `->`/`<->`).
pub fn encode_satisfaction(
    f: &Formula,
    binding: &AtomBinding,
    k: usize,
    model: &mut ModelIR,
    ctx: &mut EncodingContext,
) -> Result<(), EncodeError> {
    ctx.check_step(k)?;
    let n = ctx.horizon;
    match f {
        Formula::True => {}
        Formula::Atom(a) => {
            let v = ctx.binding_of(binding, a)?[k - 1];
            model.add_tagged_row("atom", vec![(v, 1.0)], Sense::Eq, 1.0);
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) => {
                let v = ctx.binding_of(binding, a)?[k - 1];
                model.add_tagged_row("neg", vec![(v, 1.0)], Sense::Eq, 0.0);
            }
            Formula::True => {
                model.warn(format!("specification `{f}` is trivially false"));
                model.add_tagged_row("false", vec![], Sense::Eq, 1.0);
            }
            _ => {
                let z = reify(inner, binding, k, model, ctx)?;
                model.add_tagged_row("neg", vec![(z, 1.0)], Sense::Eq, 0.0);
            }
        },
        Formula::And(cs) => {
            // Σ child values = m over literals and reified children
            let mut terms = Vec::with_capacity(cs.len());
            let mut constant = 0.0;
            for c in cs {
                match literal_term(c, binding, ctx, k) {
                    Some(lit) => {
                        let (v, coef, k0) = lit?;
                        terms.push((v, coef));
                        constant += k0;
                    }
                    None => terms.push((reify(c, binding, k, model, ctx)?, 1.0)),
                }
            }
            let m = cs.len() as f64;
            model.add_tagged_row("conj", terms, Sense::Eq, m - constant);
        }
        Formula::Or(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            let mut constant = 0.0;
            for c in cs {
                match literal_term(c, binding, ctx, k) {
                    Some(lit) => {
                        let (v, coef, k0) = lit?;
                        terms.push((v, coef));
                        constant += k0;
                    }
                    None => terms.push((reify(c, binding, k, model, ctx)?, 1.0)),
                }
            }
            model.add_tagged_row("disj", terms, Sense::Ge, 1.0 - constant);
        }
        Formula::Implies(..) => return Err(EncodeError::NotDesugared("->")),
        Formula::Iff(..) => return Err(EncodeError::NotDesugared("<->")),
        Formula::Next(inner) => {
            if k < n {
                encode_satisfaction(inner, binding, k + 1, model, ctx)?;
            } else {
                model.warn(format!(
                    "`X` at the final step {n} can never hold (strong next); the model is infeasible"
                ));
                model.add_tagged_row("next_horizon", vec![], Sense::Eq, 1.0);
            }
        }
        Formula::Until(lhs, rhs) => {
            encode_until(lhs, rhs, binding, k, model, ctx, true)?;
        }
        Formula::Eventually(..)
        | Formula::Always(..)
        | Formula::AlwaysEventually(_)
        | Formula::EventuallyAlways(_) => {
            encode_pattern(f, binding, k, model, ctx)?;
        }
    }
    Ok(())
}

/// Desugar and encode a specification asserted at step 1.
pub fn encode_spec(
    f: &Formula,
    binding: &AtomBinding,
    model: &mut ModelIR,
    ctx: &mut EncodingContext,
) -> Result<(), EncodeError> {
    encode_satisfaction(&f.desugar(), binding, 1, model, ctx)
}

/// Allocate one binary per (atom, step) and bind them; used by tests and by
/// encoder-level tooling that does not have footstep variables.
pub fn bind_fresh_atoms(
    atoms: &[&str],
    horizon: usize,
    model: &mut ModelIR,
) -> AtomBinding {
    let mut binding = AtomBinding::new();
    for atom in atoms {
        let vars = (1..=horizon)
            .map(|k| model.add_binary(format!("P_{atom}_{k}")))
            .collect();
        binding.bind(*atom, vars);
    }
    binding
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn setup(horizon: usize, atoms: &[&str]) -> (ModelIR, AtomBinding, EncodingContext) {
        let mut model = ModelIR::new();
        let binding = bind_fresh_atoms(atoms, horizon, &mut model);
        let ctx = EncodingContext::new(horizon);
        (model, binding, ctx)
    }

    #[test]
    fn atom_pins_step_binary() {
        let (mut model, binding, mut ctx) = setup(3, &["p"]);
        encode_satisfaction(&parse("p").unwrap(), &binding, 2, &mut model, &mut ctx).unwrap();
        let row = model.rows.last().unwrap();
        assert_eq!(row.sense, Sense::Eq);
        assert_eq!(row.rhs, 1.0);
        assert_eq!(row.terms, vec![(binding.get("p").unwrap()[1], 1.0)]);
    }

    #[test]
    fn negated_atom_pins_to_zero() {
        let (mut model, binding, mut ctx) = setup(3, &["p"]);
        encode_satisfaction(&parse("!p").unwrap(), &binding, 1, &mut model, &mut ctx).unwrap();
        let row = model.rows.last().unwrap();
        assert_eq!((row.sense, row.rhs), (Sense::Eq, 0.0));
    }

    #[test]
    fn eventually_disjunction_is_one_flat_row() {
        // Σ_{j=1..N} (P_p_j + P_q_j) >= 1, no auxiliaries
        let (mut model, binding, mut ctx) = setup(4, &["p", "q"]);
        encode_spec(
            &parse("F (p | q)").unwrap(),
            &binding,
            &mut model,
            &mut ctx,
        )
        .unwrap();
        assert_eq!(model.rows.len(), 1);
        assert_eq!(ctx.aux_binaries(), 0);
        let row = &model.rows[0];
        assert_eq!(row.terms.len(), 8);
        assert_eq!((row.sense, row.rhs), (Sense::Ge, 1.0));
    }

    #[test]
    fn bounded_always_is_one_flat_row() {
        // Σ_{j=2..3} P_p_j >= 2
        let (mut model, binding, mut ctx) = setup(4, &["p"]);
        encode_spec(&parse("G[2,3] p").unwrap(), &binding, &mut model, &mut ctx).unwrap();
        assert_eq!(model.rows.len(), 1);
        let row = &model.rows[0];
        assert_eq!(row.terms.len(), 2);
        assert_eq!((row.sense, row.rhs), (Sense::Ge, 2.0));
    }

    #[test]
    fn empty_clamped_bound_is_an_error() {
        let (mut model, binding, mut ctx) = setup(3, &["p"]);
        let err = encode_spec(&parse("G[4,9] p").unwrap(), &binding, &mut model, &mut ctx)
            .unwrap_err();
        assert!(matches!(err, EncodeError::EmptyTimeBound { .. }));
    }

    #[test]
    fn next_at_horizon_warns_and_is_infeasible() {
        let (mut model, binding, mut ctx) = setup(2, &["p"]);
        encode_satisfaction(&parse("X p").unwrap(), &binding, 2, &mut model, &mut ctx).unwrap();
        assert_eq!(model.warnings.len(), 1);
        let row = model.rows.last().unwrap();
        assert!(row.terms.is_empty());
        assert_eq!((row.sense, row.rhs), (Sense::Eq, 1.0));
    }

    #[test]
    fn unbound_atom_reports_known_names() {
        let (mut model, binding, mut ctx) = setup(2, &["p"]);
        let err =
            encode_spec(&parse("F q").unwrap(), &binding, &mut model, &mut ctx).unwrap_err();
        match err {
            EncodeError::UnboundAtom { atom, known } => {
                assert_eq!(atom, "q");
                assert_eq!(known, vec!["p".to_string()]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn until_allocates_expected_chain() {
        // N−k+1 T variables plus N−k conjunction binaries, atoms reified as themselves
        let (mut model, binding, mut ctx) = setup(5, &["p", "q"]);
        let before = ctx.aux_binaries();
        encode_until(
            &parse("p").unwrap(),
            &parse("q").unwrap(),
            &binding,
            2,
            &mut model,
            &mut ctx,
            true,
        )
        .unwrap();
        let n_minus_k = 5 - 2;
        assert_eq!(ctx.aux_binaries() - before, (n_minus_k + 1) + n_minus_k);
    }

    #[test]
    fn reify_atom_is_identity() {
        let (mut model, binding, mut ctx) = setup(4, &["p"]);
        let z = reify(&parse("p").unwrap(), &binding, 3, &mut model, &mut ctx).unwrap();
        assert_eq!(z, binding.get("p").unwrap()[2]);
        assert_eq!(ctx.aux_binaries(), 0);
    }

    #[test]
    fn reify_cache_shares_subformulas() {
        let (mut model, binding, mut ctx) = setup(3, &["p", "q"]);
        let f = parse("p & q").unwrap();
        let a = reify(&f, &binding, 1, &mut model, &mut ctx).unwrap();
        let b = reify(&f, &binding, 1, &mut model, &mut ctx).unwrap();
        assert_eq!(a, b);
        assert_eq!(ctx.aux_binaries(), 1);
    }

    #[test]
    fn sugar_is_rejected() {
        let (mut model, binding, mut ctx) = setup(2, &["p", "q"]);
        let err = encode_satisfaction(
            &parse("p -> q").unwrap(),
            &binding,
            1,
            &mut model,
            &mut ctx,
        )
        .unwrap_err();
        assert_eq!(err, EncodeError::NotDesugared("->"));
    }
}

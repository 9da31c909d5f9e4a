//! LP interchange files (CPLEX dialect) for cross-validation with external
//! solvers: writer for [`ModelIR`] and a reader for the files we emit.
//!
//! variable naming follows the builder (`x_1`, `y_1`, `th_1`, `H_r_j`,
//! `S_l_j`, `C_l_j`, `aux_k`); row names are preserved. Quadratic objective
//! terms go into the standard `[ ... ] / 2` block. Euclidean-norm rows are
//! exported as convex quadratic constraints `dx² + dy² <= r² + Σ M (1−g)`
//! with big-M terms sized from the variable boxes; the active profile is
//! recorded in a header comment.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::ir::{canonical_terms, LinRow, ModelIR, Objective, Sense, VarId, Variable, VarKind};

#[derive(Debug, Error)]
pub enum LpError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A parsed quadratic constraint `Σ q·x_i·x_j + Σ c·x_i <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConstraint {
    pub name: String,
    pub quad: Vec<(VarId, VarId, f64)>,
    pub lin: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Result of reading an LP file back.
#[derive(Debug, Clone)]
pub struct ParsedLp {
    pub model: ModelIR,
    pub quad_constraints: Vec<QuadConstraint>,
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn push_term(out: &mut String, first: &mut bool, coef: f64, body: &str) {
    if coef == 0.0 {
        return;
    }
    if *first {
        if coef < 0.0 {
            out.push_str("- ");
        }
        *first = false;
    } else if coef < 0.0 {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    let mag = coef.abs();
    if mag == 1.0 && !body.is_empty() {
        out.push_str(body);
    } else if body.is_empty() {
        out.push_str(&fmt_num(mag));
    } else {
        let _ = write!(out, "{} {}", fmt_num(mag), body);
    }
}

/// Serialize to LP text. Models built on the polygonal path are fully
/// linear; norm rows, when present, become quadratic constraints.
pub fn write_lp_string(model: &ModelIR) -> String {
    let mut out = String::new();
    let profile = if model.norm_rows.is_empty() {
        "linear"
    } else {
        "quadratic-constraints"
    };
    out.push_str("\\ ltlstep model export\n");
    let _ = writeln!(out, "\\ profile: {profile}");
    out.push_str("Minimize\n obj: ");

    let name = |v: VarId| model.vars[v.0].name.as_str();
    let mut first = true;
    let lin = canonical_terms(model.objective.lin.clone());
    for &(v, c) in &lin {
        push_term(&mut out, &mut first, c, name(v));
    }
    if model.objective.constant != 0.0 {
        push_term(&mut out, &mut first, model.objective.constant, "");
    }
    if !model.objective.quad.is_empty() {
        if first {
            out.push('0');
        }
        out.push_str(" + [ ");
        let mut qfirst = true;
        for &(i, j, c) in &model.objective.quad {
            // bracket contents are divided by 2, so coefficients double
            let body = if i == j {
                format!("{} ^ 2", name(i))
            } else {
                format!("{} * {}", name(i), name(j))
            };
            push_term(&mut out, &mut qfirst, 2.0 * c, &body);
        }
        out.push_str(" ] / 2");
    } else if first {
        out.push('0');
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}: ", row.name);
        let mut rfirst = true;
        for &(v, c) in &row.terms {
            push_term(&mut out, &mut rfirst, c, name(v));
        }
        if rfirst {
            out.push('0');
        }
        let _ = writeln!(out, " {} {}", row.sense, fmt_num(row.rhs));
    }
    for (ni, nr) in model.norm_rows.iter().enumerate() {
        // ‖d‖ <= r + Σ M(1−g)  ⟶  dx² + dy² + Σ big·g <= r² + Σ big
        // with the active radius r recovered by engaging every guard
        let guard_sum: f64 = nr.radius.terms.iter().map(|&(_, c)| c).sum();
        let r_act = nr.radius.constant + guard_sum;
        let (dx_lo, dx_hi) = nr.exprs[0].bounds(&model.vars);
        let (dy_lo, dy_hi) = nr.exprs[1].bounds(&model.vars);
        let dmax2 = dx_lo.abs().max(dx_hi.abs()).powi(2) + dy_lo.abs().max(dy_hi.abs()).powi(2);
        let big = (dmax2 - r_act * r_act).max(1.0);

        let mut quad: Vec<(VarId, VarId, f64)> = Vec::new();
        let mut lin_terms: Vec<(VarId, f64)> = Vec::new();
        let mut rhs = r_act * r_act;
        for expr in &nr.exprs {
            for (a, &(vi, ci)) in expr.terms.iter().enumerate() {
                for &(vj, cj) in expr.terms.iter().skip(a) {
                    let (lo, hi) = if vi <= vj { (vi, vj) } else { (vj, vi) };
                    let coef = if vi == vj { ci * cj } else { 2.0 * ci * cj };
                    quad.push((lo, hi, coef));
                }
                if expr.constant != 0.0 {
                    lin_terms.push((vi, 2.0 * ci * expr.constant));
                }
            }
            rhs -= expr.constant * expr.constant;
        }
        for &(g, c) in &nr.radius.terms {
            debug_assert!(c < 0.0, "guard terms relax the radius when the binary is 0");
            let _ = c;
            lin_terms.push((g, big));
            rhs += big;
        }
        let mut qsorted = quad;
        qsorted.sort_by_key(|&(i, j, _)| (i, j));
        let _ = write!(out, " {}_qc{}: [ ", nr.name, ni);
        let mut qfirst = true;
        for &(i, j, c) in &qsorted {
            let body = if i == j {
                format!("{} ^ 2", name(i))
            } else {
                format!("{} * {}", name(i), name(j))
            };
            push_term(&mut out, &mut qfirst, c, &body);
        }
        out.push_str(" ]");
        let mut lfirst = false;
        for &(v, c) in &canonical_terms(lin_terms) {
            push_term(&mut out, &mut lfirst, c, name(v));
        }
        let _ = writeln!(out, " <= {}", fmt_num(rhs));
    }

    out.push_str("Bounds\n");
    for v in &model.vars {
        if v.lb == v.ub {
            let _ = writeln!(out, " {} = {}", v.name, fmt_num(v.lb));
        } else if v.lb == f64::NEG_INFINITY && v.ub == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if v.ub == f64::INFINITY {
            let _ = writeln!(out, " {} >= {}", v.name, fmt_num(v.lb));
        } else if v.lb == f64::NEG_INFINITY {
            let _ = writeln!(out, " {} <= {}", v.name, fmt_num(v.ub));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lb), v.name, fmt_num(v.ub));
        }
    }
    let binaries: Vec<&str> = model
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(16) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_lp_file(model: &ModelIR, path: &Path) -> Result<(), LpError> {
    std::fs::write(path, write_lp_string(model))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// reader

#[derive(Debug, Clone, PartialEq)]
enum LpTok {
    Word(String),
    Num(f64),
    Plus,
    Minus,
    Star,
    Caret,
    LBracket,
    RBracket,
    Slash,
    Colon,
    Le,
    Ge,
    Eq,
}

fn tokenize(text: &str) -> Result<Vec<(LpTok, usize)>, LpError> {
    let mut toks = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = match line.find('\\') {
            Some(p) => &line[..p],
            None => line,
        };
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' => i += 1,
                b'+' => {
                    toks.push((LpTok::Plus, line_no));
                    i += 1;
                }
                b'-' => {
                    toks.push((LpTok::Minus, line_no));
                    i += 1;
                }
                b'*' => {
                    toks.push((LpTok::Star, line_no));
                    i += 1;
                }
                b'^' => {
                    toks.push((LpTok::Caret, line_no));
                    i += 1;
                }
                b'[' => {
                    toks.push((LpTok::LBracket, line_no));
                    i += 1;
                }
                b']' => {
                    toks.push((LpTok::RBracket, line_no));
                    i += 1;
                }
                b'/' => {
                    toks.push((LpTok::Slash, line_no));
                    i += 1;
                }
                b':' => {
                    toks.push((LpTok::Colon, line_no));
                    i += 1;
                }
                b'<' | b'>' | b'=' => {
                    let mut j = i + 1;
                    if j < bytes.len() && bytes[j] == b'=' {
                        j += 1;
                    }
                    toks.push((
                        match c {
                            b'<' => LpTok::Le,
                            b'>' => LpTok::Ge,
                            _ => LpTok::Eq,
                        },
                        line_no,
                    ));
                    i = j;
                }
                b'0'..=b'9' | b'.' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_digit()
                            || bytes[i] == b'.'
                            || bytes[i] == b'e'
                            || bytes[i] == b'E'
                            || ((bytes[i] == b'+' || bytes[i] == b'-')
                                && i > start
                                && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                    {
                        i += 1;
                    }
                    let text = &line[start..i];
                    let v: f64 = text.parse().map_err(|_| LpError::Parse {
                        line: line_no,
                        msg: format!("bad number `{text}`"),
                    })?;
                    toks.push((LpTok::Num(v), line_no));
                }
                _ => {
                    let start = i;
                    while i < bytes.len()
                        && !matches!(
                            bytes[i],
                            b' ' | b'\t' | b'+' | b'-' | b'*' | b'^' | b'[' | b']' | b'/'
                                | b':' | b'<' | b'>' | b'='
                        )
                    {
                        i += 1;
                    }
                    toks.push((LpTok::Word(line[start..i].to_string()), line_no));
                }
            }
        }
    }
    Ok(toks)
}

struct LpParser {
    toks: Vec<(LpTok, usize)>,
    idx: usize,
    vars: Vec<Variable>,
    by_name: std::collections::HashMap<String, usize>,
}

impl LpParser {
    fn peek(&self) -> Option<&LpTok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.idx.min(self.toks.len().saturating_sub(1)))
            .map(|(_, l)| *l)
            .unwrap_or(0)
    }

    fn err(&self, msg: impl Into<String>) -> LpError {
        LpError::Parse {
            line: self.line(),
            msg: msg.into(),
        }
    }

    fn next_word(&mut self) -> Option<String> {
        if let Some(LpTok::Word(w)) = self.peek() {
            let w = w.clone();
            self.idx += 1;
            Some(w)
        } else {
            None
        }
    }

    fn var(&mut self, name: &str) -> VarId {
        if let Some(&i) = self.by_name.get(name) {
            return VarId(i);
        }
        let id = self.vars.len();
        self.vars.push(Variable {
            name: name.to_string(),
            kind: VarKind::Continuous,
            lb: f64::NEG_INFINITY,
            ub: f64::INFINITY,
        });
        self.by_name.insert(name.to_string(), id);
        VarId(id)
    }

    fn keyword_at(&self, kw: &[&str]) -> bool {
        // section keywords like "subject to" span up to two words
        if let Some(LpTok::Word(w)) = self.peek() {
            let w0 = w.to_ascii_lowercase();
            if kw.len() == 1 {
                return w0 == kw[0];
            }
            if w0 == kw[0] {
                if let Some((LpTok::Word(w2), _)) = self.toks.get(self.idx + 1) {
                    return w2.to_ascii_lowercase() == kw[1];
                }
            }
        }
        false
    }

    fn at_section_start(&self) -> bool {
        self.keyword_at(&["subject", "to"])
            || self.keyword_at(&["st"])
            || self.keyword_at(&["bounds"])
            || self.keyword_at(&["binary"])
            || self.keyword_at(&["binaries"])
            || self.keyword_at(&["bin"])
            || self.keyword_at(&["general"])
            || self.keyword_at(&["generals"])
            || self.keyword_at(&["end"])
            || self.keyword_at(&["minimize"])
            || self.keyword_at(&["maximize"])
    }

    /// Parse an affine/quadratic expression until a sense token or section
    /// keyword. Returns (linear terms, quad terms, constant).
    #[allow(clippy::type_complexity)]
    fn parse_expr(
        &mut self,
        allow_quad_block: bool,
    ) -> Result<(Vec<(VarId, f64)>, Vec<(VarId, VarId, f64)>, f64), LpError> {
        let mut lin: Vec<(VarId, f64)> = Vec::new();
        let mut quad: Vec<(VarId, VarId, f64)> = Vec::new();
        let mut constant = 0.0;
        let mut sign = 1.0;
        let mut pending: Option<f64> = None;
        loop {
            match self.peek() {
                None | Some(LpTok::Le) | Some(LpTok::Ge) | Some(LpTok::Eq) => break,
                Some(LpTok::Plus) => {
                    if let Some(c) = pending.take() {
                        constant += sign * c;
                    }
                    sign = 1.0;
                    self.idx += 1;
                }
                Some(LpTok::Minus) => {
                    if let Some(c) = pending.take() {
                        constant += sign * c;
                    }
                    sign = -1.0;
                    self.idx += 1;
                }
                Some(LpTok::Num(v)) => {
                    let v = *v;
                    if let Some(c) = pending.take() {
                        constant += sign * c; // two numbers in a row: first was a constant
                        sign = 1.0;
                    }
                    pending = Some(v);
                    self.idx += 1;
                }
                Some(LpTok::LBracket) => {
                    if !allow_quad_block {
                        return Err(self.err("unexpected `[`"));
                    }
                    self.idx += 1;
                    let (divide, q) = self.parse_quad_block()?;
                    for (i, j, c) in q {
                        quad.push((i, j, sign * c / if divide { 2.0 } else { 1.0 }));
                    }
                    sign = 1.0;
                    pending = None;
                }
                Some(LpTok::Word(_)) => {
                    if self.at_section_start() {
                        break;
                    }
                    let w = self.next_word().unwrap();
                    let coef = sign * pending.take().unwrap_or(1.0);
                    let v = self.var(&w);
                    lin.push((v, coef));
                    sign = 1.0;
                }
                Some(other) => {
                    return Err(self.err(format!("unexpected token {other:?}")));
                }
            }
        }
        if let Some(c) = pending.take() {
            constant += sign * c;
        }
        Ok((lin, quad, constant))
    }

    /// After `[`: quadratic terms until `]`, optionally followed by `/ 2`.
    fn parse_quad_block(&mut self) -> Result<(bool, Vec<(VarId, VarId, f64)>), LpError> {
        let mut out = Vec::new();
        let mut sign = 1.0;
        let mut pending: Option<f64> = None;
        loop {
            match self.peek().cloned() {
                Some(LpTok::RBracket) => {
                    self.idx += 1;
                    break;
                }
                Some(LpTok::Plus) => {
                    sign = 1.0;
                    self.idx += 1;
                }
                Some(LpTok::Minus) => {
                    sign = -1.0;
                    self.idx += 1;
                }
                Some(LpTok::Num(v)) => {
                    pending = Some(v);
                    self.idx += 1;
                }
                Some(LpTok::Word(w)) => {
                    self.idx += 1;
                    let coef = sign * pending.take().unwrap_or(1.0);
                    let v1 = self.var(&w);
                    match self.peek().cloned() {
                        Some(LpTok::Caret) => {
                            self.idx += 1;
                            match self.peek().cloned() {
                                Some(LpTok::Num(p)) if p == 2.0 => self.idx += 1,
                                _ => return Err(self.err("expected `^ 2`")),
                            }
                            out.push((v1, v1, coef));
                        }
                        Some(LpTok::Star) => {
                            self.idx += 1;
                            let w2 = self
                                .next_word()
                                .ok_or_else(|| self.err("expected variable after `*`"))?;
                            let v2 = self.var(&w2);
                            let (a, b) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
                            out.push((a, b, coef));
                        }
                        _ => return Err(self.err("expected `^ 2` or `*` in quadratic block")),
                    }
                    sign = 1.0;
                }
                other => return Err(self.err(format!("unexpected token in `[ ]`: {other:?}"))),
            }
        }
        let divide = if self.peek() == Some(&LpTok::Slash) {
            self.idx += 1;
            match self.peek().cloned() {
                Some(LpTok::Num(v)) if v == 2.0 => {
                    self.idx += 1;
                    true
                }
                _ => return Err(self.err("expected `/ 2`")),
            }
        } else {
            false
        };
        Ok((divide, out))
    }
}

/// Parse LP text produced by [`write_lp_string`] (plus common variants).
pub fn parse_lp_string(text: &str) -> Result<ParsedLp, LpError> {
    let toks = tokenize(text)?;
    let mut p = LpParser {
        toks,
        idx: 0,
        vars: Vec::new(),
        by_name: std::collections::HashMap::new(),
    };

    let mut objective = Objective::default();
    let mut rows: Vec<LinRow> = Vec::new();
    let mut quad_constraints: Vec<QuadConstraint> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    let mut bound_decls: Vec<(String, f64, f64)> = Vec::new();
    let mut bound_order: Vec<String> = Vec::new();

    // objective section
    if p.keyword_at(&["minimize"]) {
        p.idx += 1;
    } else if p.keyword_at(&["maximize"]) {
        return Err(p.err("only minimization models are supported"));
    }
    // optional "obj:" label
    if let Some(LpTok::Word(_)) = p.peek() {
        if matches!(p.toks.get(p.idx + 1), Some((LpTok::Colon, _))) {
            p.idx += 2;
        }
    }
    let (lin, quad, constant) = p.parse_expr(true)?;
    objective.lin = lin;
    objective.quad = quad;
    objective.constant = constant;

    // constraints
    if p.keyword_at(&["subject", "to"]) {
        p.idx += 2;
    } else if p.keyword_at(&["st"]) {
        p.idx += 1;
    }
    while !(p.keyword_at(&["bounds"])
        || p.keyword_at(&["binary"])
        || p.keyword_at(&["binaries"])
        || p.keyword_at(&["bin"])
        || p.keyword_at(&["general"])
        || p.keyword_at(&["generals"])
        || p.keyword_at(&["end"])
        || p.peek().is_none())
    {
        // row label
        let name = match p.next_word() {
            Some(w) if p.peek() == Some(&LpTok::Colon) => {
                p.idx += 1;
                w
            }
            Some(w) => {
                // no colon: the word was part of the expression; rewind
                p.idx -= 1;
                let _ = w;
                format!("r{}", rows.len() + quad_constraints.len())
            }
            None => format!("r{}", rows.len() + quad_constraints.len()),
        };
        let (lin, quad, constant) = p.parse_expr(true)?;
        let sense = match p.peek().cloned() {
            Some(LpTok::Le) => Sense::Le,
            Some(LpTok::Ge) => Sense::Ge,
            Some(LpTok::Eq) => Sense::Eq,
            other => return Err(p.err(format!("expected row sense, got {other:?}"))),
        };
        p.idx += 1;
        let mut rhs_sign = 1.0;
        if p.peek() == Some(&LpTok::Minus) {
            rhs_sign = -1.0;
            p.idx += 1;
        } else if p.peek() == Some(&LpTok::Plus) {
            p.idx += 1;
        }
        let rhs = match p.peek().cloned() {
            Some(LpTok::Num(v)) => {
                p.idx += 1;
                rhs_sign * v
            }
            other => return Err(p.err(format!("expected rhs number, got {other:?}"))),
        };
        let rhs = rhs - constant;
        if quad.is_empty() {
            rows.push(LinRow {
                name,
                terms: canonical_terms(lin),
                sense,
                rhs,
            });
        } else {
            quad_constraints.push(QuadConstraint {
                name,
                quad,
                lin: canonical_terms(lin),
                sense,
                rhs,
            });
        }
    }

    // bounds
    if p.keyword_at(&["bounds"]) {
        p.idx += 1;
        loop {
            if p.keyword_at(&["binary"])
                || p.keyword_at(&["binaries"])
                || p.keyword_at(&["bin"])
                || p.keyword_at(&["general"])
                || p.keyword_at(&["generals"])
                || p.keyword_at(&["end"])
                || p.peek().is_none()
            {
                break;
            }
            // forms: `l <= x <= u`, `x <= u`, `x >= l`, `x = v`, `x free`
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            let name: String;
            let mut num_sign = 1.0;
            if p.peek() == Some(&LpTok::Minus) {
                num_sign = -1.0;
                p.idx += 1;
            }
            if let Some(LpTok::Num(v)) = p.peek().cloned() {
                p.idx += 1;
                lo = num_sign * v;
                if p.peek() != Some(&LpTok::Le) {
                    return Err(p.err("expected `<=` in bound"));
                }
                p.idx += 1;
                name = p.next_word().ok_or_else(|| p.err("expected variable"))?;
                if p.peek() == Some(&LpTok::Le) {
                    p.idx += 1;
                    let mut s = 1.0;
                    if p.peek() == Some(&LpTok::Minus) {
                        s = -1.0;
                        p.idx += 1;
                    }
                    match p.peek().cloned() {
                        Some(LpTok::Num(v)) => {
                            p.idx += 1;
                            hi = s * v;
                        }
                        _ => return Err(p.err("expected upper bound")),
                    }
                }
            } else {
                name = p.next_word().ok_or_else(|| p.err("expected variable"))?;
                match p.peek().cloned() {
                    Some(LpTok::Word(w)) if w.eq_ignore_ascii_case("free") => {
                        p.idx += 1;
                    }
                    Some(LpTok::Le) | Some(LpTok::Ge) | Some(LpTok::Eq) => {
                        let sense = p.peek().cloned().unwrap();
                        p.idx += 1;
                        let mut s = 1.0;
                        if p.peek() == Some(&LpTok::Minus) {
                            s = -1.0;
                            p.idx += 1;
                        }
                        let v = match p.peek().cloned() {
                            Some(LpTok::Num(v)) => {
                                p.idx += 1;
                                s * v
                            }
                            _ => return Err(p.err("expected bound value")),
                        };
                        match sense {
                            LpTok::Le => hi = v,
                            LpTok::Ge => lo = v,
                            _ => {
                                lo = v;
                                hi = v;
                            }
                        }
                    }
                    other => return Err(p.err(format!("bad bound line near {other:?}"))),
                }
            }
            p.var(&name);
            bound_order.push(name.clone());
            bound_decls.push((name, lo, hi));
        }
    }

    if p.keyword_at(&["binary"]) || p.keyword_at(&["binaries"]) || p.keyword_at(&["bin"]) {
        p.idx += 1;
        while let Some(LpTok::Word(w)) = p.peek().cloned() {
            if w.eq_ignore_ascii_case("end")
                || w.eq_ignore_ascii_case("general")
                || w.eq_ignore_ascii_case("generals")
            {
                break;
            }
            p.idx += 1;
            binaries.push(w);
        }
    }

    // reorder variables to the Bounds-section order when it covers them all,
    // so round-trips reproduce the original variable indexing
    let mut order: Vec<usize> = Vec::new();
    if bound_order.len() == p.vars.len() {
        let mut seen = std::collections::HashSet::new();
        for n in &bound_order {
            if let Some(&i) = p.by_name.get(n) {
                if seen.insert(i) {
                    order.push(i);
                }
            }
        }
    }
    let remap: Vec<usize> = if order.len() == p.vars.len() {
        let mut inv = vec![0usize; p.vars.len()];
        for (new_i, &old_i) in order.iter().enumerate() {
            inv[old_i] = new_i;
        }
        inv
    } else {
        (0..p.vars.len()).collect()
    };

    let mut vars: Vec<Variable> = vec![
        Variable {
            name: String::new(),
            kind: VarKind::Continuous,
            lb: f64::NEG_INFINITY,
            ub: f64::INFINITY,
        };
        p.vars.len()
    ];
    for (old_i, v) in p.vars.iter().enumerate() {
        vars[remap[old_i]] = v.clone();
    }
    for (name, lo, hi) in bound_decls {
        let i = remap[p.by_name[&name]];
        vars[i].lb = lo;
        vars[i].ub = hi;
    }
    for name in &binaries {
        if let Some(&old) = p.by_name.get(name) {
            let i = remap[old];
            vars[i].kind = VarKind::Binary;
            if vars[i].lb == f64::NEG_INFINITY {
                vars[i].lb = 0.0;
            }
            if vars[i].ub == f64::INFINITY {
                vars[i].ub = 1.0;
            }
        }
    }

    let remap_id = |v: VarId| VarId(remap[v.0]);
    let mut model = ModelIR::new();
    model.vars = vars;
    for row in rows {
        model.add_row(
            row.name,
            row.terms.into_iter().map(|(v, c)| (remap_id(v), c)).collect(),
            row.sense,
            row.rhs,
        );
    }
    model.objective = Objective {
        quad: canonical_quad(
            objective
                .quad
                .into_iter()
                .map(|(i, j, c)| {
                    let (a, b) = (remap_id(i), remap_id(j));
                    if a <= b {
                        (a, b, c)
                    } else {
                        (b, a, c)
                    }
                })
                .collect(),
        ),
        lin: canonical_terms(
            objective
                .lin
                .into_iter()
                .map(|(v, c)| (remap_id(v), c))
                .collect(),
        ),
        constant: objective.constant,
    };
    let quad_constraints = quad_constraints
        .into_iter()
        .map(|qc| QuadConstraint {
            name: qc.name,
            quad: canonical_quad(
                qc.quad
                    .into_iter()
                    .map(|(i, j, c)| {
                        let (a, b) = (remap_id(i), remap_id(j));
                        if a <= b {
                            (a, b, c)
                        } else {
                            (b, a, c)
                        }
                    })
                    .collect(),
            ),
            lin: canonical_terms(
                qc.lin
                    .into_iter()
                    .map(|(v, c)| (remap_id(v), c))
                    .collect(),
            ),
            sense: qc.sense,
            rhs: qc.rhs,
        })
        .collect();

    Ok(ParsedLp {
        model,
        quad_constraints,
    })
}

fn canonical_quad(mut quad: Vec<(VarId, VarId, f64)>) -> Vec<(VarId, VarId, f64)> {
    quad.sort_by_key(|&(i, j, _)| (i, j));
    let mut out: Vec<(VarId, VarId, f64)> = Vec::with_capacity(quad.len());
    for (i, j, c) in quad {
        match out.last_mut() {
            Some((li, lj, lc)) if *li == i && *lj == j => *lc += c,
            _ => out.push((i, j, c)),
        }
    }
    out.retain(|&(_, _, c)| c != 0.0);
    out
}

pub fn parse_lp_file(path: &Path) -> Result<ParsedLp, LpError> {
    let text = std::fs::read_to_string(path)?;
    parse_lp_string(&text)
}

use std::fmt;

/// Inclusive 1-based step interval attached to `G`/`F`, e.g. `G[7,15]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepRange {
    pub from: usize,
    pub to: usize,
}

impl StepRange {
    /// Requires `1 <= from <= to`.
    pub fn new(from: usize, to: usize) -> Option<Self> {
        (1 <= from && from <= to).then_some(Self { from, to })
    }

    /// Intersect with `[lo, hi]`; `None` when the intersection is empty.
    pub fn clamp(&self, lo: usize, hi: usize) -> Option<(usize, usize)> {
        let a = self.from.max(lo);
        let b = self.to.min(hi);
        (a <= b).then_some((a, b))
    }
}

/// An LTL formula.
///
/// `And`/`Or` are n-ary with at least two children; the parser flattens
/// unparenthesized chains (`a & b & c` becomes a single three-child `And`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Option<StepRange>, Box<Formula>),
    Always(Option<StepRange>, Box<Formula>),
    AlwaysEventually(Box<Formula>),
    EventuallyAlways(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction normalized to the n-ary invariant: zero children is
    /// `True`, one child is the child itself.
    pub fn conj(mut children: Vec<Formula>) -> Self {
        match children.len() {
            0 => Formula::True,
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction normalized like [`Formula::conj`].
    pub fn disj(mut children: Vec<Formula>) -> Self {
        match children.len() {
            0 => Formula::Not(Box::new(Formula::True)),
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(lhs: Formula, rhs: Formula) -> Self {
        Formula::Until(Box::new(lhs), Box::new(rhs))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(None, Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(None, Box::new(f))
    }

    /// Names of all atoms in the formula, deduplicated, in first-occurrence order.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::True => {}
            Formula::Atom(a) => {
                if !out.iter().any(|x| x == a) {
                    out.push(a.clone());
                }
            }
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Eventually(_, f)
            | Formula::Always(_, f)
            | Formula::AlwaysEventually(f)
            | Formula::EventuallyAlways(f) => f.collect_atoms(out),
            Formula::And(cs) | Formula::Or(cs) => {
                for c in cs {
                    c.collect_atoms(out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Rewrite `->` and `<->` into `!`/`|`/`&`; everything else is kept as a
    /// primitive (`F`, `G`, `GF`, `FG` have direct mixed-integer encodings).
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.desugar()).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.desugar()).collect()),
            Formula::Implies(a, b) => {
                Formula::Or(vec![Formula::not(a.desugar()), b.desugar()])
            }
            Formula::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::And(vec![
                    Formula::Or(vec![Formula::not(a.clone()), b.clone()]),
                    Formula::Or(vec![Formula::not(b), a]),
                ])
            }
            Formula::Next(f) => Formula::next(f.desugar()),
            Formula::Until(a, b) => Formula::until(a.desugar(), b.desugar()),
            Formula::Eventually(r, f) => Formula::Eventually(*r, Box::new(f.desugar())),
            Formula::Always(r, f) => Formula::Always(*r, Box::new(f.desugar())),
            Formula::AlwaysEventually(f) => Formula::AlwaysEventually(Box::new(f.desugar())),
            Formula::EventuallyAlways(f) => Formula::EventuallyAlways(Box::new(f.desugar())),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(_) => 3,
            Formula::And(_) => 4,
            Formula::Until(..) => 5,
            Formula::Not(_)
            | Formula::Next(_)
            | Formula::Eventually(..)
            | Formula::Always(..)
            | Formula::AlwaysEventually(_)
            | Formula::EventuallyAlways(_) => 6,
            Formula::True | Formula::Atom(_) => 7,
        }
    }
}

/// Writes a child, parenthesized when it would not re-parse at this position.
fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    /// Prints the concrete syntax accepted by [`crate::ltl::parse`];
    /// `parse(format!("{f}"))` reconstructs the identical AST.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Formula::True => write!(f, "true"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(x) => {
                write!(f, "!")?;
                write_child(f, x, prec)
            }
            Formula::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    // nested And must keep its parentheses or it would flatten
                    write_child(f, c, prec + 1)?;
                }
                Ok(())
            }
            Formula::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write_child(f, c, prec + 1)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                // right-associative: the left operand needs parens at equal precedence
                write_child(f, a, prec + 1)?;
                write!(f, " -> ")?;
                write_child(f, b, prec)
            }
            Formula::Iff(a, b) => {
                write_child(f, a, prec + 1)?;
                write!(f, " <-> ")?;
                write_child(f, b, prec)
            }
            Formula::Until(a, b) => {
                write_child(f, a, prec + 1)?;
                write!(f, " U ")?;
                write_child(f, b, prec)
            }
            Formula::Next(x) => {
                write!(f, "X ")?;
                write_child(f, x, prec)
            }
            Formula::Eventually(r, x) => {
                match r {
                    Some(r) => write!(f, "F[{},{}] ", r.from, r.to)?,
                    None => write!(f, "F ")?,
                }
                write_child(f, x, prec)
            }
            Formula::Always(r, x) => {
                match r {
                    Some(r) => write!(f, "G[{},{}] ", r.from, r.to)?,
                    None => write!(f, "G ")?,
                }
                write_child(f, x, prec)
            }
            Formula::AlwaysEventually(x) => {
                write!(f, "GF ")?;
                write_child(f, x, prec)
            }
            Formula::EventuallyAlways(x) => {
                write!(f, "FG ")?;
                write_child(f, x, prec)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desugar_implies() {
        let f = Formula::Implies(Box::new(Formula::atom("a")), Box::new(Formula::atom("b")));
        assert_eq!(
            f.desugar(),
            Formula::Or(vec![Formula::not(Formula::atom("a")), Formula::atom("b")])
        );
    }

    #[test]
    fn desugar_iff() {
        let f = Formula::Iff(Box::new(Formula::atom("a")), Box::new(Formula::atom("b")));
        assert_eq!(
            f.desugar(),
            Formula::And(vec![
                Formula::Or(vec![Formula::not(Formula::atom("a")), Formula::atom("b")]),
                Formula::Or(vec![Formula::not(Formula::atom("b")), Formula::atom("a")]),
            ])
        );
    }

    #[test]
    fn desugar_is_fixed_point_on_or() {
        let f = Formula::Or(vec![Formula::atom("a"), Formula::atom("b")]);
        assert_eq!(f.desugar(), f);
    }

    #[test]
    fn atoms_deduplicated() {
        let f = Formula::And(vec![
            Formula::atom("p"),
            Formula::Or(vec![Formula::atom("q"), Formula::atom("p")]),
        ]);
        assert_eq!(f.atoms(), vec!["p".to_string(), "q".to_string()]);
    }
}

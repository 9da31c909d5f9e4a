use std::fmt;

use thiserror::Error;

use super::ast::{Formula, StepRange};

/// Syntax error with a 1-based source position and the token set that would
/// have been accepted there.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: found {found}, expected {}", expected.join(", "))]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    True,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Until,
    Eventually,
    Always,
    AlwaysEventually,
    EventuallyAlways,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::True => write!(f, "`true`"),
            Tok::Not => write!(f, "`!`"),
            Tok::And => write!(f, "`&`"),
            Tok::Or => write!(f, "`|`"),
            Tok::Implies => write!(f, "`->`"),
            Tok::Iff => write!(f, "`<->`"),
            Tok::Next => write!(f, "`X`"),
            Tok::Until => write!(f, "`U`"),
            Tok::Eventually => write!(f, "`F`"),
            Tok::Always => write!(f, "`G`"),
            Tok::AlwaysEventually => write!(f, "`GF`"),
            Tok::EventuallyAlways => write!(f, "`FG`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, found: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            found: found.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn bump(&mut self, n: usize) {
        for _ in 0..n {
            if self.bytes.get(self.pos) == Some(&b'\n') {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
            self.pos += 1;
        }
    }

    /// Next token plus the (line, col) where it starts.
    fn next(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        while matches!(self.bytes.get(self.pos), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump(1);
        }
        let (line, col) = (self.line, self.col);
        let Some(&c) = self.bytes.get(self.pos) else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            b'!' => {
                self.bump(1);
                Tok::Not
            }
            b'&' => {
                self.bump(1);
                Tok::And
            }
            b'|' => {
                self.bump(1);
                Tok::Or
            }
            b'(' => {
                self.bump(1);
                Tok::LParen
            }
            b')' => {
                self.bump(1);
                Tok::RParen
            }
            b'[' => {
                self.bump(1);
                Tok::LBracket
            }
            b']' => {
                self.bump(1);
                Tok::RBracket
            }
            b',' => {
                self.bump(1);
                Tok::Comma
            }
            b'-' => {
                if self.bytes.get(self.pos + 1) == Some(&b'>') {
                    self.bump(2);
                    Tok::Implies
                } else {
                    return Err(self.error("`-`", &["`->`"]));
                }
            }
            b'<' => {
                if self.bytes.get(self.pos + 1..self.pos + 3) == Some(b"->") {
                    self.bump(3);
                    Tok::Iff
                } else {
                    return Err(self.error("`<`", &["`<->`"]));
                }
            }
            b'0'..=b'9' => {
                let start = self.pos;
                while matches!(self.bytes.get(self.pos), Some(b'0'..=b'9')) {
                    self.bump(1);
                }
                let text = &self.src[start..self.pos];
                let n: usize = text
                    .parse()
                    .map_err(|_| self.error(format!("`{text}`"), &["step number"]))?;
                Tok::Int(n)
            }
            c if c == b'_' || c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.bytes.get(self.pos), Some(b) if *b == b'_' || b.is_ascii_alphanumeric())
                {
                    self.bump(1);
                }
                match &self.src[start..self.pos] {
                    "true" => Tok::True,
                    "X" => Tok::Next,
                    "U" => Tok::Until,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "GF" => Tok::AlwaysEventually,
                    "FG" => Tok::EventuallyAlways,
                    ident => Tok::Ident(ident.to_string()),
                }
            }
            other => {
                return Err(self.error(
                    format!("`{}`", char::from(other)),
                    &["formula"],
                ))
            }
        };
        Ok((tok, line, col))
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (tok, line, col) = &self.toks[self.idx];
        ParseError {
            line: *line,
            col: *col,
            found: tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, want: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    // precedence climbing, loosest first: <->, ->, |, &, U, unary
    fn parse_iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_implies()?;
        if *self.peek() == Tok::Iff {
            self.advance();
            let rhs = self.parse_iff()?;
            Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if *self.peek() == Tok::Implies {
            self.advance();
            let rhs = self.parse_implies()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut children = vec![self.parse_and()?];
        while *self.peek() == Tok::Or {
            self.advance();
            children.push(self.parse_and()?);
        }
        Ok(Formula::disj(children))
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut children = vec![self.parse_until()?];
        while *self.peek() == Tok::And {
            self.advance();
            children.push(self.parse_until()?);
        }
        Ok(Formula::conj(children))
    }

    fn parse_until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_unary()?;
        if *self.peek() == Tok::Until {
            self.advance();
            let rhs = self.parse_until()?;
            Ok(Formula::until(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_bound(&mut self) -> Result<Option<StepRange>, ParseError> {
        if *self.peek() != Tok::LBracket {
            return Ok(None);
        }
        self.advance();
        let from = match self.advance() {
            Tok::Int(n) => n,
            _ => return Err(self.error(&["step number"])),
        };
        self.expect(Tok::Comma, "`,`")?;
        let to = match self.advance() {
            Tok::Int(n) => n,
            _ => return Err(self.error(&["step number"])),
        };
        self.expect(Tok::RBracket, "`]`")?;
        StepRange::new(from, to)
            .ok_or_else(|| self.error(&["time bound with 1 <= a <= b"]))
            .map(Some)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.advance();
                Ok(Formula::not(self.parse_unary()?))
            }
            Tok::Next => {
                self.advance();
                Ok(Formula::next(self.parse_unary()?))
            }
            Tok::Eventually => {
                self.advance();
                let bound = self.parse_bound()?;
                Ok(Formula::Eventually(bound, Box::new(self.parse_unary()?)))
            }
            Tok::Always => {
                self.advance();
                let bound = self.parse_bound()?;
                Ok(Formula::Always(bound, Box::new(self.parse_unary()?)))
            }
            Tok::AlwaysEventually => {
                self.advance();
                Ok(Formula::AlwaysEventually(Box::new(self.parse_unary()?)))
            }
            Tok::EventuallyAlways => {
                self.advance();
                Ok(Formula::EventuallyAlways(Box::new(self.parse_unary()?)))
            }
            Tok::True => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.parse_iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(&["`!`", "`X`", "`F`", "`G`", "`GF`", "`FG`", "`true`", "atom", "`(`"])),
        }
    }
}

/// Parse a formula from its concrete syntax.
///
/// Operators, tightest first: unary `!` `X` `F` `G` `GF` `FG` (with optional
/// `[a,b]` bounds on `F`/`G`), `U` (right-associative), `&`, `|`, `->`
/// (right-associative), `<->`. Atoms match `[A-Za-z_][A-Za-z0-9_]*`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let t = lexer.next()?;
        let done = t.0 == Tok::Eof;
        toks.push(t);
        if done {
            break;
        }
    }
    let mut parser = Parser { toks, idx: 0 };
    let formula = parser.parse_iff()?;
    parser.expect(Tok::Eof, "end of input")?;
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn parses_eventually_disjunction() {
        assert_eq!(
            parse("F (p_R3 | p_R4)").unwrap(),
            Formula::eventually(Formula::Or(vec![atom("p_R3"), atom("p_R4")])),
        );
    }

    #[test]
    fn parses_until() {
        assert_eq!(
            parse("(p_R1 | p_R2) U p_R3").unwrap(),
            Formula::until(Formula::Or(vec![atom("p_R1"), atom("p_R2")]), atom("p_R3")),
        );
    }

    #[test]
    fn parses_bounded_always() {
        assert_eq!(
            parse("G[7,15] p_R2").unwrap(),
            Formula::Always(StepRange::new(7, 15), Box::new(atom("p_R2"))),
        );
    }

    #[test]
    fn parses_true() {
        assert_eq!(parse("true").unwrap(), Formula::True);
    }

    #[test]
    fn precedence_and_binds_tighter_than_or() {
        assert_eq!(
            parse("a & b | c").unwrap(),
            Formula::Or(vec![Formula::And(vec![atom("a"), atom("b")]), atom("c")]),
        );
    }

    #[test]
    fn implies_is_right_associative() {
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            Formula::Implies(
                Box::new(atom("a")),
                Box::new(Formula::Implies(Box::new(atom("b")), Box::new(atom("c")))),
            ),
        );
    }

    #[test]
    fn until_is_right_associative() {
        assert_eq!(
            parse("a U b U c").unwrap(),
            Formula::until(atom("a"), Formula::until(atom("b"), atom("c"))),
        );
    }

    #[test]
    fn chains_flatten() {
        assert_eq!(
            parse("a & b & c").unwrap(),
            Formula::And(vec![atom("a"), atom("b"), atom("c")]),
        );
    }

    #[test]
    fn parenthesized_chains_do_not_flatten() {
        assert_eq!(
            parse("a & (b & c)").unwrap(),
            Formula::And(vec![atom("a"), Formula::And(vec![atom("b"), atom("c")])]),
        );
    }

    #[test]
    fn keyword_prefixed_identifiers_are_atoms() {
        assert_eq!(parse("Xp").unwrap(), atom("Xp"));
        assert_eq!(parse("X p").unwrap(), Formula::next(atom("p")));
        assert_eq!(parse("GFoo").unwrap(), atom("GFoo"));
    }

    #[test]
    fn error_reports_position_and_expectations() {
        let err = parse("F (p |").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 7);
        assert!(err.expected.iter().any(|e| e.contains("atom")));
    }

    #[test]
    fn error_on_reversed_bound() {
        let err = parse("G[5,2] p").unwrap_err();
        assert!(err.expected.iter().any(|e| e.contains("1 <= a <= b")));
    }

    #[test]
    fn error_on_zero_bound() {
        assert!(parse("F[0,3] p").is_err());
    }

    #[test]
    fn error_on_trailing_input() {
        let err = parse("p q").unwrap_err();
        assert_eq!(err.col, 3);
    }
}

//! Linear temporal logic over finite footstep traces.
//!
//! Formulas are built from atomic propositions (one truth value per footstep)
//! with Boolean connectives and the temporal operators next (`X`), until
//! (`U`), eventually (`F`), always (`G`) and the composite patterns `GF` /
//! `FG`. `F` and `G` accept an optional inclusive step interval, written
//! `F[a,b]` / `G[a,b]` with 1-based step indices.
//!
//! Semantics are over *finite* traces of length N (one state per footstep).
//! Quantification truncates at the horizon and `X φ` is false at step N
//! (strong next): there is no successor to evaluate φ on.

mod ast;
mod eval;
mod parser;
mod trace;

pub use ast::{Formula, StepRange};
pub use eval::{evaluate, EvalError};
pub use parser::{parse, ParseError};
pub use trace::{Trace, TraceError};

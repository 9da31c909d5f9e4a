use thiserror::Error;

use super::ast::Formula;
use super::trace::{Trace, TraceError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("step {step} out of range 1..={len}")]
    StepOutOfRange { step: usize, len: usize },
    #[error("atom `{0}` not defined in trace")]
    UnknownAtom(String),
}

impl From<TraceError> for EvalError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::StepOutOfRange { step, len } => EvalError::StepOutOfRange { step, len },
            TraceError::UnknownAtom(a) => EvalError::UnknownAtom(a),
            // construction errors cannot come out of lookups
            TraceError::EmptyTrace | TraceError::LengthMismatch { .. } => unreachable!(),
        }
    }
}

/// Does the suffix of `trace` starting at step `k` (1-based) satisfy `f`?
///
/// Finite-trace semantics: `F`/`G`/`U` quantify over steps `k..=N`,
/// time-bounded `F[a,b]`/`G[a,b]` over `max(k,a)..=min(N,b)` (an empty range
/// makes `G` vacuously true and `F` false), and `X φ` is false at step N.
pub fn evaluate(f: &Formula, trace: &Trace, k: usize) -> Result<bool, EvalError> {
    let n = trace.len();
    if k == 0 || k > n {
        return Err(EvalError::StepOutOfRange { step: k, len: n });
    }
    match f {
        Formula::True => Ok(true),
        Formula::Atom(a) => Ok(trace.holds(a, k)?),
        Formula::Not(x) => Ok(!evaluate(x, trace, k)?),
        Formula::And(cs) => {
            for c in cs {
                if !evaluate(c, trace, k)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(cs) => {
            for c in cs {
                if evaluate(c, trace, k)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Implies(a, b) => Ok(!evaluate(a, trace, k)? || evaluate(b, trace, k)?),
        Formula::Iff(a, b) => Ok(evaluate(a, trace, k)? == evaluate(b, trace, k)?),
        Formula::Next(x) => {
            if k < n {
                evaluate(x, trace, k + 1)
            } else {
                Ok(false) // strong next: no successor at the horizon
            }
        }
        Formula::Until(a, b) => {
            for j in k..=n {
                if evaluate(b, trace, j)? {
                    return Ok(true);
                }
                if !evaluate(a, trace, j)? {
                    return Ok(false);
                }
            }
            Ok(false)
        }
        Formula::Eventually(bound, x) => {
            let (lo, hi) = match bound {
                Some(r) => match r.clamp(k, n) {
                    Some(range) => range,
                    None => return Ok(false),
                },
                None => (k, n),
            };
            for i in lo..=hi {
                if evaluate(x, trace, i)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Always(bound, x) => {
            let (lo, hi) = match bound {
                Some(r) => match r.clamp(k, n) {
                    Some(range) => range,
                    None => return Ok(true),
                },
                None => (k, n),
            };
            for i in lo..=hi {
                if !evaluate(x, trace, i)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::AlwaysEventually(x) => {
            for j in k..=n {
                let mut hit = false;
                for i in j..=n {
                    if evaluate(x, trace, i)? {
                        hit = true;
                        break;
                    }
                }
                if !hit {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::EventuallyAlways(x) => {
            'witness: for j in k..=n {
                for i in j..=n {
                    if !evaluate(x, trace, i)? {
                        continue 'witness;
                    }
                }
                return Ok(true);
            }
            Ok(false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn trace(cols: &[(&str, &[bool])]) -> Trace {
        let len = cols[0].1.len();
        Trace::new(
            len,
            cols.iter().map(|(n, v)| (n.to_string(), v.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn always_over_all_true_trace() {
        let t = trace(&[("p", &[true, true, true])]);
        assert!(evaluate(&parse("G p").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn until_with_late_witness() {
        let t = trace(&[("p", &[true, true, false]), ("q", &[false, false, true])]);
        assert!(evaluate(&parse("p U q").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn until_fails_when_lhs_breaks_before_witness() {
        let t = trace(&[("p", &[true, false, false]), ("q", &[false, false, true])]);
        assert!(!evaluate(&parse("p U q").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn next_is_false_at_the_horizon() {
        let t = trace(&[("p", &[true, true])]);
        assert!(!evaluate(&parse("X p").unwrap(), &t, 2).unwrap());
        assert!(evaluate(&parse("X p").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn eventually_always_holds_with_mid_trace_witness() {
        let t = trace(&[("p", &[false, true, true])]);
        assert!(evaluate(&parse("FG p").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn always_eventually_reduces_to_final_step() {
        let t = trace(&[("p", &[true, true, false])]);
        assert!(!evaluate(&parse("GF p").unwrap(), &t, 1).unwrap());
        let t = trace(&[("p", &[false, false, true])]);
        assert!(evaluate(&parse("GF p").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn bounded_operators_clamp_to_horizon() {
        let t = trace(&[("p", &[false, true, false])]);
        assert!(evaluate(&parse("F[2,9] p").unwrap(), &t, 1).unwrap());
        assert!(!evaluate(&parse("G[2,9] p").unwrap(), &t, 1).unwrap());
        // empty after clamping: F false, G vacuously true
        assert!(!evaluate(&parse("F[4,9] p").unwrap(), &t, 1).unwrap());
        assert!(evaluate(&parse("G[4,9] p").unwrap(), &t, 1).unwrap());
    }

    #[test]
    fn step_out_of_range_is_an_error() {
        let t = trace(&[("p", &[true])]);
        assert_eq!(
            evaluate(&parse("p").unwrap(), &t, 2).unwrap_err(),
            EvalError::StepOutOfRange { step: 2, len: 1 }
        );
    }

    #[test]
    fn unknown_atom_is_an_error() {
        let t = trace(&[("p", &[true])]);
        assert_eq!(
            evaluate(&parse("q").unwrap(), &t, 1).unwrap_err(),
            EvalError::UnknownAtom("q".to_string())
        );
    }
}

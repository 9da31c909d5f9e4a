use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace length must be positive")]
    EmptyTrace,
    #[error("atom `{atom}` has {got} values, trace length is {want}")]
    LengthMismatch {
        atom: String,
        got: usize,
        want: usize,
    },
    #[error("step {step} out of range 1..={len}")]
    StepOutOfRange { step: usize, len: usize },
    #[error("atom `{0}` not in trace")]
    UnknownAtom(String),
}

/// Truth assignment for every declared atom at every step 1..=N.
///
/// Immutable once built; evaluation never mutates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    len: usize,
    atoms: BTreeMap<String, Vec<bool>>,
}

impl Trace {
    /// Build from per-atom columns; every column must have length `len`.
    pub fn new(
        len: usize,
        atoms: impl IntoIterator<Item = (String, Vec<bool>)>,
    ) -> Result<Self, TraceError> {
        if len == 0 {
            return Err(TraceError::EmptyTrace);
        }
        let atoms: BTreeMap<String, Vec<bool>> = atoms.into_iter().collect();
        for (name, vals) in &atoms {
            if vals.len() != len {
                return Err(TraceError::LengthMismatch {
                    atom: name.clone(),
                    got: vals.len(),
                    want: len,
                });
            }
        }
        Ok(Self { len, atoms })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length is validated positive
    }

    pub fn atom_names(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(|s| s.as_str())
    }

    /// Truth value of `atom` at 1-based `step`.
    pub fn holds(&self, atom: &str, step: usize) -> Result<bool, TraceError> {
        if step == 0 || step > self.len {
            return Err(TraceError::StepOutOfRange {
                step,
                len: self.len,
            });
        }
        self.atoms
            .get(atom)
            .map(|vals| vals[step - 1])
            .ok_or_else(|| TraceError::UnknownAtom(atom.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_lengths() {
        let err = Trace::new(3, [("p".to_string(), vec![true, false])]).unwrap_err();
        assert!(matches!(err, TraceError::LengthMismatch { .. }));
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(Trace::new(0, []).unwrap_err(), TraceError::EmptyTrace);
    }

    #[test]
    fn lookup_is_one_based() {
        let t = Trace::new(2, [("p".to_string(), vec![true, false])]).unwrap();
        assert!(t.holds("p", 1).unwrap());
        assert!(!t.holds("p", 2).unwrap());
        assert!(t.holds("p", 0).is_err());
        assert!(t.holds("p", 3).is_err());
        assert!(t.holds("q", 1).is_err());
    }
}

//! Mixed-integer solving: the model IR, an ADMM relaxation solver,
//! branch-and-bound, and LP interchange export/import.

pub mod admm;
pub mod bnb;
pub mod ir;
pub mod lp;

pub use admm::{AdmmSettings, RelaxSolution, RelaxStatus, RelaxedQp};
pub use bnb::{
    branch_and_bound, solve_relaxation, BnbSettings, SolveResult, SolveStatus, SolverError,
};
pub use ir::{LinExpr, LinRow, ModelError, ModelIR, NormRow, Objective, Sense, VarId, VarKind};
pub use lp::{parse_lp_file, parse_lp_string, write_lp_file, write_lp_string, LpError, ParsedLp};

//! SMT-LIB2 solver sessions with activation-literal assumptions and unsat
//! cores.

mod session;
pub mod sexp;

pub use session::{
    logic_for, ActivationLiteral, Model, SatResult, Session, SessionConfig, SmtError, SolverSpec, SOLVER_ENV,
};

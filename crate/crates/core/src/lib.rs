//! k-induction model checking for a Lustre subset, with inductive validity
//! core (IVC) extraction and analysis of the resulting cores.

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod engine;
pub mod ivc;
pub mod lustre;
pub mod model;
pub mod smt;
pub mod ts;
pub mod value;

#![allow(dead_code)]

use std::path::PathBuf;
use std::time::Duration;

use ivc_kind::smt::{logic_for, SatResult, Session, SessionConfig, SolverSpec};
use ivc_kind::ts::{symbol, Formula, Step, TransitionSystem};

pub fn z3() -> SessionConfig {
    let mut c = SessionConfig::new(SolverSpec::z3());
    c.timeout = Duration::from_secs(30);
    c
}

pub fn yices() -> SessionConfig {
    let mut c = SessionConfig::new(SolverSpec::yices());
    c.timeout = Duration::from_secs(30);
    c
}

pub fn solvers() -> Vec<SessionConfig> {
    vec![z3(), yices()]
}

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

pub fn model_path(name: &str) -> PathBuf {
    models_dir().join(name)
}

/// Whether `query` is valid, checked in a fresh session.
pub fn valid(cfg: &SessionConfig, ts: &TransitionSystem, query: &Formula, k: u32) -> bool {
    let mut s = Session::open(cfg, logic_for(ts.state_vars.iter().map(|(_, t)| *t))).unwrap();
    for i in 0..=k {
        for (n, t) in &ts.state_vars {
            s.declare(&symbol(n, Step::At(i)), *t).unwrap();
        }
    }
    match s.check_sat(&[], &Formula::not(query.clone())).unwrap() {
        SatResult::Unsat => true,
        SatResult::Sat(_) => false,
        SatResult::Unknown(r) => panic!("unknown: {r}"),
    }
}

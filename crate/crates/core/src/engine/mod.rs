//! k-induction with BMC and Houdini-style invariant generation.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

mod invariants;
mod queries;

pub use invariants::{candidate_invariants, generate_invariants, guard};
pub(crate) use queries::full_query_with;
pub use queries::{base_query, full_query, ind_query, trans_at};

use crate::smt::{logic_for, Model, SatResult, Session, SessionConfig, SmtError};
use crate::ts::{symbol, Formula, Step, TransitionSystem, TsError};
use crate::value::Value;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Smt(SmtError),
    #[error(transparent)]
    Ts(#[from] TsError),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("proof witness failed re-validation: {0}")]
    InvalidProof(String),
}

impl From<SmtError> for EngineError {
    fn from(e: SmtError) -> Self {
        match e {
            SmtError::Dead => EngineError::Inconclusive("timeout".into()),
            SmtError::Inconclusive(r) => EngineError::Inconclusive(r),
            e => EngineError::Smt(e),
        }
    }
}

/// Settings for one prover run.
#[derive(Debug, Clone)]
pub struct ProverConfig {
    pub session: SessionConfig,
    pub max_k: u32,
    /// Wall-clock limit for the whole run, including invariant generation.
    pub budget: Option<Duration>,
    pub invariants: bool,
    /// Extra invariant candidates (state predicates without the `init`
    /// guard), e.g. invariants found by an earlier run.
    pub seeds: Vec<Formula>,
    /// Replays every proof in a fresh session before returning it.
    pub validate: bool,
}

impl ProverConfig {
    pub fn new(session: SessionConfig) -> Self {
        ProverConfig { session, max_k: 20, budget: None, invariants: true, seeds: Vec::new(), validate: true }
    }
}

/// `P` together with invariants `Q` is `k`-inductive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InductiveProof {
    pub property: String,
    pub k: u32,
    /// Each entry is `(name, init ∨ φ)`; the name renders `φ`.
    #[serde(serialize_with = "serialize_named")]
    pub invariants: Vec<(String, Formula)>,
    pub engine: String,
    #[serde(rename = "time_ms", serialize_with = "serialize_ms")]
    pub time: Duration,
}

impl InductiveProof {
    /// `P ∧ Q₁ ∧ … ∧ Qₙ`.
    pub fn strengthened(&self, ts: &TransitionSystem) -> Result<Formula, TsError> {
        let p = ts.property(&self.property)?.clone();
        Ok(Formula::and(std::iter::once(p).chain(self.invariants.iter().map(|(_, f)| f.clone()))))
    }

    pub fn invariant_names(&self) -> Vec<String> {
        self.invariants.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// A path from the pre-initial state `s_0` to a state violating the
/// property. `length` is the index of the violating state, which is also
/// the number of program steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub property: String,
    pub length: u32,
    pub trace: Vec<BTreeMap<String, Value>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProveOutcome {
    Proved(InductiveProof),
    Falsified(Counterexample),
    Unknown(String),
}

impl ProveOutcome {
    pub fn proof(&self) -> Option<&InductiveProof> {
        match self {
            ProveOutcome::Proved(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, ProveOutcome::Proved(_))
    }
}

fn serialize_named<S: serde::Serializer>(v: &[(String, Formula)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(n, _)| n))
}

fn serialize_ms<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

/// A session holding an unrolling of `T` that grows one step at a time.
pub(crate) struct Unroller<'a> {
    pub session: Session,
    ts: &'a TransitionSystem,
    declared: Option<u32>,
    unrolled: u32,
}

impl<'a> Unroller<'a> {
    pub fn open(cfg: &SessionConfig, ts: &'a TransitionSystem, deadline: Option<Instant>) -> Result<Self, SmtError> {
        let mut session = Session::open(cfg, logic_for(ts.state_vars.iter().map(|(_, t)| *t)))?;
        session.set_deadline(deadline);
        Ok(Unroller { session, ts, declared: None, unrolled: 0 })
    }

    /// Declares the state variables of steps `0..=k`.
    pub fn declare_upto(&mut self, k: u32) -> Result<(), SmtError> {
        let from = self.declared.map_or(0, |d| d + 1);
        for i in from..=k {
            for (name, ty) in &self.ts.state_vars {
                self.session.declare(&symbol(name, Step::At(i)), *ty)?;
            }
            self.declared = Some(i);
        }
        Ok(())
    }

    /// Asserts `T(s_i, s_{i+1})` for every `i < k`.
    pub fn unroll_to(&mut self, k: u32) -> Result<(), SmtError> {
        self.declare_upto(k)?;
        let t = self.ts.trans();
        while self.unrolled < k {
            self.session.assert(&t.at(self.unrolled))?;
            self.unrolled += 1;
        }
        Ok(())
    }

    pub fn trace(&self, model: &Model, upto: u32) -> Vec<BTreeMap<String, Value>> {
        extract_trace(self.ts, model, upto)
    }
}

pub(crate) fn extract_trace(ts: &TransitionSystem, model: &Model, upto: u32) -> Vec<BTreeMap<String, Value>> {
    (0..=upto)
        .map(|i| {
            ts.state_vars
                .iter()
                .map(|(n, _)| (n.clone(), model.get(&symbol(n, Step::At(i))).cloned().unwrap_or(Value::Nil)))
                .collect()
        })
        .collect()
}

/// Shortest counterexample with violating state at index at most `max_k`.
pub fn bmc(
    cfg: &SessionConfig,
    ts: &TransitionSystem,
    prop: &str,
    max_k: u32,
) -> Result<Option<Counterexample>, EngineError> {
    if max_k == 0 {
        return Err(EngineError::InvalidK);
    }
    let p = ts.property(prop)?.clone();
    let mut u = Unroller::open(cfg, ts, None)?;
    u.declare_upto(0)?;
    u.session.assert(&ts.init.at(0))?;
    for j in 0..=max_k {
        u.unroll_to(j)?;
        match u.session.check_sat(&[], &Formula::not(p.at(j)))? {
            SatResult::Sat(m) => {
                return Ok(Some(Counterexample { property: prop.to_owned(), length: j, trace: u.trace(&m, j) }));
            }
            SatResult::Unsat => u.session.assert(&p.at(j))?,
            SatResult::Unknown(r) => return Err(EngineError::Inconclusive(format!("depth {j}: {r}"))),
        }
    }
    Ok(None)
}

/// Interleaves BMC and k-induction for `k = 1..=max_k`, assuming the
/// generated invariants on every step.
pub fn prove(cfg: &ProverConfig, ts: &TransitionSystem, prop: &str) -> Result<ProveOutcome, EngineError> {
    match prove_inner(cfg, ts, prop) {
        Err(EngineError::Inconclusive(r)) => Ok(ProveOutcome::Unknown(r)),
        other => other,
    }
}

fn prove_inner(cfg: &ProverConfig, ts: &TransitionSystem, prop: &str) -> Result<ProveOutcome, EngineError> {
    let start = Instant::now();
    let deadline = cfg.budget.map(|b| start + b);
    let p = ts.property(prop)?.clone();
    let invariants = if cfg.invariants || !cfg.seeds.is_empty() {
        let cands = if cfg.invariants { candidate_invariants(ts, &cfg.seeds) } else { invariants::named(&cfg.seeds) };
        invariants::houdini(&cfg.session, ts, cands, deadline)?
    } else {
        Vec::new()
    };
    let q = Formula::and(invariants.iter().map(|(_, f)| f.clone()));
    let pq = Formula::and([p.clone(), q.clone()]);

    let mut u = Unroller::open(&cfg.session, ts, deadline)?;
    u.declare_upto(0)?;
    let init_lit = u.session.new_actlit("I(s0)")?;
    u.session.assert_guarded(&init_lit, &ts.init.at(0))?;
    let base = [init_lit];
    let mut k = 1;
    loop {
        u.unroll_to(k)?;
        u.session.assert(&q.at(k - 1))?;
        match u.session.check_sat(&base, &Formula::not(p.at(k - 1)))? {
            SatResult::Sat(m) => {
                let trace = u.trace(&m, k - 1);
                return Ok(ProveOutcome::Falsified(Counterexample { property: prop.into(), length: k - 1, trace }));
            }
            SatResult::Unknown(r) => return Ok(ProveOutcome::Unknown(r)),
            SatResult::Unsat => {}
        }
        if k > cfg.max_k {
            return Ok(ProveOutcome::Unknown(format!("no proof up to k = {}", cfg.max_k)));
        }
        u.session.assert(&p.at(k - 1))?;
        match u.session.check_sat(&[], &Formula::not(pq.at(k)))? {
            SatResult::Unsat => break,
            SatResult::Sat(_) => k += 1,
            SatResult::Unknown(r) => return Ok(ProveOutcome::Unknown(r)),
        }
    }
    drop(u);
    let proof = InductiveProof {
        property: prop.to_owned(),
        k,
        invariants,
        engine: "k-induction".into(),
        time: start.elapsed(),
    };
    if cfg.validate {
        validate_proof(&cfg.session, ts, &proof, deadline)?;
    }
    Ok(ProveOutcome::Proved(InductiveProof { time: start.elapsed(), ..proof }))
}

/// Checks `FullQuery_k(I, T, P ∧ Q)` in a fresh session.
pub fn validate_proof(
    cfg: &SessionConfig,
    ts: &TransitionSystem,
    proof: &InductiveProof,
    deadline: Option<Instant>,
) -> Result<(), EngineError> {
    let pq = proof.strengthened(ts)?;
    let mut u = Unroller::open(cfg, ts, deadline)?;
    u.declare_upto(proof.k)?;
    let q = full_query(ts, &pq, proof.k)?;
    match u.session.check_sat(&[], &Formula::not(q))? {
        SatResult::Unsat => Ok(()),
        SatResult::Sat(_) => Err(EngineError::InvalidProof(format!(
            "{} with {} invariants is not {}-inductive",
            proof.property,
            proof.invariants.len(),
            proof.k
        ))),
        SatResult::Unknown(r) => Err(EngineError::Inconclusive(r)),
    }
}

//! Inductive validity cores: brute force, UNSAT-core based, and the hybrid
//! of the two, plus validity and minimality checks.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

mod uc;

pub use uc::{minimize_ivc, minimize_k, reduce_invariants, GuardedInvariants};

use crate::engine::{prove, Counterexample, EngineError, InductiveProof, ProveOutcome, ProverConfig};
use crate::ts::{Formula, Step, TransitionSystem, TsError, INIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bf,
    Uc,
    Ucbf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Uc, Algorithm::Ucbf, Algorithm::Bf];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bf => "bf",
            Algorithm::Uc => "uc",
            Algorithm::Ucbf => "ucbf",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(Algorithm::Bf),
            "uc" => Ok(Algorithm::Uc),
            "ucbf" => Ok(Algorithm::Ucbf),
            other => Err(format!("unknown algorithm `{other}` (expected uc, bf or ucbf)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IvcConfig {
    pub prover: ProverConfig,
    /// Parallel prover runs during the brute-force pass.
    pub jobs: usize,
}

impl IvcConfig {
    pub fn new(prover: ProverConfig) -> Self {
        IvcConfig { prover, jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IvcResult {
    pub property: String,
    /// Candidate conjunct names, in source order.
    pub core: Vec<String>,
    pub algorithm: Algorithm,
    /// Certified minimal (up to prover power).
    pub minimal: bool,
    pub k: u32,
    pub invariants: Vec<String>,
    /// Equations excluded from candidacy by annotation that feed the
    /// property; they belong to every core.
    pub fixed: Vec<String>,
    pub proof_ms: f64,
    pub ivc_ms: f64,
    pub solver: String,
}

#[derive(Debug, thiserror::Error)]
pub enum IvcError {
    #[error("property is not proved: {0}")]
    NotProved(String),
    #[error("{stage} failed: {source}")]
    Stage { stage: &'static str, source: EngineError },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ts(#[from] TsError),
    #[error("core {core:?} failed its validity re-check: {reason}")]
    Recheck { core: Vec<String>, reason: String },
}

/// The result of proving a property and, when it holds, extracting a core.
#[derive(Debug, Clone, PartialEq)]
pub enum IvcOutcome {
    Core { ivc: IvcResult, proof: InductiveProof },
    Falsified(Counterexample),
    Unknown(String),
}

/// A prover-backed answer; `Indeterminate` when the prover gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

/// Milliseconds, to the microsecond.
pub fn millis(d: Duration) -> f64 {
    d.as_micros() as f64 / 1000.0
}

fn stage(name: &'static str) -> impl Fn(EngineError) -> IvcError {
    move |source| IvcError::Stage { stage: name, source }
}

/// Whether `ts` restricted to `core` plus all non-candidates proves `prop`.
pub fn check_ivc<S: AsRef<str>>(
    cfg: &ProverConfig,
    ts: &TransitionSystem,
    prop: &str,
    core: &[S],
) -> Result<Verdict, IvcError> {
    let restricted = ts.restrict_to_core(core)?;
    Ok(match prove(cfg, &restricted, prop)? {
        ProveOutcome::Proved(_) => Verdict::Yes,
        ProveOutcome::Falsified(_) => Verdict::No,
        ProveOutcome::Unknown(_) => Verdict::Indeterminate,
    })
}

/// Valid, and no single element can be removed.
pub fn is_minimal<S: AsRef<str>>(
    cfg: &ProverConfig,
    ts: &TransitionSystem,
    prop: &str,
    core: &[S],
) -> Result<Verdict, IvcError> {
    let core: Vec<&str> = core.iter().map(|s| s.as_ref()).collect();
    match check_ivc(cfg, ts, prop, &core)? {
        Verdict::Yes => {}
        other => return Ok(if other == Verdict::No { Verdict::No } else { Verdict::Indeterminate }),
    }
    let mut verdict = Verdict::Yes;
    for i in 0..core.len() {
        let mut sub = core.clone();
        sub.remove(i);
        match check_ivc(cfg, ts, prop, &sub)? {
            Verdict::Yes => return Ok(Verdict::No),
            Verdict::No => {}
            Verdict::Indeterminate => verdict = Verdict::Indeterminate,
        }
    }
    Ok(verdict)
}

/// Proves `prop`, then runs `algorithm` when it holds.
pub fn run(cfg: &IvcConfig, ts: &TransitionSystem, prop: &str, algorithm: Algorithm) -> Result<IvcOutcome, IvcError> {
    let proof = match prove(&cfg.prover, ts, prop)? {
        ProveOutcome::Proved(p) => p,
        ProveOutcome::Falsified(c) => return Ok(IvcOutcome::Falsified(c)),
        ProveOutcome::Unknown(r) => return Ok(IvcOutcome::Unknown(r)),
    };
    let ivc = match algorithm {
        Algorithm::Uc => ivc_uc(cfg, ts, &proof)?,
        Algorithm::Bf => ivc_bf(cfg, ts, &proof)?,
        Algorithm::Ucbf => ivc_ucbf(cfg, ts, &proof)?,
    };
    Ok(IvcOutcome::Core { ivc, proof })
}

fn source_order(ts: &TransitionSystem, names: &BTreeSet<String>) -> Vec<String> {
    ts.conjuncts.iter().filter(|c| c.candidate && names.contains(&c.name)).map(|c| c.name.clone()).collect()
}

fn fixed_members(ts: &TransitionSystem, prop: &str) -> Result<Vec<String>, TsError> {
    let cone = ts.cone_of_influence(ts.property(prop)?);
    Ok(ts.annotated_fixed.iter().filter(|v| cone.contains(*v)).cloned().collect())
}

/// `φ` from `init ∨ φ`.
fn unguard(f: &Formula) -> Formula {
    match f {
        Formula::Or(xs) => {
            Formula::or(xs.iter().filter(|x| !matches!(x, Formula::Var(n, Step::Cur) if n.as_ref() == INIT)).cloned())
        }
        other => other.clone(),
    }
}

fn seeds_of(invariants: &[(String, Formula)]) -> Vec<Formula> {
    invariants.iter().map(|(_, f)| unguard(f)).collect()
}

/// MinimizeK, ReduceInvariants and MinimizeIvc over a proof of `P` with `Q`,
/// followed by a re-proof of the restricted system.
pub fn ivc_uc(cfg: &IvcConfig, ts: &TransitionSystem, proof: &InductiveProof) -> Result<IvcResult, IvcError> {
    let start = Instant::now();
    let scfg = &cfg.prover.session;
    let p = ts.property(&proof.property)?.clone();
    let p_all = proof.strengthened(ts)?;
    let k = minimize_k(scfg, ts, &p_all, proof.k).map_err(stage("MinimizeK"))?;
    let r =
        reduce_invariants(scfg, ts, &proof.invariants, (&proof.property, &p), k).map_err(stage("ReduceInvariants"))?;
    let rf = Formula::and(r.iter().map(|(_, f)| f.clone()));
    let core = minimize_ivc(scfg, ts, &rf, k).map_err(stage("MinimizeIvc"))?;

    let mut pc = cfg.prover.clone();
    pc.seeds.extend(seeds_of(&r[1..]));
    let restricted = ts.restrict_to_core(&core)?;
    match prove(&pc, &restricted, &proof.property).map_err(stage("re-check"))? {
        ProveOutcome::Proved(_) => {}
        ProveOutcome::Falsified(c) => {
            return Err(IvcError::Recheck { core, reason: format!("counterexample of length {}", c.length) })
        }
        ProveOutcome::Unknown(why) => return Err(IvcError::Recheck { core, reason: why }),
    }
    Ok(IvcResult {
        property: proof.property.clone(),
        core,
        algorithm: Algorithm::Uc,
        minimal: false,
        k,
        invariants: r[1..].iter().map(|(n, _)| n.clone()).collect(),
        fixed: fixed_members(ts, &proof.property)?,
        proof_ms: millis(proof.time),
        ivc_ms: millis(start.elapsed()),
        solver: scfg.solver.name.clone(),
    })
}

/// Brute force over all candidates in source order.
pub fn ivc_bf(cfg: &IvcConfig, ts: &TransitionSystem, proof: &InductiveProof) -> Result<IvcResult, IvcError> {
    let start = Instant::now();
    let (core, minimal) = bf_pass(cfg, ts, &proof.property, ts.candidates(), seeds_of(&proof.invariants))?;
    Ok(IvcResult {
        property: proof.property.clone(),
        core,
        algorithm: Algorithm::Bf,
        minimal,
        k: proof.k,
        invariants: proof.invariant_names(),
        fixed: fixed_members(ts, &proof.property)?,
        proof_ms: millis(proof.time),
        ivc_ms: millis(start.elapsed()),
        solver: cfg.prover.session.solver.name.clone(),
    })
}

/// IVC_UC followed by the brute-force pass over its core.
pub fn ivc_ucbf(cfg: &IvcConfig, ts: &TransitionSystem, proof: &InductiveProof) -> Result<IvcResult, IvcError> {
    let start = Instant::now();
    let uc = ivc_uc(cfg, ts, proof)?;
    let mut seeds = seeds_of(&proof.invariants);
    seeds.dedup();
    let (core, minimal) = bf_pass(cfg, ts, &proof.property, uc.core.clone(), seeds)?;
    Ok(IvcResult { core, algorithm: Algorithm::Ucbf, minimal, ivc_ms: millis(start.elapsed()), ..uc })
}

/// Tries to drop each element of `start` in order, keeping it when the
/// property cannot be proved without it. Returns the core and whether every
/// kept element was confirmed necessary.
///
/// With `jobs > 1` the next `jobs` elements are checked in parallel against
/// the current set. Results are consumed in order up to the first drop; the
/// rest are re-checked against the smaller set, so the outcome matches the
/// sequential loop.
fn bf_pass(
    cfg: &IvcConfig,
    ts: &TransitionSystem,
    prop: &str,
    start: Vec<String>,
    mut seeds: Vec<Formula>,
) -> Result<(Vec<String>, bool), IvcError> {
    let mut set: Vec<String> = start;
    let mut minimal = true;
    let mut i = 0;
    let jobs = cfg.jobs.max(1);
    while i < set.len() {
        let batch: Vec<usize> = (i..set.len().min(i + jobs)).collect();
        let mut pc = cfg.prover.clone();
        pc.seeds = seeds.clone();
        let outcomes: Vec<Result<ProveOutcome, IvcError>> = if batch.len() == 1 {
            vec![try_without(&pc, ts, prop, &set, batch[0])]
        } else {
            let (pc, set) = (&pc, &set);
            std::thread::scope(|s| {
                let handles: Vec<_> =
                    batch.iter().map(|&j| s.spawn(move || try_without(pc, ts, prop, set, j))).collect();
                handles.into_iter().map(|h| h.join().expect("prover thread panicked")).collect()
            })
        };
        let mut dropped = false;
        for (&j, outcome) in batch.iter().zip(outcomes) {
            match outcome? {
                ProveOutcome::Proved(p) => {
                    log::debug!("dropping {}", set[j]);
                    for f in seeds_of(&p.invariants) {
                        if !seeds.contains(&f) {
                            seeds.push(f);
                        }
                    }
                    set.remove(j);
                    i = j;
                    dropped = true;
                    break;
                }
                ProveOutcome::Falsified(_) => {}
                ProveOutcome::Unknown(why) => {
                    log::info!("keeping {} after inconclusive check: {why}", set[j]);
                    minimal = false;
                }
            }
        }
        if !dropped {
            i = batch.last().map_or(i, |&j| j + 1);
        }
    }
    let names: BTreeSet<String> = set.into_iter().collect();
    Ok((source_order(ts, &names), minimal))
}

fn try_without(
    pc: &ProverConfig,
    ts: &TransitionSystem,
    prop: &str,
    set: &[String],
    skip: usize,
) -> Result<ProveOutcome, IvcError> {
    let keep: Vec<&str> = set.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, s)| s.as_str()).collect();
    let restricted = ts.restrict_to_core(&keep)?;
    Ok(prove(pc, &restricted, prop)?)
}

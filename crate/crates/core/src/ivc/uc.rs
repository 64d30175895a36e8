//! The UNSAT-core pipeline: MinimizeK, ReduceInvariants and MinimizeIvc.

use crate::engine::{full_query_with, EngineError, Unroller};
use crate::smt::{ActivationLiteral, SatResult, SessionConfig};
use crate::ts::{Formula, TransitionSystem, TRUE};

/// Invariants `Q_i` each switched on by its own literal `a_i`, i.e. the
/// conjunction `(a_1 ⇒ Q_1) ∧ … ∧ (a_n ⇒ Q_n)`.
#[derive(Debug, Clone)]
pub struct GuardedInvariants {
    pub entries: Vec<(ActivationLiteral, String, Formula)>,
}

impl GuardedInvariants {
    pub fn literals(&self) -> Vec<ActivationLiteral> {
        self.entries.iter().map(|(l, _, _)| l.clone()).collect()
    }

    pub fn get(&self, lit: &ActivationLiteral) -> Option<(&str, &Formula)> {
        self.entries.iter().find(|(l, _, _)| l.name == lit.name).map(|(_, n, f)| (n.as_str(), f))
    }
}

/// The least `k' ≤ k` at which `p_all` is k'-inductive, checking only the
/// inductive query.
pub fn minimize_k(cfg: &SessionConfig, ts: &TransitionSystem, p_all: &Formula, k: u32) -> Result<u32, EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidK);
    }
    let mut u = Unroller::open(cfg, ts, None)?;
    for kk in 1..k {
        u.unroll_to(kk)?;
        u.session.assert(&p_all.at(kk - 1))?;
        match u.session.check_sat(&[], &Formula::not(p_all.at(kk)))? {
            SatResult::Unsat => return Ok(kk),
            SatResult::Sat(_) => {}
            SatResult::Unknown(r) => return Err(EngineError::Inconclusive(r)),
        }
    }
    Ok(k)
}

/// Starting from `R = {P}`, repeatedly asks which guarded invariants the
/// inductive step of `R` needs and moves them into `R`, until none are
/// needed. Returns `R` with `P` first, as `(name, formula)` pairs.
///
/// Each step assumes both `R` and the still-guarded invariants on steps
/// `0..k-1`, and the needed set is a deletion-minimized core taken over all
/// guarded invariants in their given order.
pub fn reduce_invariants(
    cfg: &SessionConfig,
    ts: &TransitionSystem,
    q: &[(String, Formula)],
    p: (&str, &Formula),
    k: u32,
) -> Result<Vec<(String, Formula)>, EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidK);
    }
    let mut r: Vec<(String, Formula)> = vec![(p.0.to_owned(), p.1.clone())];
    if q.is_empty() {
        return Ok(r);
    }
    let mut u = Unroller::open(cfg, ts, None)?;
    u.unroll_to(k)?;
    let mut guarded = GuardedInvariants { entries: Vec::new() };
    for (name, f) in q {
        let lit = u.session.new_actlit(name.clone())?;
        let on_steps = Formula::and((0..k).map(|i| f.at(i)));
        u.session.assert_guarded(&lit, &on_steps)?;
        guarded.entries.push((lit, name.clone(), f.clone()));
    }
    loop {
        let rf = Formula::and(r.iter().map(|(_, f)| f.clone()));
        let hyp = Formula::and((0..k).map(|i| rf.at(i)));
        let goal = Formula::and([hyp, Formula::not(rf.at(k))]);
        let lits = guarded.literals();
        match u.session.check_sat(&lits, &goal)? {
            SatResult::Unsat => {}
            SatResult::Sat(_) => {
                return Err(EngineError::InvalidProof("invariants are not k-inductive together".into()))
            }
            SatResult::Unknown(why) => return Err(EngineError::Inconclusive(why)),
        }
        let core = u.session.minimize_core(&lits, &goal)?;
        if core.is_empty() {
            return Ok(r);
        }
        for lit in &core {
            if let Some((n, f)) = guarded.get(lit) {
                r.push((n.to_owned(), f.clone()));
            }
        }
        guarded.entries.retain(|(l, _, _)| !core.iter().any(|c| c.name == l.name));
    }
}

/// Guards every candidate conjunct with a literal and returns the names of
/// a minimized core of `¬FullQuery_k(I, T, R)`. Non-candidate conjuncts are
/// asserted unguarded.
pub fn minimize_ivc(
    cfg: &SessionConfig,
    ts: &TransitionSystem,
    r: &Formula,
    k: u32,
) -> Result<Vec<String>, EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidK);
    }
    let mut u = Unroller::open(cfg, ts, None)?;
    u.declare_upto(k)?;
    let mut lits = Vec::new();
    for c in &ts.conjuncts {
        let on_steps = Formula::and((0..k).map(|i| c.formula.at(i)));
        if c.candidate {
            let lit = u.session.new_actlit(c.name.clone())?;
            u.session.assert_guarded(&lit, &on_steps)?;
            lits.push((lit, c.name.clone()));
        } else {
            u.session.assert(&on_steps)?;
        }
    }
    let query = Formula::not(full_query_with(&ts.init, &|_| TRUE, r, k));
    let all: Vec<ActivationLiteral> = lits.iter().map(|(l, _)| l.clone()).collect();
    let core = match u.session.check_sat(&all, &query)? {
        SatResult::Unsat => {
            let solver_core = u.session.unsat_core()?;
            let ordered: Vec<ActivationLiteral> =
                all.iter().filter(|l| solver_core.iter().any(|c| c.name == l.name)).cloned().collect();
            u.session.minimize_core(&ordered, &query)?
        }
        SatResult::Sat(_) => {
            return Err(EngineError::InvalidProof(format!("R is not {k}-inductive for the full system")));
        }
        SatResult::Unknown(why) => return Err(EngineError::Inconclusive(why)),
    };
    Ok(lits.into_iter().filter(|(l, _)| core.iter().any(|c| c.name == l.name)).map(|(_, n)| n).collect())
}

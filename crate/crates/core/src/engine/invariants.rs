//! Invariant candidates and the Houdini fixpoint that filters them.
//!
//! Candidates are state predicates `φ`, always used in the guarded form
//! `init ∨ φ` so that the pre-initial state satisfies them trivially:
//!
//! - every Boolean state variable and its negation;
//! - `v ≥ 0` and `v ≤ 0` for every numeric state variable;
//! - every Boolean proper subterm of a transition conjunct that only reads
//!   the target state, unprimed, and its negation;
//! - the four sign combinations of `a ∨ b` for pairs of Boolean variables,
//!   when there are at most ten of them;
//! - caller-supplied seeds.
//!
//! Houdini keeps the largest subset that is 1-inductive relative to itself.

use std::collections::BTreeSet;
use std::time::Instant;

use num_rational::BigRational;

use super::{EngineError, Unroller};
use crate::lustre::Type;
use crate::smt::{SatResult, SessionConfig};
use crate::ts::{symbol, Cmp, Formula, Step, TransitionSystem, INIT};
use crate::value::Value;

const MAX_PAIRWISE_VARS: usize = 10;

/// `init ∨ φ`.
pub fn guard(phi: &Formula) -> Formula {
    Formula::or([Formula::var(INIT, Step::Cur), phi.clone()])
}

pub(crate) fn named(phis: &[Formula]) -> Vec<(String, Formula)> {
    let mut seen = BTreeSet::new();
    phis.iter()
        .filter(|f| !matches!(f, Formula::Bool(_)))
        .filter(|f| seen.insert(f.to_smt()))
        .map(|f| (f.to_smt(), guard(f)))
        .collect()
}

/// All candidate invariants in a fixed order, as `(name, init ∨ φ)`.
pub fn candidate_invariants(ts: &TransitionSystem, seeds: &[Formula]) -> Vec<(String, Formula)> {
    let mut phis = Vec::new();
    let bools: Vec<&str> =
        ts.state_vars.iter().filter(|(n, t)| *t == Type::Bool && n != INIT).map(|(n, _)| n.as_str()).collect();
    for (name, ty) in &ts.state_vars {
        let v = Formula::var(name, Step::Cur);
        match ty {
            Type::Bool if name != INIT => {
                phis.push(v.clone());
                phis.push(Formula::not(v));
            }
            Type::Bool => {}
            Type::Int | Type::Real => {
                let zero =
                    if *ty == Type::Int { Formula::int(0) } else { Formula::Real(BigRational::from_integer(0.into())) };
                phis.push(Formula::cmp(Cmp::Ge, v.clone(), zero.clone()));
                phis.push(Formula::cmp(Cmp::Le, v, zero));
            }
        }
    }
    for c in &ts.conjuncts {
        let mut subterms = Vec::new();
        for child in c.formula.children() {
            collect_bool_subterms(child, ts, &mut subterms);
        }
        for t in subterms {
            if t.mentions_step(Step::Cur) || t.var_names().iter().any(|n| n.as_ref() == INIT) || t.vars().is_empty() {
                continue;
            }
            if matches!(t, Formula::Var(..)) {
                continue;
            }
            let u = t.unprime();
            phis.push(u.clone());
            phis.push(Formula::not(u));
        }
    }
    if bools.len() <= MAX_PAIRWISE_VARS {
        for (i, a) in bools.iter().enumerate() {
            for b in &bools[i + 1..] {
                let (a, b) = (Formula::var(a, Step::Cur), Formula::var(b, Step::Cur));
                for (x, y) in [
                    (a.clone(), b.clone()),
                    (a.clone(), Formula::not(b.clone())),
                    (Formula::not(a.clone()), b.clone()),
                    (Formula::not(a.clone()), Formula::not(b.clone())),
                ] {
                    phis.push(Formula::or([x, y]));
                }
            }
        }
    }
    phis.extend(seeds.iter().cloned());
    named(&phis)
}

fn collect_bool_subterms<'f>(f: &'f Formula, ts: &TransitionSystem, out: &mut Vec<&'f Formula>) {
    if is_bool(f, ts) {
        out.push(f);
    }
    for c in f.children() {
        collect_bool_subterms(c, ts, out);
    }
}

fn is_bool(f: &Formula, ts: &TransitionSystem) -> bool {
    match f {
        Formula::Bool(_) | Formula::Not(_) | Formula::And(_) | Formula::Or(_) | Formula::Implies(..) => true,
        Formula::Eq(..) | Formula::Cmp(..) | Formula::Lit(_) => true,
        Formula::Var(n, _) => ts.var_type(n) == Some(Type::Bool),
        Formula::Ite(_, t, _) => is_bool(t, ts),
        _ => false,
    }
}

/// Houdini over `candidate_invariants(ts, seeds)`: the surviving
/// `(name, init ∨ φ)` pairs are jointly 1-inductive, hence invariant.
pub fn generate_invariants(
    cfg: &SessionConfig,
    ts: &TransitionSystem,
    seeds: &[Formula],
) -> Result<Vec<(String, Formula)>, EngineError> {
    houdini(cfg, ts, candidate_invariants(ts, seeds), None)
}

pub(crate) fn houdini(
    cfg: &SessionConfig,
    ts: &TransitionSystem,
    candidates: Vec<(String, Formula)>,
    deadline: Option<Instant>,
) -> Result<Vec<(String, Formula)>, EngineError> {
    if candidates.is_empty() {
        return Ok(candidates);
    }
    let mut u = Unroller::open(cfg, ts, deadline)?;
    u.unroll_to(1)?;
    let mut lits = Vec::with_capacity(candidates.len());
    for (name, f) in &candidates {
        let l = u.session.new_actlit(name.clone())?;
        u.session.assert_guarded(&l, &f.at(0))?;
        lits.push(l);
    }
    let mut alive: Vec<usize> = (0..candidates.len()).collect();
    while !alive.is_empty() {
        let assumed: Vec<_> = alive.iter().map(|&i| lits[i].clone()).collect();
        let goal = Formula::not(Formula::and(alive.iter().map(|&i| candidates[i].1.at(1))));
        match u.session.check_sat(&assumed, &goal)? {
            SatResult::Unsat => break,
            SatResult::Unknown(r) => return Err(EngineError::Inconclusive(r)),
            SatResult::Sat(m) => {
                let env = |n: &str, s: Step| m.get(&symbol(n, s)).cloned();
                let before = alive.len();
                alive.retain(|&i| candidates[i].1.at(1).eval(&env) == Value::Bool(true));
                if alive.len() == before {
                    // The model does not refute anything we can evaluate
                    // (e.g. division by zero); give up on the remaining set.
                    alive.clear();
                }
            }
        }
    }
    Ok(alive.into_iter().map(|i| candidates[i].clone()).collect())
}

//! The k-induction queries as validity formulas over unrolled steps
//! `s_0 .. s_k`. A query holds iff its negation is unsatisfiable.

use super::EngineError;
use crate::ts::{Formula, TransitionSystem};

/// `T(s_i, s_{i+1})` for the whole relation.
pub fn trans_at(ts: &TransitionSystem, i: u32) -> Formula {
    ts.trans().at(i)
}

fn chain(trans: &dyn Fn(u32) -> Formula, upto: u32) -> Formula {
    Formula::and((0..upto).map(trans))
}

/// `BaseQuery_k`: for each `j < k`, `I(s_0) ∧ T(s_0,s_1) ∧ … ∧ T(s_{j-1},s_j) ⇒ P(s_j)`.
pub(crate) fn base_query_with(init: &Formula, trans: &dyn Fn(u32) -> Formula, p: &Formula, k: u32) -> Formula {
    debug_assert!(k >= 1);
    Formula::and((0..k).map(|j| Formula::implies(Formula::and([init.at(0), chain(trans, j)]), p.at(j))))
}

/// `IndQuery_k(T, Q, P)`: `Q(s_0) ∧ T(s_0,s_1) ∧ … ∧ Q(s_{k-1}) ∧ T(s_{k-1},s_k) ⇒ P(s_k)`.
pub(crate) fn ind_query_with(trans: &dyn Fn(u32) -> Formula, q: &Formula, p: &Formula, k: u32) -> Formula {
    debug_assert!(k >= 1);
    let hyp = Formula::and((0..k).flat_map(|i| [q.at(i), trans(i)]));
    Formula::implies(hyp, p.at(k))
}

/// `FullQuery_k = BaseQuery_k(I, T, P) ∧ IndQuery_k(T, P, P)`.
pub(crate) fn full_query_with(init: &Formula, trans: &dyn Fn(u32) -> Formula, p: &Formula, k: u32) -> Formula {
    Formula::and([base_query_with(init, trans, p, k), ind_query_with(trans, p, p, k)])
}

fn check_k(k: u32) -> Result<(), EngineError> {
    if k == 0 {
        Err(EngineError::InvalidK)
    } else {
        Ok(())
    }
}

pub fn base_query(ts: &TransitionSystem, p: &Formula, k: u32) -> Result<Formula, EngineError> {
    check_k(k)?;
    let t = ts.trans();
    Ok(base_query_with(&ts.init, &|i| t.at(i), p, k))
}

pub fn ind_query(ts: &TransitionSystem, q: &Formula, p: &Formula, k: u32) -> Result<Formula, EngineError> {
    check_k(k)?;
    let t = ts.trans();
    Ok(ind_query_with(&|i| t.at(i), q, p, k))
}

pub fn full_query(ts: &TransitionSystem, p: &Formula, k: u32) -> Result<Formula, EngineError> {
    check_k(k)?;
    let t = ts.trans();
    Ok(full_query_with(&ts.init, &|i| t.at(i), p, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lustre::{normalize, parse};
    use crate::ts::lower;

    fn counter() -> TransitionSystem {
        let p = parse("node m() returns (c: int; ok: bool); let c = 0 -> pre c + 1; ok = c >= 0; --%PROPERTY ok; tel;")
            .unwrap();
        lower(&normalize(&p).unwrap()).unwrap()
    }

    #[test]
    fn shapes() {
        let ts = counter();
        let p = ts.property("ok").unwrap().clone();
        assert_eq!(base_query(&ts, &p, 1).unwrap().to_smt(), "(=> %init@0 (or %init@0 ok@0))");
        let ind = ind_query(&ts, &p, &p, 1).unwrap().to_smt();
        assert!(ind.starts_with("(=> (and (or %init@0 ok@0) (= c@1"), "{ind}");
        assert!(ind.ends_with("(or %init@1 ok@1))"), "{ind}");
        let b2 = base_query(&ts, &p, 2).unwrap();
        match b2 {
            Formula::And(parts) => assert_eq!(parts.len(), 2),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn k_zero_rejected() {
        let ts = counter();
        let p = ts.property("ok").unwrap().clone();
        assert!(matches!(base_query(&ts, &p, 0), Err(EngineError::InvalidK)));
        assert!(matches!(full_query(&ts, &p, 0), Err(EngineError::InvalidK)));
    }
}

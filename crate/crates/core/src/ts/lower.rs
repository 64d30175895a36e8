use std::collections::BTreeSet;

use super::{Cmp, Conjunct, Formula, Step, TransitionSystem, TsError, INIT};
use crate::lustre::{is_normalized, BinOp, Expr, Program, UnOp};

/// Encodes a normalized program: `I = init`, one conjunct `v' = enc(rhs)` per
/// equation, a final `¬init'` conjunct, and each property `p` as `init ∨ p`.
///
/// `e1 -> e2` becomes `ite(init, e1, e2)` and `pre w` reads the unprimed `w`,
/// so the pre-initial state (where `init` holds) leaves every other variable
/// unconstrained.
pub fn lower(p: &Program) -> Result<TransitionSystem, TsError> {
    if !is_normalized(p) {
        return Err(TsError::NotNormalized("expected a single call-free node with `pre` on variables only".into()));
    }
    let node = p.main_node();
    let mut state_vars = vec![(INIT.to_owned(), crate::lustre::Type::Bool)];
    state_vars.extend(node.decls().map(|d| (d.name.clone(), d.ty)));

    let props: BTreeSet<&str> = node.properties.iter().map(String::as_str).collect();
    let mut conjuncts = Vec::with_capacity(node.equations.len() + 1);
    for eq in &node.equations {
        let rhs = encode(&eq.rhs)?;
        let candidate = node.ivc_candidates.contains(&eq.target)
            && !node.generated.contains(&eq.target)
            && !props.contains(eq.target.as_str());
        conjuncts.push(Conjunct {
            name: eq.target.clone(),
            formula: Formula::eq(Formula::var(&eq.target, Step::Next), rhs),
            candidate,
        });
    }
    conjuncts.push(Conjunct {
        name: INIT.to_owned(),
        formula: Formula::not(Formula::var(INIT, Step::Next)),
        candidate: false,
    });

    let init = Formula::var(INIT, Step::Cur);
    let properties =
        node.properties.iter().map(|p| (p.clone(), Formula::or([init.clone(), Formula::var(p, Step::Cur)]))).collect();
    let annotated_fixed = node
        .equations
        .iter()
        .map(|e| &e.target)
        .filter(|t| !node.ivc_candidates.contains(*t) && !node.generated.contains(*t) && !props.contains(t.as_str()))
        .cloned()
        .collect();

    Ok(TransitionSystem { state_vars, init, conjuncts, properties, annotated_fixed })
}

fn encode(e: &Expr) -> Result<Formula, TsError> {
    let b = |x: &Expr| encode(x).map(Box::new);
    Ok(match e {
        Expr::Bool(v) => Formula::Bool(*v),
        Expr::Int(n) => Formula::Int(n.clone()),
        Expr::Real(r) => Formula::Real(r.clone()),
        Expr::Var(v) => Formula::var(v, Step::Next),
        Expr::Unary(UnOp::Pre, inner) => match inner.as_ref() {
            Expr::Var(v) => Formula::var(v, Step::Cur),
            other => return Err(TsError::NotNormalized(format!("pre applied to `{other}`"))),
        },
        Expr::Unary(UnOp::Not, a) => Formula::Not(b(a)?),
        Expr::Unary(UnOp::Neg, a) => Formula::Neg(b(a)?),
        Expr::Ite(c, t, f) => Formula::Ite(b(c)?, b(t)?, b(f)?),
        Expr::Call(n, _) => return Err(TsError::NotNormalized(format!("call to `{n}`"))),
        Expr::Binary(op, l, r) => {
            let (l, r) = (encode(l)?, encode(r)?);
            match op {
                BinOp::Arrow => Formula::ite(Formula::var(super::INIT, Step::Cur), l, r),
                BinOp::Add => Formula::Add(vec![l, r]),
                BinOp::Sub => Formula::Sub(Box::new(l), Box::new(r)),
                BinOp::Mul => Formula::Mul(Box::new(l), Box::new(r)),
                BinOp::Div => Formula::Div(Box::new(l), Box::new(r)),
                BinOp::Mod => Formula::Mod(Box::new(l), Box::new(r)),
                BinOp::Lt => Formula::cmp(Cmp::Lt, l, r),
                BinOp::Le => Formula::cmp(Cmp::Le, l, r),
                BinOp::Gt => Formula::cmp(Cmp::Gt, l, r),
                BinOp::Ge => Formula::cmp(Cmp::Ge, l, r),
                BinOp::Eq => Formula::eq(l, r),
                BinOp::Ne => Formula::Not(Box::new(Formula::eq(l, r))),
                BinOp::And => Formula::And(vec![l, r]),
                BinOp::Or => Formula::Or(vec![l, r]),
                BinOp::Implies => Formula::implies(l, r),
            }
        }
    })
}

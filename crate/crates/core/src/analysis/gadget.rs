use crate::lustre::Type;
use crate::ts::{Conjunct, Formula, Step, TransitionSystem, TsError, INIT};

pub const GADGET_LINK: &str = "gadget~link";
pub const GADGET_BASE: &str = "gadget~base";
pub const GADGET_PROPERTY: &str = "gadget~prop";
const X: &str = "gadget~x";
const Y: &str = "gadget~y";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("name `{0}` already occurs in the base system")]
    NotFresh(String),
    #[error("base system must have exactly one property, found {0}")]
    PropertyCount(usize),
    #[error(transparent)]
    Ts(#[from] TsError),
}

/// A two-conjunct wrapper around a base system.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub ts: TransitionSystem,
    pub property: String,
    /// `[link, base]`, the only candidates.
    pub core: [String; 2],
}

/// Wraps `(I, T, P)` into `I ∧ ¬x`, `(x' ⇒ y') ∧ ((y' ⇒ P') ∧ T)` with
/// property `x ⇒ P`, where `x` and `y` are fresh.
///
/// Both conjuncts together always prove the property. The second one alone
/// does exactly when `P` holds in the base system, so the pair is a minimal
/// core exactly when it does not.
pub fn gadget(base: &TransitionSystem) -> Result<Gadget, GadgetError> {
    if base.properties.len() != 1 {
        return Err(GadgetError::PropertyCount(base.properties.len()));
    }
    for name in [X, Y, GADGET_LINK, GADGET_BASE, GADGET_PROPERTY] {
        if base.var_type(name).is_some() || base.conjunct(name).is_some() || base.property(name).is_ok() {
            return Err(GadgetError::NotFresh(name.to_owned()));
        }
    }
    let p = &base.properties[0].1;
    let p_next = p.map_vars(&|n, _| Formula::var(n, Step::Next));
    let x = |s| Formula::var(X, s);
    let y = |s| Formula::var(Y, s);

    let mut state_vars = base.state_vars.clone();
    state_vars.push((X.to_owned(), Type::Bool));
    state_vars.push((Y.to_owned(), Type::Bool));

    let t = base.conjuncts.iter().filter(|c| c.name != INIT).map(|c| c.formula.clone());
    let conjuncts = vec![
        Conjunct {
            name: GADGET_LINK.to_owned(),
            formula: Formula::implies(x(Step::Next), y(Step::Next)),
            candidate: true,
        },
        Conjunct {
            name: GADGET_BASE.to_owned(),
            formula: Formula::and(std::iter::once(Formula::implies(y(Step::Next), p_next)).chain(t)),
            candidate: true,
        },
        Conjunct { name: INIT.to_owned(), formula: Formula::not(Formula::var(INIT, Step::Next)), candidate: false },
    ];
    let ts = TransitionSystem {
        state_vars,
        init: Formula::and([base.init.clone(), Formula::not(x(Step::Cur))]),
        conjuncts,
        properties: vec![(GADGET_PROPERTY.to_owned(), Formula::implies(x(Step::Cur), p.clone()))],
        annotated_fixed: Default::default(),
    };
    Ok(Gadget { ts, property: GADGET_PROPERTY.to_owned(), core: [GADGET_LINK.to_owned(), GADGET_BASE.to_owned()] })
}

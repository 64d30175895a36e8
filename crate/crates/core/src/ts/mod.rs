//! Transition systems `(I, T)` whose `T` is an ordered conjunction of named
//! conjuncts, one per Lustre equation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

mod formula;
mod lower;

pub use formula::{symbol, Cmp, Formula, Step, FALSE, TRUE};
pub use lower::lower;

use crate::lustre::Type;

/// Name of the initial-state flag and of its `¬init'` conjunct.
pub const INIT: &str = "%init";

#[derive(Debug, Clone, PartialEq)]
pub struct Conjunct {
    pub name: String,
    pub formula: Formula,
    /// Whether the conjunct takes part in IVC search. Non-candidates are kept
    /// in every restriction.
    pub candidate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    pub state_vars: Vec<(String, Type)>,
    /// `I`, over `Cur` variables.
    pub init: Formula,
    /// `T_1 .. T_n`, over `Cur` and `Next` variables.
    pub conjuncts: Vec<Conjunct>,
    /// Safety properties over `Cur` variables.
    pub properties: Vec<(String, Formula)>,
    /// User-facing variables whose equations were excluded from candidacy by
    /// annotation; reported alongside cores.
    pub annotated_fixed: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TsError {
    #[error("program is not normalized: {0}")]
    NotNormalized(String),
    #[error("unknown conjunct `{0}`")]
    UnknownConjunct(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
}

impl TransitionSystem {
    pub fn var_type(&self, name: &str) -> Option<Type> {
        self.state_vars.iter().find(|(n, _)| n == name).map(|(_, t)| *t)
    }

    pub fn types(&self) -> BTreeMap<&str, Type> {
        self.state_vars.iter().map(|(n, t)| (n.as_str(), *t)).collect()
    }

    pub fn conjunct(&self, name: &str) -> Option<&Conjunct> {
        self.conjuncts.iter().find(|c| c.name == name)
    }

    /// Candidate conjunct names in order.
    pub fn candidates(&self) -> Vec<String> {
        self.conjuncts.iter().filter(|c| c.candidate).map(|c| c.name.clone()).collect()
    }

    pub fn non_candidates(&self) -> Vec<String> {
        self.conjuncts.iter().filter(|c| !c.candidate).map(|c| c.name.clone()).collect()
    }

    pub fn property(&self, name: &str) -> Result<&Formula, TsError> {
        self.properties
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| TsError::UnknownProperty(name.to_owned()))
    }

    /// The whole transition relation as one formula.
    pub fn trans(&self) -> Formula {
        Formula::and(self.conjuncts.iter().map(|c| c.formula.clone()))
    }

    /// Drops every conjunct outside `keep`; the `¬init'` conjunct always
    /// stays. Variables of removed conjuncts become unconstrained.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<TransitionSystem, TsError> {
        let keep: BTreeSet<&str> = keep.iter().map(|s| s.as_ref()).collect();
        for k in &keep {
            if self.conjunct(k).is_none() {
                return Err(TsError::UnknownConjunct(k.to_string()));
            }
        }
        let mut out = self.clone();
        out.conjuncts.retain(|c| c.name == INIT || keep.contains(c.name.as_str()));
        Ok(out)
    }

    /// Restriction to `core` plus every non-candidate conjunct.
    pub fn restrict_to_core<S: AsRef<str>>(&self, core: &[S]) -> Result<TransitionSystem, TsError> {
        let mut keep: Vec<String> = core.iter().map(|s| s.as_ref().to_owned()).collect();
        keep.extend(self.non_candidates());
        self.restrict(&keep)
    }

    /// Conjuncts transitively feeding `prop`, following variable mentions.
    pub fn cone_of_influence(&self, prop: &Formula) -> BTreeSet<String> {
        let mut defining: BTreeMap<&str, &Conjunct> = self.conjuncts.iter().map(|c| (c.name.as_str(), c)).collect();
        defining.remove(INIT);
        let init = &self.conjuncts.iter().find(|c| c.name == INIT);
        let mut seen = BTreeSet::new();
        let mut work: Vec<String> = prop.var_names().iter().map(|n| n.to_string()).collect();
        let mut visited_vars = BTreeSet::new();
        while let Some(v) = work.pop() {
            if !visited_vars.insert(v.clone()) {
                continue;
            }
            if let Some(c) = defining.get(v.as_str()) {
                if seen.insert(c.name.clone()) {
                    work.extend(c.formula.var_names().iter().map(|n| n.to_string()));
                }
            }
        }
        if let Some(c) = init {
            seen.insert(c.name.clone());
        }
        seen
    }

    /// VMT-style SMT-LIB rendering of `(I, T, P)` for use with other tools.
    pub fn to_vmt(&self) -> String {
        let mut s = String::new();
        s.push_str("; transition system dump: state variables, then I, T conjuncts and properties\n");
        for (name, ty) in &self.state_vars {
            let sort = sort_name(*ty);
            let _ = writeln!(s, "(declare-fun {} () {sort})", symbol(name, Step::Cur));
            let _ = writeln!(s, "(declare-fun {} () {sort})", symbol(name, Step::Next));
            let _ = writeln!(
                s,
                "(define-fun .sv.{name} () {sort} (! {} :next {}))",
                symbol(name, Step::Cur),
                symbol(name, Step::Next)
            );
        }
        let _ = writeln!(s, "(define-fun .init () Bool (! {} :init true))", self.init);
        for c in &self.conjuncts {
            let tag = if c.candidate { "candidate" } else { "fixed" };
            let _ = writeln!(s, "; {tag}\n(define-fun |T.{}| () Bool {})", c.name, c.formula);
        }
        let all: Vec<String> = self.conjuncts.iter().map(|c| format!("|T.{}|", c.name)).collect();
        let _ = writeln!(s, "(define-fun .trans () Bool (! (and true {}) :trans true))", all.join(" "));
        for (i, (name, p)) in self.properties.iter().enumerate() {
            let _ = writeln!(s, "(define-fun |P.{name}| () Bool (! {p} :invar-property {i}))");
        }
        s
    }
}

pub fn sort_name(ty: Type) -> &'static str {
    match ty {
        Type::Bool => "Bool",
        Type::Int => "Int",
        Type::Real => "Real",
    }
}

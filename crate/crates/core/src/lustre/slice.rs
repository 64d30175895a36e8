use std::collections::BTreeSet;

use super::ast::Program;
use super::{Diagnostic, DiagnosticKind};

/// Backward static slice of the main node: the equation targets transitively
/// referenced from `root`, through `pre` and node-call arguments alike.
pub fn slice_backward(p: &Program, root: &str) -> Result<BTreeSet<String>, Diagnostic> {
    slice_backward_many(p, std::iter::once(root))
}

/// Slice from several roots at once (the union of the single-root slices).
pub fn slice_backward_many<'a>(
    p: &Program,
    roots: impl IntoIterator<Item = &'a str>,
) -> Result<BTreeSet<String>, Diagnostic> {
    let node = p.main_node();
    let mut slice = BTreeSet::new();
    let mut work = Vec::new();
    for root in roots {
        if node.equation(root).is_none() {
            return Err(Diagnostic::new(
                DiagnosticKind::UnresolvedIdentifier,
                node.pos,
                format!("slice root `{root}` is not defined by an equation of `{}`", node.name),
            ));
        }
        work.push(root.to_owned());
    }
    while let Some(v) = work.pop() {
        if !slice.insert(v.clone()) {
            continue;
        }
        if let Some(eq) = node.equation(&v) {
            for w in eq.rhs.vars() {
                if node.equation(w).is_some() && !slice.contains(w) {
                    work.push(w.to_owned());
                }
            }
        }
    }
    Ok(slice)
}

//! Flattening to a single call-free node whose `pre` operators apply only to
//! variables.
//!
//! Generated names contain `~`, which the lexer never accepts in identifiers,
//! so they cannot capture user variables. Arrows are left where they occur:
//! the transition-system encoding handles `->` at any depth.

use std::collections::BTreeMap;

use super::ast::*;
use super::check::expr_type;
use super::{Diagnostic, DiagnosticKind};

pub fn normalize(p: &Program) -> Result<Program, Diagnostic> {
    let mut cx = Inliner { program: p, counter: 0, cache: BTreeMap::new() };
    let mut main = cx.flatten(&p.main, &mut Vec::new())?;
    lift_pre(&mut main);
    Ok(Program { nodes: vec![main], main: p.main.clone() })
}

struct Inliner<'a> {
    program: &'a Program,
    counter: usize,
    cache: BTreeMap<String, Node>,
}

impl Inliner<'_> {
    /// Returns `name` with every call inlined.
    fn flatten(&mut self, name: &str, stack: &mut Vec<String>) -> Result<Node, Diagnostic> {
        if let Some(n) = self.cache.get(name) {
            return Ok(n.clone());
        }
        let node = self.program.node(name).ok_or_else(|| {
            Diagnostic::new(DiagnosticKind::UnresolvedIdentifier, Pos::default(), format!("unknown node `{name}`"))
        })?;
        if stack.iter().any(|s| s == name) {
            let mut chain = stack.clone();
            chain.push(name.to_owned());
            return Err(Diagnostic::new(
                DiagnosticKind::Recursion,
                node.pos,
                format!("recursive node calls are not supported: {}", chain.join(" -> ")),
            ));
        }
        stack.push(name.to_owned());

        let mut out = node.clone();
        out.equations.clear();
        for eq in &node.equations {
            let mut extra = Vec::new();
            let rhs = self.inline_expr(&eq.rhs, eq.pos, &mut extra, &mut out, stack)?;
            out.equations.extend(extra);
            out.equations.push(Equation { target: eq.target.clone(), rhs, pos: eq.pos });
        }
        stack.pop();
        self.cache.insert(name.to_owned(), out.clone());
        Ok(out)
    }

    fn inline_expr(
        &mut self,
        e: &Expr,
        pos: Pos,
        extra: &mut Vec<Equation>,
        host: &mut Node,
        stack: &mut Vec<String>,
    ) -> Result<Expr, Diagnostic> {
        Ok(match e {
            Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) | Expr::Var(_) => e.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, self.inline_expr(a, pos, extra, host, stack)?),
            Expr::Binary(op, l, r) => Expr::binary(
                *op,
                self.inline_expr(l, pos, extra, host, stack)?,
                self.inline_expr(r, pos, extra, host, stack)?,
            ),
            Expr::Ite(c, t, f) => Expr::ite(
                self.inline_expr(c, pos, extra, host, stack)?,
                self.inline_expr(t, pos, extra, host, stack)?,
                self.inline_expr(f, pos, extra, host, stack)?,
            ),
            Expr::Call(callee, args) => {
                let args =
                    args.iter().map(|a| self.inline_expr(a, pos, extra, host, stack)).collect::<Result<Vec<_>, _>>()?;
                let body = self.flatten(callee, stack)?;
                let prefix = format!("{callee}~{}~", self.counter);
                self.counter += 1;
                let rename = |v: &str| format!("{prefix}{v}");
                for d in body.decls() {
                    let fresh = rename(&d.name);
                    host.locals.push(Decl { name: fresh.clone(), ty: d.ty });
                    host.generated.insert(fresh);
                }
                for (d, a) in body.inputs.iter().zip(args) {
                    extra.push(Equation { target: rename(&d.name), rhs: a, pos });
                }
                for eq in &body.equations {
                    extra.push(Equation { target: rename(&eq.target), rhs: rename_vars(&eq.rhs, &rename), pos });
                }
                Expr::Var(rename(&body.outputs[0].name))
            }
        })
    }
}

pub(crate) fn rename_vars(e: &Expr, f: &dyn Fn(&str) -> String) -> Expr {
    match e {
        Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) => e.clone(),
        Expr::Var(v) => Expr::Var(f(v)),
        Expr::Unary(op, a) => Expr::unary(*op, rename_vars(a, f)),
        Expr::Binary(op, l, r) => Expr::binary(*op, rename_vars(l, f), rename_vars(r, f)),
        Expr::Ite(c, t, e) => Expr::ite(rename_vars(c, f), rename_vars(t, f), rename_vars(e, f)),
        Expr::Call(n, args) => Expr::Call(n.clone(), args.iter().map(|a| rename_vars(a, f)).collect()),
    }
}

/// Replaces `pre e` with `pre t~k` plus a fresh equation `t~k = e` whenever
/// `e` is not a variable.
fn lift_pre(node: &mut Node) {
    let mut next = (0..).find(|k| !node.decls().any(|d| d.name == format!("t~{k}"))).unwrap_or(0);
    let mut i = 0;
    while i < node.equations.len() {
        let mut fresh = Vec::new();
        let rhs = node.equations[i].rhs.clone();
        let pos = node.equations[i].pos;
        let types: BTreeMap<String, Type> = node.decls().map(|d| (d.name.clone(), d.ty)).collect();
        let new_rhs = lift(&rhs, &mut |inner: Expr| {
            let name = format!("t~{next}");
            next += 1;
            let ty = expr_type(&inner, &|v| types.get(v).copied(), &|_| None);
            fresh.push((name.clone(), ty, inner));
            name
        });
        node.equations[i].rhs = new_rhs;
        for (name, ty, e) in fresh {
            node.locals.push(Decl { name: name.clone(), ty });
            node.generated.insert(name.clone());
            node.equations.push(Equation { target: name, rhs: e, pos });
        }
        i += 1;
    }
}

fn lift(e: &Expr, fresh: &mut dyn FnMut(Expr) -> String) -> Expr {
    match e {
        Expr::Unary(UnOp::Pre, inner) => match inner.as_ref() {
            Expr::Var(_) => e.clone(),
            other => {
                let name = fresh(other.clone());
                Expr::unary(UnOp::Pre, Expr::Var(name))
            }
        },
        Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(op, a) => Expr::unary(*op, lift(a, fresh)),
        Expr::Binary(op, l, r) => Expr::binary(*op, lift(l, fresh), lift(r, fresh)),
        Expr::Ite(c, t, f) => Expr::ite(lift(c, fresh), lift(t, fresh), lift(f, fresh)),
        Expr::Call(n, args) => Expr::Call(n.clone(), args.iter().map(|a| lift(a, fresh)).collect()),
    }
}

/// True when every `pre` applies to a variable and no calls remain.
pub fn is_normalized(p: &Program) -> bool {
    fn ok(e: &Expr) -> bool {
        match e {
            Expr::Unary(UnOp::Pre, inner) => matches!(inner.as_ref(), Expr::Var(_)),
            Expr::Call(..) => false,
            Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) | Expr::Var(_) => true,
            Expr::Unary(_, a) => ok(a),
            Expr::Binary(_, l, r) => ok(l) && ok(r),
            Expr::Ite(c, t, f) => ok(c) && ok(t) && ok(f),
        }
    }
    p.nodes.len() == 1 && p.main_node().equations.iter().all(|eq| ok(&eq.rhs))
}

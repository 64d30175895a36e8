//! Name resolution, type checking and causality analysis.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::ast::*;
use super::{Diagnostic, DiagnosticKind};

pub(crate) fn check_program(p: &Program) -> Result<(), Diagnostic> {
    let mut seen = HashSet::new();
    for n in &p.nodes {
        if !seen.insert(n.name.as_str()) {
            return Err(Diagnostic::new(
                DiagnosticKind::DuplicateDefinition,
                n.pos,
                format!("node `{}` defined twice", n.name),
            ));
        }
    }
    let sigs: HashMap<&str, &Node> = p.nodes.iter().map(|n| (n.name.as_str(), n)).collect();
    for n in &p.nodes {
        check_node(n, &sigs)?;
    }
    Ok(())
}

/// Resolves the IVC candidate set for a node.
pub(crate) fn resolve_candidates(n: &Node) -> Result<BTreeSet<String>, Diagnostic> {
    match &n.ivc_annotation {
        None => Ok(n.defined_vars().map(str::to_owned).collect()),
        Some(names) => {
            let mut out = BTreeSet::new();
            for v in names {
                if !n.defined_vars().any(|d| d == v) {
                    return Err(Diagnostic::new(
                        DiagnosticKind::UnresolvedIdentifier,
                        n.pos,
                        format!("--%IVC names `{v}`, which is not an output or local of `{}`", n.name),
                    ));
                }
                out.insert(v.clone());
            }
            Ok(out)
        }
    }
}

fn check_node(n: &Node, sigs: &HashMap<&str, &Node>) -> Result<(), Diagnostic> {
    let mut env: BTreeMap<&str, Type> = BTreeMap::new();
    for d in n.decls() {
        if env.insert(d.name.as_str(), d.ty).is_some() {
            return Err(Diagnostic::new(
                DiagnosticKind::DuplicateDefinition,
                n.pos,
                format!("variable `{}` declared twice in `{}`", d.name, n.name),
            ));
        }
    }

    let mut defined: HashSet<&str> = HashSet::new();
    for eq in &n.equations {
        if n.is_input(&eq.target) {
            return Err(Diagnostic::new(
                DiagnosticKind::DuplicateDefinition,
                eq.pos,
                format!("`{}` is an input and cannot be defined", eq.target),
            ));
        }
        let Some(&ty) = env.get(eq.target.as_str()) else {
            return Err(Diagnostic::new(
                DiagnosticKind::UnresolvedIdentifier,
                eq.pos,
                format!("equation for undeclared variable `{}`", eq.target),
            ));
        };
        if !defined.insert(eq.target.as_str()) {
            return Err(Diagnostic::new(
                DiagnosticKind::DuplicateDefinition,
                eq.pos,
                format!("`{}` has more than one defining equation", eq.target),
            ));
        }
        let got = TypeCx { env: &env, sigs, pos: eq.pos }.infer(&eq.rhs)?;
        if got != ty {
            return Err(Diagnostic::new(
                DiagnosticKind::Type,
                eq.pos,
                format!("`{}` has type {ty} but its equation has type {got}", eq.target),
            ));
        }
    }
    for v in n.defined_vars() {
        if !defined.contains(v) {
            return Err(Diagnostic::new(
                DiagnosticKind::MissingDefinition,
                n.pos,
                format!("`{v}` in `{}` has no defining equation", n.name),
            ));
        }
    }
    for p in &n.properties {
        match env.get(p.as_str()) {
            None => {
                return Err(Diagnostic::new(
                    DiagnosticKind::UnresolvedIdentifier,
                    n.pos,
                    format!("property `{p}` is not a variable of `{}`", n.name),
                ))
            }
            Some(Type::Bool) => {}
            Some(t) => {
                return Err(Diagnostic::new(
                    DiagnosticKind::Type,
                    n.pos,
                    format!("property `{p}` must be bool, found {t}"),
                ))
            }
        }
    }
    resolve_candidates(n)?;
    check_causality(n)
}

struct TypeCx<'a> {
    env: &'a BTreeMap<&'a str, Type>,
    sigs: &'a HashMap<&'a str, &'a Node>,
    pos: Pos,
}

impl TypeCx<'_> {
    fn err(&self, msg: String) -> Diagnostic {
        Diagnostic::new(DiagnosticKind::Type, self.pos, msg)
    }

    fn infer(&self, e: &Expr) -> Result<Type, Diagnostic> {
        Ok(match e {
            Expr::Bool(_) => Type::Bool,
            Expr::Int(_) => Type::Int,
            Expr::Real(_) => Type::Real,
            Expr::Var(v) => match self.env.get(v.as_str()) {
                Some(t) => *t,
                None => {
                    return Err(Diagnostic::new(
                        DiagnosticKind::UnresolvedIdentifier,
                        self.pos,
                        format!("unknown variable `{v}`"),
                    ))
                }
            },
            Expr::Unary(UnOp::Pre, e) => self.infer(e)?,
            Expr::Unary(UnOp::Not, e) => {
                self.expect(e, Type::Bool, "not")?;
                Type::Bool
            }
            Expr::Unary(UnOp::Neg, e) => {
                let t = self.infer(e)?;
                if !t.is_numeric() {
                    return Err(self.err(format!("unary minus applied to {t}")));
                }
                t
            }
            Expr::Binary(op, l, r) => self.binary(*op, l, r)?,
            Expr::Ite(c, t, f) => {
                self.expect(c, Type::Bool, "if condition")?;
                let tt = self.infer(t)?;
                let ft = self.infer(f)?;
                if tt != ft {
                    return Err(self.err(format!("if branches have types {tt} and {ft}")));
                }
                tt
            }
            Expr::Call(name, args) => {
                let Some(callee) = self.sigs.get(name.as_str()) else {
                    return Err(Diagnostic::new(
                        DiagnosticKind::UnresolvedIdentifier,
                        self.pos,
                        format!("unknown node `{name}`"),
                    ));
                };
                if callee.outputs.len() != 1 {
                    return Err(self.err(format!(
                        "node `{name}` has {} outputs; only single-output nodes can be called",
                        callee.outputs.len()
                    )));
                }
                if callee.inputs.len() != args.len() {
                    return Err(self.err(format!(
                        "node `{name}` expects {} arguments, got {}",
                        callee.inputs.len(),
                        args.len()
                    )));
                }
                for (a, d) in args.iter().zip(&callee.inputs) {
                    let t = self.infer(a)?;
                    if t != d.ty {
                        return Err(self.err(format!("argument `{}` of `{name}` expects {}, got {t}", d.name, d.ty)));
                    }
                }
                callee.outputs[0].ty
            }
        })
    }

    fn expect(&self, e: &Expr, want: Type, what: &str) -> Result<(), Diagnostic> {
        let t = self.infer(e)?;
        if t != want {
            return Err(self.err(format!("{what} expects {want}, found {t}")));
        }
        Ok(())
    }

    fn binary(&self, op: BinOp, l: &Expr, r: &Expr) -> Result<Type, Diagnostic> {
        let lt = self.infer(l)?;
        let rt = self.infer(r)?;
        let sym = op.symbol();
        match op {
            BinOp::And | BinOp::Or | BinOp::Implies => {
                if lt != Type::Bool || rt != Type::Bool {
                    return Err(self.err(format!("`{sym}` expects bool operands, found {lt} and {rt}")));
                }
                Ok(Type::Bool)
            }
            BinOp::Eq | BinOp::Ne | BinOp::Arrow => {
                if lt != rt {
                    return Err(self.err(format!("`{sym}` operands have types {lt} and {rt}")));
                }
                Ok(if op == BinOp::Arrow { lt } else { Type::Bool })
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                if lt != rt || !lt.is_numeric() {
                    return Err(self.err(format!("`{sym}` expects numeric operands of one type, found {lt} and {rt}")));
                }
                Ok(Type::Bool)
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul => {
                if lt != rt || !lt.is_numeric() {
                    return Err(self.err(format!("`{sym}` expects numeric operands of one type, found {lt} and {rt}")));
                }
                if op == BinOp::Mul && !is_constant(l) && !is_constant(r) {
                    return Err(self.err("nonlinear multiplication: one factor must be a constant".into()));
                }
                Ok(lt)
            }
            BinOp::Div | BinOp::Mod => {
                if lt != Type::Int || rt != Type::Int {
                    return Err(self.err(format!("`{sym}` expects int operands, found {lt} and {rt}")));
                }
                if !is_constant(r) {
                    return Err(self.err(format!("nonlinear `{sym}`: the divisor must be a constant")));
                }
                Ok(Type::Int)
            }
        }
    }
}

/// Literal arithmetic with no variables.
pub fn is_constant(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Real(_) => true,
        Expr::Unary(UnOp::Neg, e) => is_constant(e),
        Expr::Binary(BinOp::Add | BinOp::Sub | BinOp::Mul, l, r) => is_constant(l) && is_constant(r),
        _ => false,
    }
}

/// Rejects cycles of same-instant dependencies. Calls conservatively depend
/// on every argument.
fn check_causality(n: &Node) -> Result<(), Diagnostic> {
    let deps: BTreeMap<&str, BTreeSet<&str>> = n
        .equations
        .iter()
        .map(|eq| {
            let d = eq.rhs.instant_vars().into_iter().filter(|v| n.equation(v).is_some()).collect();
            (eq.target.as_str(), d)
        })
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: HashMap<&str, Mark> = HashMap::new();
    let mut stack: Vec<&str> = Vec::new();

    fn visit<'a>(
        v: &'a str,
        deps: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        marks: &mut HashMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<&'a str>> {
        match marks.get(v) {
            Some(Mark::Done) => return None,
            Some(Mark::Active) => {
                let start = stack.iter().position(|s| *s == v).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(v);
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(v, Mark::Active);
        stack.push(v);
        for w in deps.get(v).into_iter().flatten() {
            if let Some(c) = visit(w, deps, marks, stack) {
                return Some(c);
            }
        }
        stack.pop();
        marks.insert(v, Mark::Done);
        None
    }

    for eq in &n.equations {
        if let Some(cycle) = visit(eq.target.as_str(), &deps, &mut marks, &mut stack) {
            return Err(Diagnostic::new(
                DiagnosticKind::InstantaneousCycle,
                n.equation(cycle[0]).map(|e| e.pos).unwrap_or(n.pos),
                format!("instantaneous dependency cycle: {}", cycle.join(" -> ")),
            ));
        }
    }
    Ok(())
}

/// Type of an expression that already passed checking. Calls resolve through
/// `sigs`; unknown names default to bool.
pub(crate) fn expr_type(e: &Expr, lookup: &dyn Fn(&str) -> Option<Type>, sigs: &dyn Fn(&str) -> Option<Type>) -> Type {
    match e {
        Expr::Bool(_) => Type::Bool,
        Expr::Int(_) => Type::Int,
        Expr::Real(_) => Type::Real,
        Expr::Var(v) => lookup(v).unwrap_or(Type::Bool),
        Expr::Unary(UnOp::Not, _) => Type::Bool,
        Expr::Unary(_, e) => expr_type(e, lookup, sigs),
        Expr::Binary(op, l, _) => match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod | BinOp::Arrow => expr_type(l, lookup, sigs),
            _ => Type::Bool,
        },
        Expr::Ite(_, t, _) => expr_type(t, lookup, sigs),
        Expr::Call(n, _) => sigs(n).unwrap_or(Type::Bool),
    }
}

//! Quantifier-free formulas over linear integer/real arithmetic.

use std::collections::BTreeSet;
use std::fmt::{self, Write};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::lustre::interp::euclid_div;
use crate::value::Value;

/// Which copy of the state a variable reference reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    /// Unprimed, the source state of a transition.
    Cur,
    /// Primed, the target state of a transition.
    Next,
    /// A concrete unrolling index.
    At(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    fn smt(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
    Var(Arc<str>, Step),
    /// A free Boolean symbol outside the state space (activation literals).
    Lit(Arc<str>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),
    Eq(Box<Formula>, Box<Formula>),
    Cmp(Cmp, Box<Formula>, Box<Formula>),
    Add(Vec<Formula>),
    Sub(Box<Formula>, Box<Formula>),
    Neg(Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    Div(Box<Formula>, Box<Formula>),
    Mod(Box<Formula>, Box<Formula>),
}

pub const TRUE: Formula = Formula::Bool(true);
pub const FALSE: Formula = Formula::Bool(false);

impl Formula {
    pub fn var(name: &str, step: Step) -> Formula {
        Formula::Var(Arc::from(name), step)
    }

    pub fn lit(name: &str) -> Formula {
        Formula::Lit(Arc::from(name))
    }

    pub fn int(n: i64) -> Formula {
        Formula::Int(n.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::Bool(b) => Formula::Bool(!b),
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::Bool(true) => {}
                Formula::Bool(false) => return FALSE,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => TRUE,
            1 => out.pop().expect("one"),
            _ => Formula::And(out),
        }
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::Bool(false) => {}
                Formula::Bool(true) => return TRUE,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => FALSE,
            1 => out.pop().expect("one"),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn ite(c: Formula, t: Formula, e: Formula) -> Formula {
        Formula::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn eq(a: Formula, b: Formula) -> Formula {
        Formula::Eq(Box::new(a), Box::new(b))
    }

    pub fn cmp(op: Cmp, a: Formula, b: Formula) -> Formula {
        Formula::Cmp(op, Box::new(a), Box::new(b))
    }

    /// Rewrites `Cur`/`Next` references to the concrete steps `base` and
    /// `base + 1`.
    pub fn at(&self, base: u32) -> Formula {
        self.map_vars(&|name, step| {
            let step = match step {
                Step::Cur => Step::At(base),
                Step::Next => Step::At(base + 1),
                s => s,
            };
            Formula::Var(name.clone(), step)
        })
    }

    /// Reads every `Next` reference as `Cur`. Used to turn the right-hand side
    /// of a transition conjunct into a state predicate.
    pub fn unprime(&self) -> Formula {
        self.map_vars(&|name, step| {
            let step = if step == Step::Next { Step::Cur } else { step };
            Formula::Var(name.clone(), step)
        })
    }

    pub fn map_vars(&self, f: &dyn Fn(&Arc<str>, Step) -> Formula) -> Formula {
        use Formula::*;
        let b = |x: &Formula| Box::new(x.map_vars(f));
        match self {
            Bool(_) | Int(_) | Real(_) | Lit(_) => self.clone(),
            Var(n, s) => f(n, *s),
            Not(a) => Not(b(a)),
            And(xs) => And(xs.iter().map(|x| x.map_vars(f)).collect()),
            Or(xs) => Or(xs.iter().map(|x| x.map_vars(f)).collect()),
            Implies(x, y) => Implies(b(x), b(y)),
            Ite(c, t, e) => Ite(b(c), b(t), b(e)),
            Eq(x, y) => Eq(b(x), b(y)),
            Cmp(op, x, y) => Cmp(*op, b(x), b(y)),
            Add(xs) => Add(xs.iter().map(|x| x.map_vars(f)).collect()),
            Sub(x, y) => Sub(b(x), b(y)),
            Neg(x) => Neg(b(x)),
            Mul(x, y) => Mul(b(x), b(y)),
            Div(x, y) => Div(b(x), b(y)),
            Mod(x, y) => Mod(b(x), b(y)),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Bool(_) | Int(_) | Real(_) | Lit(_) | Var(..) => vec![],
            Not(a) | Neg(a) => vec![a],
            And(xs) | Or(xs) | Add(xs) => xs.iter().collect(),
            Implies(x, y) | Eq(x, y) | Cmp(_, x, y) | Sub(x, y) | Mul(x, y) | Div(x, y) | Mod(x, y) => {
                vec![x, y]
            }
            Ite(c, t, e) => vec![c, t, e],
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn vars(&self) -> BTreeSet<(Arc<str>, Step)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| {
            if let Formula::Var(n, s) = g {
                out.insert((n.clone(), *s));
            }
        });
        out
    }

    pub fn var_names(&self) -> BTreeSet<Arc<str>> {
        self.vars().into_iter().map(|(n, _)| n).collect()
    }

    pub fn lits(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| {
            if let Formula::Lit(n) = g {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn mentions_step(&self, step: Step) -> bool {
        self.vars().iter().any(|(_, s)| *s == step)
    }

    /// Evaluates under an assignment. Missing variables and division by zero
    /// yield `Nil`.
    pub fn eval(&self, env: &dyn Fn(&str, Step) -> Option<Value>) -> Value {
        use Formula::*;
        use Value as V;
        let bool_of = |f: &Formula| f.eval(env).as_bool();
        match self {
            Bool(b) => V::Bool(*b),
            Int(n) => V::Int(n.clone()),
            Real(r) => V::Real(r.clone()),
            Var(n, s) => env(n, *s).unwrap_or(V::Nil),
            Lit(n) => env(n, Step::Cur).unwrap_or(V::Nil),
            Not(a) => bool_of(a).map_or(V::Nil, |b| V::Bool(!b)),
            And(xs) => {
                let mut nil = false;
                for x in xs {
                    match bool_of(x) {
                        Some(false) => return V::Bool(false),
                        None => nil = true,
                        _ => {}
                    }
                }
                if nil {
                    V::Nil
                } else {
                    V::Bool(true)
                }
            }
            Or(xs) => {
                let mut nil = false;
                for x in xs {
                    match bool_of(x) {
                        Some(true) => return V::Bool(true),
                        None => nil = true,
                        _ => {}
                    }
                }
                if nil {
                    V::Nil
                } else {
                    V::Bool(false)
                }
            }
            Implies(a, b) => match (bool_of(a), bool_of(b)) {
                (Some(false), _) | (_, Some(true)) => V::Bool(true),
                (Some(true), Some(false)) => V::Bool(false),
                _ => V::Nil,
            },
            Ite(c, t, e) => match bool_of(c) {
                Some(true) => t.eval(env),
                Some(false) => e.eval(env),
                None => V::Nil,
            },
            Eq(a, b) => {
                let (x, y) = (a.eval(env), b.eval(env));
                if x.is_nil() || y.is_nil() {
                    V::Nil
                } else {
                    V::Bool(x == y)
                }
            }
            Cmp(op, a, b) => match (a.eval(env), b.eval(env)) {
                (V::Int(x), V::Int(y)) => V::Bool(compare(*op, &x, &y)),
                (V::Real(x), V::Real(y)) => V::Bool(compare(*op, &x, &y)),
                _ => V::Nil,
            },
            Add(xs) => {
                let mut acc: Option<V> = None;
                for x in xs {
                    acc = Some(match (acc, x.eval(env)) {
                        (None, v) => v,
                        (Some(V::Int(a)), V::Int(b)) => V::Int(a + b),
                        (Some(V::Real(a)), V::Real(b)) => V::Real(a + b),
                        _ => return V::Nil,
                    });
                }
                acc.unwrap_or(V::Nil)
            }
            Sub(a, b) => match (a.eval(env), b.eval(env)) {
                (V::Int(x), V::Int(y)) => V::Int(x - y),
                (V::Real(x), V::Real(y)) => V::Real(x - y),
                _ => V::Nil,
            },
            Neg(a) => match a.eval(env) {
                V::Int(x) => V::Int(-x),
                V::Real(x) => V::Real(-x),
                _ => V::Nil,
            },
            Mul(a, b) => match (a.eval(env), b.eval(env)) {
                (V::Int(x), V::Int(y)) => V::Int(x * y),
                (V::Real(x), V::Real(y)) => V::Real(x * y),
                _ => V::Nil,
            },
            Div(a, b) => match (a.eval(env), b.eval(env)) {
                (V::Int(x), V::Int(y)) if !y.is_zero() => V::Int(euclid_div(&x, &y)),
                _ => V::Nil,
            },
            Mod(a, b) => match (a.eval(env), b.eval(env)) {
                (V::Int(x), V::Int(y)) if !y.is_zero() => {
                    let q = euclid_div(&x, &y);
                    V::Int(x - y * q)
                }
                _ => V::Nil,
            },
        }
    }

    /// SMT-LIB rendering. Variables at `Step::At(i)` print as `name@i`;
    /// `Cur` and `Next` print as `name` and `name.next`.
    pub fn to_smt(&self) -> String {
        let mut s = String::new();
        self.write_smt(&mut s);
        s
    }

    pub fn write_smt(&self, out: &mut String) {
        use Formula::*;
        let nary = |out: &mut String, op: &str, xs: &[&Formula]| {
            out.push('(');
            out.push_str(op);
            for x in xs {
                out.push(' ');
                x.write_smt(out);
            }
            out.push(')');
        };
        match self {
            Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Int(n) => {
                if n.is_negative() {
                    let _ = write!(out, "(- {})", -n);
                } else {
                    let _ = write!(out, "{n}");
                }
            }
            Real(r) => {
                let neg = r.is_negative();
                let a = r.abs();
                if neg {
                    out.push_str("(- ");
                }
                if a.is_integer() {
                    let _ = write!(out, "{}.0", a.numer());
                } else {
                    let _ = write!(out, "(/ {}.0 {}.0)", a.numer(), a.denom());
                }
                if neg {
                    out.push(')');
                }
            }
            Var(n, s) => out.push_str(&symbol(n, *s)),
            Lit(n) => out.push_str(n),
            Not(a) => nary(out, "not", &[a]),
            And(xs) => nary(out, "and", &xs.iter().collect::<Vec<_>>()),
            Or(xs) => nary(out, "or", &xs.iter().collect::<Vec<_>>()),
            Implies(a, b) => nary(out, "=>", &[a, b]),
            Ite(c, t, e) => nary(out, "ite", &[c, t, e]),
            Eq(a, b) => nary(out, "=", &[a, b]),
            Cmp(op, a, b) => nary(out, op.smt(), &[a, b]),
            Add(xs) => nary(out, "+", &xs.iter().collect::<Vec<_>>()),
            Sub(a, b) => nary(out, "-", &[a, b]),
            Neg(a) => nary(out, "-", &[a]),
            Mul(a, b) => nary(out, "*", &[a, b]),
            Div(a, b) => nary(out, "div", &[a, b]),
            Mod(a, b) => nary(out, "mod", &[a, b]),
        }
    }
}

fn compare<T: PartialOrd>(op: Cmp, a: &T, b: &T) -> bool {
    match op {
        Cmp::Lt => a < b,
        Cmp::Le => a <= b,
        Cmp::Gt => a > b,
        Cmp::Ge => a >= b,
    }
}

/// Solver symbol for a state variable at a step.
pub fn symbol(name: &str, step: Step) -> String {
    match step {
        Step::Cur => name.to_owned(),
        Step::Next => format!("{name}.next"),
        Step::At(i) => format!("{name}@{i}"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_smt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_simplify() {
        assert_eq!(Formula::and([TRUE, Formula::lit("a")]), Formula::lit("a"));
        assert_eq!(Formula::and([FALSE, Formula::lit("a")]), FALSE);
        assert_eq!(Formula::or([]), FALSE);
        assert_eq!(Formula::not(Formula::not(Formula::lit("a"))), Formula::lit("a"));
    }

    #[test]
    fn shifting_steps() {
        let f = Formula::eq(Formula::var("x", Step::Next), Formula::var("x", Step::Cur));
        assert_eq!(f.at(3).to_smt(), "(= x@4 x@3)");
        assert_eq!(f.unprime().to_smt(), "(= x x)");
    }

    #[test]
    fn literals_render() {
        let r = Formula::Real(BigRational::new((-3).into(), 4.into()));
        assert_eq!(r.to_smt(), "(- (/ 3.0 4.0))");
        assert_eq!(Formula::int(-2).to_smt(), "(- 2)");
    }

    #[test]
    fn eval_mixed() {
        let f = Formula::ite(
            Formula::var("c", Step::Cur),
            Formula::Add(vec![Formula::var("x", Step::Cur), Formula::int(1)]),
            Formula::int(0),
        );
        let env = |n: &str, _| match n {
            "c" => Some(Value::Bool(true)),
            "x" => Some(Value::Int(4.into())),
            _ => None,
        };
        assert_eq!(f.eval(&env), Value::Int(5.into()));
    }
}

//! Reference step interpreter for Lustre programs.
//!
//! Works directly on the source program (calls run as stateful instances,
//! `pre` of any expression keeps its own memory), so it is independent of
//! normalization and of the transition-system encoding.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::ast::*;
use crate::value::Value;

/// A running instance of one node.
pub struct Interpreter<'a> {
    program: &'a Program,
    node: &'a Node,
    step: usize,
    /// Previous values of `pre e` occurrences, keyed by (equation, occurrence).
    pre_mem: HashMap<(usize, usize), Value>,
    calls: HashMap<(usize, usize), Interpreter<'a>>,
    seed: Option<BTreeMap<String, Value>>,
}

impl<'a> Interpreter<'a> {
    pub fn new(program: &'a Program) -> Self {
        Self::for_node(program, program.main_node())
    }

    fn for_node(program: &'a Program, node: &'a Node) -> Self {
        Interpreter { program, node, step: 0, pre_mem: HashMap::new(), calls: HashMap::new(), seed: None }
    }

    /// Supplies the values `pre v` reads at the first step (otherwise nil).
    pub fn with_initial_pre(mut self, seed: BTreeMap<String, Value>) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Runs one synchronous step and returns every variable's value.
    pub fn step(&mut self, inputs: &BTreeMap<String, Value>) -> BTreeMap<String, Value> {
        let mut cur: HashMap<String, Value> = HashMap::new();
        for d in &self.node.inputs {
            cur.insert(d.name.clone(), inputs.get(&d.name).cloned().unwrap_or(Value::Nil));
        }
        let order = eval_order(self.node);
        for idx in order {
            let eq = &self.node.equations[idx];
            let mut occ = Occ::default();
            let v = self.eval(&eq.rhs, idx, &mut occ, &cur);
            cur.insert(eq.target.clone(), v);
        }
        let mut updates = Vec::new();
        let node = self.node;
        for (idx, eq) in node.equations.iter().enumerate() {
            let mut occ = Occ::default();
            self.commit(&eq.rhs, idx, &mut occ, &cur, &mut updates);
        }
        self.pre_mem.extend(updates);
        self.step += 1;
        cur.into_iter().collect()
    }

    /// Evaluates the operand of every `pre` once the step's values are known.
    fn commit(
        &mut self,
        e: &'a Expr,
        eq: usize,
        occ: &mut Occ,
        cur: &HashMap<String, Value>,
        updates: &mut Vec<((usize, usize), Value)>,
    ) {
        match e {
            Expr::Unary(UnOp::Pre, inner) => {
                let key = (eq, occ.pre);
                occ.pre += 1;
                let mut inner_occ = Occ { pre: occ.pre, call: occ.call };
                let v = self.eval(inner, eq, &mut inner_occ, cur);
                updates.push((key, v));
                self.commit(inner, eq, occ, cur, updates);
            }
            Expr::Call(_, args) => {
                occ.call += 1;
                for a in args {
                    self.commit(a, eq, occ, cur, updates);
                }
            }
            Expr::Unary(_, a) => self.commit(a, eq, occ, cur, updates),
            Expr::Binary(_, l, r) => {
                self.commit(l, eq, occ, cur, updates);
                self.commit(r, eq, occ, cur, updates);
            }
            Expr::Ite(c, t, f) => {
                self.commit(c, eq, occ, cur, updates);
                self.commit(t, eq, occ, cur, updates);
                self.commit(f, eq, occ, cur, updates);
            }
            _ => {}
        }
    }

    fn eval(&mut self, e: &Expr, eq: usize, occ: &mut Occ, cur: &HashMap<String, Value>) -> Value {
        match e {
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Int(n) => Value::Int(n.clone()),
            Expr::Real(r) => Value::Real(r.clone()),
            Expr::Var(v) => cur.get(v).cloned().unwrap_or(Value::Nil),
            Expr::Unary(UnOp::Pre, inner) => {
                let key = (eq, occ.pre);
                occ.pre += 1;
                let (pres, calls) = count_occ(inner);
                occ.pre += pres;
                occ.call += calls;
                if self.step == 0 {
                    match (inner.as_ref(), &self.seed) {
                        (Expr::Var(v), Some(seed)) => seed.get(v).cloned().unwrap_or(Value::Nil),
                        _ => Value::Nil,
                    }
                } else {
                    self.pre_mem.get(&key).cloned().unwrap_or(Value::Nil)
                }
            }
            Expr::Unary(UnOp::Not, a) => match self.eval(a, eq, occ, cur) {
                Value::Bool(b) => Value::Bool(!b),
                _ => Value::Nil,
            },
            Expr::Unary(UnOp::Neg, a) => match self.eval(a, eq, occ, cur) {
                Value::Int(n) => Value::Int(-n),
                Value::Real(r) => Value::Real(-r),
                _ => Value::Nil,
            },
            Expr::Binary(BinOp::Arrow, l, r) => {
                let lv = self.eval(l, eq, occ, cur);
                let rv = self.eval(r, eq, occ, cur);
                if self.step == 0 {
                    lv
                } else {
                    rv
                }
            }
            Expr::Binary(op, l, r) => {
                let lv = self.eval(l, eq, occ, cur);
                let rv = self.eval(r, eq, occ, cur);
                binary(*op, lv, rv)
            }
            Expr::Ite(c, t, f) => {
                let cv = self.eval(c, eq, occ, cur);
                let tv = self.eval(t, eq, occ, cur);
                let fv = self.eval(f, eq, occ, cur);
                match cv {
                    Value::Bool(true) => tv,
                    Value::Bool(false) => fv,
                    _ => Value::Nil,
                }
            }
            Expr::Call(name, args) => {
                let key = (eq, occ.call);
                occ.call += 1;
                let vals: Vec<Value> = args.iter().map(|a| self.eval(a, eq, occ, cur)).collect();
                let program = self.program;
                let callee = program.node(name).expect("checked call");
                let inst = self.calls.entry(key).or_insert_with(|| Interpreter::for_node(program, callee));
                let inputs = callee.inputs.iter().map(|d| d.name.clone()).zip(vals).collect();
                let out = inst.step(&inputs);
                out.get(&callee.outputs[0].name).cloned().unwrap_or(Value::Nil)
            }
        }
    }
}

fn count_occ(e: &Expr) -> (usize, usize) {
    let (mut pres, mut calls) = (0, 0);
    fn go(e: &Expr, pres: &mut usize, calls: &mut usize) {
        match e {
            Expr::Unary(op, a) => {
                if *op == UnOp::Pre {
                    *pres += 1;
                }
                go(a, pres, calls);
            }
            Expr::Binary(_, l, r) => {
                go(l, pres, calls);
                go(r, pres, calls);
            }
            Expr::Ite(c, t, f) => {
                go(c, pres, calls);
                go(t, pres, calls);
                go(f, pres, calls);
            }
            Expr::Call(_, args) => {
                *calls += 1;
                args.iter().for_each(|a| go(a, pres, calls));
            }
            _ => {}
        }
    }
    go(e, &mut pres, &mut calls);
    (pres, calls)
}

#[derive(Default)]
struct Occ {
    pre: usize,
    call: usize,
}

/// Equation indices in an order where same-instant dependencies come first.
fn eval_order(node: &Node) -> Vec<usize> {
    let index: HashMap<&str, usize> = node.equations.iter().enumerate().map(|(i, e)| (e.target.as_str(), i)).collect();
    let mut done = vec![false; node.equations.len()];
    let mut out = Vec::with_capacity(node.equations.len());
    fn visit(i: usize, node: &Node, index: &HashMap<&str, usize>, done: &mut [bool], out: &mut Vec<usize>) {
        if done[i] {
            return;
        }
        done[i] = true;
        for v in node.equations[i].rhs.instant_vars() {
            if let Some(&j) = index.get(v) {
                visit(j, node, index, done, out);
            }
        }
        out.push(i);
    }
    for i in 0..node.equations.len() {
        visit(i, node, &index, &mut done, &mut out);
    }
    out
}

pub(crate) fn binary(op: BinOp, l: Value, r: Value) -> Value {
    use Value::*;
    match (op, l, r) {
        (BinOp::And, Bool(a), Bool(b)) => Bool(a && b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(a || b),
        (BinOp::Implies, Bool(a), Bool(b)) => Bool(!a || b),
        (BinOp::Eq, a, b) if !a.is_nil() && !b.is_nil() => Bool(a == b),
        (BinOp::Ne, a, b) if !a.is_nil() && !b.is_nil() => Bool(a != b),
        (BinOp::Add, Int(a), Int(b)) => Int(a + b),
        (BinOp::Sub, Int(a), Int(b)) => Int(a - b),
        (BinOp::Mul, Int(a), Int(b)) => Int(a * b),
        (BinOp::Add, Real(a), Real(b)) => Real(a + b),
        (BinOp::Sub, Real(a), Real(b)) => Real(a - b),
        (BinOp::Mul, Real(a), Real(b)) => Real(a * b),
        (BinOp::Div, Int(a), Int(b)) if !b.is_zero() => Int(euclid_div(&a, &b)),
        (BinOp::Mod, Int(a), Int(b)) if !b.is_zero() => Int(&a - &b * euclid_div(&a, &b)),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::Lt, Real(a), Real(b)) => Bool(a < b),
        (BinOp::Le, Real(a), Real(b)) => Bool(a <= b),
        (BinOp::Gt, Real(a), Real(b)) => Bool(a > b),
        (BinOp::Ge, Real(a), Real(b)) => Bool(a >= b),
        _ => Nil,
    }
}

/// SMT-LIB integer division: the remainder is always nonnegative.
pub(crate) fn euclid_div(a: &BigInt, b: &BigInt) -> BigInt {
    if b.is_negative() {
        -a.div_floor(&-b)
    } else {
        a.div_floor(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lustre::parse;

    fn ints(vs: &[(&str, i64)]) -> BTreeMap<String, Value> {
        vs.iter().map(|(k, v)| (k.to_string(), Value::Int((*v).into()))).collect()
    }

    #[test]
    fn counter_trace() {
        let p = parse("node m() returns (c: int); let c = 0 -> pre c + 1; tel;").unwrap();
        let mut it = Interpreter::new(&p);
        let got: Vec<Value> = (0..4).map(|_| it.step(&BTreeMap::new())["c"].clone()).collect();
        assert_eq!(got, [0, 1, 2, 3].map(|n| Value::Int(n.into())));
    }

    #[test]
    fn pre_is_nil_at_first_step() {
        let p = parse("node m(x: int) returns (y: int); let y = pre x; tel;").unwrap();
        let mut it = Interpreter::new(&p);
        assert_eq!(it.step(&ints(&[("x", 5)]))["y"], Value::Nil);
        assert_eq!(it.step(&ints(&[("x", 6)]))["y"], Value::Int(5.into()));
    }

    #[test]
    fn call_instances_keep_separate_state() {
        let p = parse(
            "node acc(x: int) returns (s: int); let s = x + (0 -> pre s); tel;
             node m(x: int) returns (a, b: int); let a = acc(x); b = acc(1); tel;",
        )
        .unwrap();
        let mut it = Interpreter::new(&p);
        it.step(&ints(&[("x", 10)]));
        let out = it.step(&ints(&[("x", 10)]));
        assert_eq!(out["a"], Value::Int(20.into()));
        assert_eq!(out["b"], Value::Int(2.into()));
    }

    #[test]
    fn euclidean_division() {
        let cases = [(7, 2, 3, 1), (-7, 2, -4, 1), (7, -2, -3, 1), (-7, -2, 4, 1)];
        for (a, b, q, r) in cases {
            let qv = binary(BinOp::Div, Value::Int(a.into()), Value::Int(b.into()));
            let rv = binary(BinOp::Mod, Value::Int(a.into()), Value::Int(b.into()));
            assert_eq!((qv, rv), (Value::Int(q.into()), Value::Int(r.into())), "{a} div {b}");
        }
    }
}

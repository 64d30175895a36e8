//! Syntax tree for the supported Lustre subset.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Scalar types of the subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Bool,
    Int,
    Real,
}

impl Type {
    pub fn is_numeric(self) -> bool {
        matches!(self, Type::Int | Type::Real)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Bool => "bool",
            Type::Int => "int",
            Type::Real => "real",
        })
    }
}

/// Source position, used for diagnostics only.
///
/// Positions never take part in structural equality, so a pretty-printed and
/// reparsed program compares equal to the original.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    Pre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
    Arrow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Implies => "=>",
            BinOp::Arrow => "->",
        }
    }

    /// Binding strength, higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Arrow => 1,
            BinOp::Implies => 2,
            BinOp::Or => 3,
            BinOp::And => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        }
    }

    pub fn right_assoc(self) -> bool {
        matches!(self, BinOp::Arrow | BinOp::Implies)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    /// Visits every variable occurrence, flagging whether it sits under `pre`.
    pub fn visit_vars<'a>(&'a self, under_pre: bool, f: &mut impl FnMut(&'a str, bool)) {
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) => {}
            Expr::Var(v) => f(v, under_pre),
            Expr::Unary(UnOp::Pre, e) => e.visit_vars(true, f),
            Expr::Unary(_, e) => e.visit_vars(under_pre, f),
            Expr::Binary(_, l, r) => {
                l.visit_vars(under_pre, f);
                r.visit_vars(under_pre, f);
            }
            Expr::Ite(c, t, e) => {
                c.visit_vars(under_pre, f);
                t.visit_vars(under_pre, f);
                e.visit_vars(under_pre, f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit_vars(under_pre, f)),
        }
    }

    /// All variables mentioned, including those under `pre`.
    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit_vars(false, &mut |v, _| {
            out.insert(v);
        });
        out
    }

    /// Variables read in the same instant (not under `pre`).
    pub fn instant_vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit_vars(false, &mut |v, pre| {
            if !pre {
                out.insert(v);
            }
        });
        out
    }

    pub fn visit_calls<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) | Expr::Var(_) => {}
            Expr::Unary(_, e) => e.visit_calls(f),
            Expr::Binary(_, l, r) => {
                l.visit_calls(f);
                r.visit_calls(f);
            }
            Expr::Ite(c, t, e) => {
                c.visit_calls(f);
                t.visit_calls(f);
                e.visit_calls(f);
            }
            Expr::Call(n, args) => {
                f(n);
                args.iter().for_each(|a| a.visit_calls(f));
            }
        }
    }

    pub fn has_temporal(&self) -> bool {
        match self {
            Expr::Unary(UnOp::Pre, _) | Expr::Binary(BinOp::Arrow, _, _) => true,
            Expr::Bool(_) | Expr::Int(_) | Expr::Real(_) | Expr::Var(_) => false,
            Expr::Unary(_, e) => e.has_temporal(),
            Expr::Binary(_, l, r) => l.has_temporal() || r.has_temporal(),
            Expr::Ite(c, t, e) => c.has_temporal() || t.has_temporal() || e.has_temporal(),
            Expr::Call(_, args) => args.iter().any(Expr::has_temporal),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub target: String,
    pub rhs: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: String,
    pub inputs: Vec<Decl>,
    pub outputs: Vec<Decl>,
    pub locals: Vec<Decl>,
    pub equations: Vec<Equation>,
    /// Boolean variables asserted to hold at every step.
    pub properties: Vec<String>,
    /// Raw `--%IVC` annotation, if one was written.
    pub ivc_annotation: Option<Vec<String>>,
    /// Variables whose equations take part in IVC search.
    pub ivc_candidates: BTreeSet<String>,
    /// Variables introduced by normalization.
    pub generated: BTreeSet<String>,
    pub pos: Pos,
}

impl Node {
    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.inputs.iter().chain(&self.outputs).chain(&self.locals)
    }

    pub fn type_of(&self, name: &str) -> Option<Type> {
        self.decls().find(|d| d.name == name).map(|d| d.ty)
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.inputs.iter().any(|d| d.name == name)
    }

    pub fn equation(&self, target: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.target == target)
    }

    /// Outputs and locals, in declaration order.
    pub fn defined_vars(&self) -> impl Iterator<Item = &str> {
        self.outputs.iter().chain(&self.locals).map(|d| d.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub nodes: Vec<Node>,
    pub main: String,
}

impl Program {
    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn main_node(&self) -> &Node {
        self.node(&self.main).expect("main node exists")
    }
}

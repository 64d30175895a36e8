//! Recursive-descent parser producing an unchecked [`Program`].

use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, DiagnosticKind};

pub(crate) struct Parsed {
    pub program: Program,
    pub main_pragma: Option<(String, Pos)>,
}

pub(crate) fn parse_syntax(src: &str) -> Result<Parsed, Diagnostic> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, at: 0, main_pragma: None };
    let mut nodes = Vec::new();
    while p.peek() != &Tok::Eof {
        nodes.push(p.node()?);
    }
    if nodes.is_empty() {
        return Err(p.error("expected node"));
    }
    let main = nodes.last().expect("nonempty").name.clone();
    Ok(Parsed { program: Program { nodes, main }, main_pragma: p.main_pragma })
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    main_pragma: Option<(String, Pos)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(DiagnosticKind::Parse, self.pos(), msg)
    }

    fn found(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Real(_) => "real literal".into(),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Pragma(p) => format!("pragma `--%{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if self.is(sym) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), Diagnostic> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`, found {}", self.found())))
        }
    }

    fn ident(&mut self) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(format!("expected identifier, found {}", self.found()))),
        }
    }

    fn node(&mut self) -> Result<Node, Diagnostic> {
        let pos = self.pos();
        if !self.is("node") {
            return Err(self.error(format!("expected node, found {}", self.found())));
        }
        self.advance();
        let name = self.ident()?;
        self.expect("(")?;
        let inputs = if self.is(")") { Vec::new() } else { self.decl_groups(")")? };
        self.expect(")")?;
        self.expect("returns")?;
        self.expect("(")?;
        let outputs = self.decl_groups(")")?;
        self.expect(")")?;
        self.eat(";");
        let mut locals = Vec::new();
        if self.eat("var") {
            while !self.is("let") {
                locals.extend(self.decl_group()?);
                self.expect(";")?;
            }
        }
        self.expect("let")?;
        let mut node = Node {
            name,
            inputs,
            outputs,
            locals,
            equations: Vec::new(),
            properties: Vec::new(),
            ivc_annotation: None,
            ivc_candidates: BTreeSet::new(),
            generated: BTreeSet::new(),
            pos,
        };
        while !self.is("tel") {
            match self.peek().clone() {
                Tok::Pragma(kind) => self.pragma(&kind, &mut node)?,
                Tok::Ident(_) => {
                    let epos = self.pos();
                    let target = self.ident()?;
                    self.expect("=")?;
                    let rhs = self.expr()?;
                    self.expect(";")?;
                    node.equations.push(Equation { target, rhs, pos: epos });
                }
                _ => return Err(self.error(format!("expected equation or `tel`, found {}", self.found()))),
            }
        }
        self.expect("tel")?;
        self.eat(";");
        Ok(node)
    }

    fn pragma(&mut self, kind: &str, node: &mut Node) -> Result<(), Diagnostic> {
        let pos = self.pos();
        self.advance();
        match kind {
            "PROPERTY" => {
                node.properties.push(self.ident()?);
            }
            "IVC" => {
                let mut names = vec![self.ident()?];
                while self.eat(",") {
                    names.push(self.ident()?);
                }
                node.ivc_annotation.get_or_insert_with(Vec::new).extend(names);
            }
            "MAIN" => {
                if self.main_pragma.is_some() {
                    return Err(Diagnostic::new(DiagnosticKind::Parse, pos, "more than one --%MAIN pragma"));
                }
                self.main_pragma = Some((node.name.clone(), pos));
            }
            other => {
                return Err(Diagnostic::new(DiagnosticKind::Parse, pos, format!("unknown pragma --%{other}")));
            }
        }
        self.expect(";")
    }

    fn decl_groups(&mut self, close: &str) -> Result<Vec<Decl>, Diagnostic> {
        let mut out = self.decl_group()?;
        while self.eat(";") {
            if self.is(close) {
                break;
            }
            out.extend(self.decl_group()?);
        }
        Ok(out)
    }

    fn decl_group(&mut self) -> Result<Vec<Decl>, Diagnostic> {
        let mut names = vec![self.ident()?];
        while self.eat(",") {
            names.push(self.ident()?);
        }
        self.expect(":")?;
        let ty = self.ty()?;
        Ok(names.into_iter().map(|name| Decl { name, ty }).collect())
    }

    fn ty(&mut self) -> Result<Type, Diagnostic> {
        let ty = match self.peek() {
            Tok::Sym("bool") => Type::Bool,
            Tok::Sym("int") => Type::Int,
            Tok::Sym("real") => Type::Real,
            _ => return Err(self.error(format!("expected type, found {}", self.found()))),
        };
        self.advance();
        Ok(ty)
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, Diagnostic> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("div") => BinOp::Div,
            Tok::Sym("mod") => BinOp::Mod,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("<>") => BinOp::Ne,
            Tok::Sym("and") => BinOp::And,
            Tok::Sym("or") => BinOp::Or,
            Tok::Sym("=>") => BinOp::Implies,
            Tok::Sym("->") => BinOp::Arrow,
            _ => return None,
        })
    }

    fn binary(&mut self, min: u8) -> Result<Expr, Diagnostic> {
        let mut lhs = self.prefix()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min {
                break;
            }
            self.advance();
            let next = if op.right_assoc() { prec } else { prec + 1 };
            let rhs = self.binary(next)?;
            lhs = Expr::binary(op, lhs, rhs);
            // Comparisons do not chain.
            if prec == 5 && self.binop().is_some_and(|o| o.precedence() == 5) {
                return Err(self.error("comparison operators are not associative"));
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, Diagnostic> {
        if self.eat("not") {
            let e = self.binary(5)?;
            return Ok(Expr::unary(UnOp::Not, e));
        }
        if self.eat("if") {
            let c = self.expr()?;
            self.expect("then")?;
            let t = self.expr()?;
            self.expect("else")?;
            let e = self.expr()?;
            return Ok(Expr::ite(c, t, e));
        }
        self.tight()
    }

    fn tight(&mut self) -> Result<Expr, Diagnostic> {
        if self.eat("-") {
            return Ok(Expr::unary(UnOp::Neg, self.tight()?));
        }
        if self.eat("pre") {
            return Ok(Expr::unary(UnOp::Pre, self.tight()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, Diagnostic> {
        match self.peek().clone() {
            Tok::Sym("true") => {
                self.advance();
                Ok(Expr::Bool(true))
            }
            Tok::Sym("false") => {
                self.advance();
                Ok(Expr::Bool(false))
            }
            Tok::Int(n) => {
                self.advance();
                Ok(Expr::Int(n))
            }
            Tok::Real(r) => {
                self.advance();
                Ok(Expr::Real(r))
            }
            Tok::Sym("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Sym("if") | Tok::Sym("not") => self.prefix(),
            Tok::Ident(name) => {
                self.advance();
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.is(")") {
                        args.push(self.expr()?);
                        while self.eat(",") {
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(")")?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            _ => Err(self.error(format!("expected expression, found {}", self.found()))),
        }
    }
}

/// Parses a standalone expression (used by tests and tooling).
pub fn parse_expr(src: &str) -> Result<Expr, Diagnostic> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, at: 0, main_pragma: None };
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.found())));
    }
    Ok(e)
}

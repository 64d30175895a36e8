//! Frontend for the supported Lustre subset: single clock, scalar types
//! (`bool`, `int`, `real`), node calls that are inlined, and the pragmas
//! `--%PROPERTY v;`, `--%IVC v1, v2;` and `--%MAIN;`.

use std::collections::BTreeSet;
use std::fmt;

mod ast;
mod check;
pub mod interp;
mod lexer;
mod normalize;
mod parser;
mod pretty;
mod slice;

pub use ast::*;
pub use check::is_constant;
pub use normalize::{is_normalized, normalize};
pub use parser::parse_expr;
pub use slice::{slice_backward, slice_backward_many};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Lex,
    Parse,
    Type,
    DuplicateDefinition,
    MissingDefinition,
    UnresolvedIdentifier,
    InstantaneousCycle,
    Recursion,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Lex => "lex error",
            DiagnosticKind::Parse => "parse error",
            DiagnosticKind::Type => "type error",
            DiagnosticKind::DuplicateDefinition => "duplicate definition",
            DiagnosticKind::MissingDefinition => "missing definition",
            DiagnosticKind::UnresolvedIdentifier => "unresolved identifier",
            DiagnosticKind::InstantaneousCycle => "instantaneous cycle",
            DiagnosticKind::Recursion => "recursive node",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{pos}: {kind}: {message}")]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic { kind, pos, message: message.into() }
    }
}

/// Parses and checks a program. The main node is the one carrying `--%MAIN`,
/// or the last node in the file.
pub fn parse(src: &str) -> Result<Program, Diagnostic> {
    let parser::Parsed { mut program, main_pragma } = parser::parse_syntax(src)?;
    if let Some((main, _)) = main_pragma {
        program.main = main;
    }
    check::check_program(&program)?;
    for n in &mut program.nodes {
        n.ivc_candidates = check::resolve_candidates(n)?;
    }
    Ok(program)
}

/// The main node's IVC candidates: the `--%IVC` names, or every output and
/// local when no annotation is present.
pub fn resolve_ivc_annotations(p: &Program) -> Result<BTreeSet<String>, Diagnostic> {
    check::resolve_candidates(p.main_node())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FILTER: &str = "
node f(x, p: real) returns (r: real);
let
  r = x + p;
tel;

node filter(x: real) returns (a, b, y: real);
var prop: bool;
let
  a = f(x, 0.0 -> pre y);
  b = if a >= 0.0 then a else -a;
  y = b + (0.0 -> pre y);
  prop = y >= 0.0;
  --%PROPERTY prop;
tel;
";

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn filter_model_parses() {
        let p = parse(FILTER).unwrap();
        assert_eq!(p.main, "filter");
        let main = p.main_node();
        assert_eq!(main.inputs.len(), 1);
        assert_eq!(main.equations.len(), 4);
        assert_eq!(main.properties, vec!["prop".to_string()]);
    }

    #[test]
    fn filter_without_call_has_three_equations() {
        let src = "
node filter(x: real) returns (a, b, y: real);
let
  a = x + (0.0 -> pre y);
  b = if a >= 0.0 then a else -a;
  y = b + (0.0 -> pre y);
tel;";
        let p = parse(src).unwrap();
        assert_eq!(p.nodes.len(), 1);
        assert_eq!(p.main_node().inputs.len(), 1);
        assert_eq!(p.main_node().equations.len(), 3);
    }

    #[test]
    fn empty_source() {
        let e = parse("").unwrap_err();
        assert_eq!(e.kind, DiagnosticKind::Parse);
        assert!(e.message.contains("expected node"), "{e}");
    }

    #[test]
    fn duplicate_target() {
        let e = parse("node m(x: int) returns (a, b: int); let a = x + (0 -> pre a); b = a; a = b; tel;").unwrap_err();
        assert_eq!(e.kind, DiagnosticKind::DuplicateDefinition);
    }

    #[test]
    fn distinct_error_categories() {
        let cases = [
            ("node m() returns (a: int); let a = 1 $ tel;", DiagnosticKind::Lex),
            ("node m() returns (a: int); let a = ; tel;", DiagnosticKind::Parse),
            ("node m() returns (a: int); let a = true; tel;", DiagnosticKind::Type),
            ("node m() returns (a: int); let a = q; tel;", DiagnosticKind::UnresolvedIdentifier),
            ("node m() returns (a, b: int); let a = b; b = a; tel;", DiagnosticKind::InstantaneousCycle),
            ("node m() returns (a, b: int); let a = 1; tel;", DiagnosticKind::MissingDefinition),
            ("node m(x: int) returns (a: int); let a = x * x; tel;", DiagnosticKind::Type),
        ];
        for (src, kind) in cases {
            assert_eq!(parse(src).unwrap_err().kind, kind, "{src}");
        }
    }

    #[test]
    fn cycle_through_pre_is_fine() {
        assert!(parse("node m() returns (a, b: int); let a = 0 -> pre b; b = a; tel;").is_ok());
        let e = parse("node m() returns (a, b: int); let a = b; b = a; tel;").unwrap_err();
        assert_eq!(e.kind, DiagnosticKind::InstantaneousCycle);
    }

    #[test]
    fn ivc_pragma() {
        let src = "node m(x: int) returns (a, b, y: int);
                   let a = x; b = a; y = b; --%IVC a, b; tel;";
        let p = parse(src).unwrap();
        assert_eq!(resolve_ivc_annotations(&p).unwrap(), set(&["a", "b"]));
        let p = parse("node m(x: int) returns (a, b: int); let a = x; b = a; tel;").unwrap();
        assert_eq!(resolve_ivc_annotations(&p).unwrap(), set(&["a", "b"]));
        let e = parse("node m(x: int) returns (a: int); let a = x; --%IVC z; tel;").unwrap_err();
        assert_eq!(e.kind, DiagnosticKind::UnresolvedIdentifier);
    }

    #[test]
    fn property_must_be_bool() {
        let e = parse("node m(x: int) returns (a: int); let a = x; --%PROPERTY a; tel;").unwrap_err();
        assert_eq!(e.kind, DiagnosticKind::Type);
    }

    #[test]
    fn main_pragma_selects_node() {
        let p = parse(
            "node top() returns (a: int); let a = 1; --%MAIN; tel;
             node other() returns (b: int); let b = 2; tel;",
        )
        .unwrap();
        assert_eq!(p.main, "top");
        let reparsed = parse(&p.to_string()).unwrap();
        assert_eq!(reparsed, p);
    }

    #[test]
    fn filter_round_trips() {
        let p = parse(FILTER).unwrap();
        assert_eq!(parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn normalize_lifts_pre_of_expression() {
        let p = parse("node m(x: int) returns (y: int); let y = pre (x + 1); tel;").unwrap();
        let n = normalize(&p).unwrap();
        let main = n.main_node();
        assert_eq!(main.equations.len(), 2);
        assert_eq!(main.equation("y").unwrap().rhs, Expr::unary(UnOp::Pre, Expr::var("t~0")));
        assert_eq!(main.equation("t~0").unwrap().rhs, parse_expr("x + 1").unwrap());
        assert!(main.generated.contains("t~0"));
        assert!(is_normalized(&n));
    }

    #[test]
    fn normalize_identity_without_temporal_operators() {
        let p = parse("node m(x: int) returns (y, z: int); let y = x + 1; z = y * 2; tel;").unwrap();
        assert_eq!(normalize(&p).unwrap(), p);
    }

    #[test]
    fn normalize_inlines_filter_call() {
        let p = parse(FILTER).unwrap();
        let n = normalize(&p).unwrap();
        let main = n.main_node();
        assert_eq!(n.nodes.len(), 1);
        assert_eq!(main.equation("a").unwrap().rhs, Expr::var("f~0~r"));
        // b, y and prop are untouched.
        let orig = p.main_node();
        for v in ["b", "y", "prop"] {
            assert_eq!(main.equation(v).unwrap().rhs, orig.equation(v).unwrap().rhs);
        }
        assert!(main.generated.iter().all(|g| g.contains('~')));
        assert_eq!(main.ivc_candidates, orig.ivc_candidates);
    }

    #[test]
    fn recursion_is_rejected() {
        let p = parse(
            "node g(x: int) returns (y: int); let y = g(x); tel;
             node m(x: int) returns (z: int); let z = g(x); tel;",
        );
        // `g` calling itself is an instantaneous cycle through the call.
        let err = match p {
            Err(e) => e,
            Ok(p) => normalize(&p).unwrap_err(),
        };
        assert!(matches!(err.kind, DiagnosticKind::Recursion | DiagnosticKind::InstantaneousCycle));

        let p = parse(
            "node g(x: int) returns (y: int); let y = 0 -> pre h(x); tel;
             node h(x: int) returns (y: int); let y = 0 -> pre g(x); tel;
             node m(x: int) returns (z: int); let z = g(x); tel;",
        )
        .unwrap();
        assert_eq!(normalize(&p).unwrap_err().kind, DiagnosticKind::Recursion);
    }
}

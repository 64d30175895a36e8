//! Source rendering. Output reparses to an equal [`Program`].

use std::fmt::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ast::*;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: u8) -> fmt::Result {
    match e {
        Expr::Bool(b) => write!(f, "{b}"),
        Expr::Int(n) if n.is_negative() => write!(f, "(-{})", n.abs()),
        Expr::Int(n) => write!(f, "{n}"),
        Expr::Real(r) if r.is_negative() => write!(f, "(-{})", real_literal(&r.abs())),
        Expr::Real(r) => f.write_str(&real_literal(r)),
        Expr::Var(v) => f.write_str(v),
        Expr::Unary(UnOp::Neg, e) => {
            f.write_str("-")?;
            // `--` would start a comment.
            if let Expr::Unary(UnOp::Neg, _) = **e {
                f.write_str("(")?;
                write_expr(f, e, 0)?;
                f.write_str(")")
            } else {
                write_expr(f, e, 10)
            }
        }
        Expr::Unary(UnOp::Pre, e) => {
            f.write_str("pre ")?;
            write_expr(f, e, 10)
        }
        Expr::Unary(UnOp::Not, e) => {
            if ctx > 0 {
                f.write_str("(")?;
            }
            f.write_str("not ")?;
            write_expr(f, e, 10)?;
            if ctx > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            let paren = ctx >= p;
            if paren {
                f.write_str("(")?;
            }
            let (lctx, rctx) = if op.right_assoc() { (p, p - 1) } else { (p - 1, p) };
            // Comparisons never nest without parentheses.
            let (lctx, rctx) = if p == 5 { (p, p) } else { (lctx, rctx) };
            write_expr(f, l, lctx)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(f, r, rctx)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Ite(c, t, e) => {
            if ctx > 0 {
                f.write_str("(")?;
            }
            f.write_str("if ")?;
            write_expr(f, c, 0)?;
            f.write_str(" then ")?;
            write_expr(f, t, 0)?;
            f.write_str(" else ")?;
            write_expr(f, e, 0)?;
            if ctx > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Call(n, args) => {
            write!(f, "{n}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(f, a, 0)?;
            }
            f.write_str(")")
        }
    }
}

/// Decimal rendering of a nonnegative rational; exact when the denominator
/// has only factors 2 and 5.
pub(crate) fn real_literal(r: &BigRational) -> String {
    let mut den = r.denom().clone();
    let mut scale = 0usize;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let ten = BigInt::from(10);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        // Not a terminating decimal; fall back to an approximation.
        let approx = num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
        return format!("{approx:?}");
    }
    scale += twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(ten, scale));
    let digits = scaled.to_integer().to_string();
    if scale == 0 {
        return format!("{digits}.0");
    }
    let padded = format!("{digits:0>width$}", width = scale + 1);
    let (int, frac) = padded.split_at(padded.len() - scale);
    format!("{int}.{frac}")
}

fn write_decls(out: &mut String, decls: &[Decl], sep: &str) {
    for (i, d) in decls.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{}: {}", d.name, d.ty);
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_node(self, false))
    }
}

fn render_node(n: &Node, main_pragma: bool) -> String {
    let mut s = String::new();
    let _ = write!(s, "node {}(", n.name);
    write_decls(&mut s, &n.inputs, "; ");
    s.push_str(") returns (");
    write_decls(&mut s, &n.outputs, "; ");
    s.push_str(");\n");
    if !n.locals.is_empty() {
        s.push_str("var\n");
        for d in &n.locals {
            let _ = writeln!(s, "  {}: {};", d.name, d.ty);
        }
    }
    s.push_str("let\n");
    for eq in &n.equations {
        let _ = writeln!(s, "  {} = {};", eq.target, eq.rhs);
    }
    for p in &n.properties {
        let _ = writeln!(s, "  --%PROPERTY {p};");
    }
    if let Some(names) = &n.ivc_annotation {
        let _ = writeln!(s, "  --%IVC {};", names.join(", "));
    }
    if main_pragma {
        s.push_str("  --%MAIN;\n");
    }
    s.push_str("tel;\n");
    s
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            let pragma = n.name == self.main && i + 1 != self.nodes.len();
            f.write_str(&render_node(n, pragma))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lustre::parse_expr;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(real_literal(&BigRational::new(1.into(), 4.into())), "0.25");
        assert_eq!(real_literal(&BigRational::new(3.into(), 1.into())), "3.0");
        assert_eq!(real_literal(&BigRational::new(1.into(), 20.into())), "0.05");
    }

    #[test]
    fn minimal_parentheses_reparse() {
        for src in [
            "a - (b - c)",
            "(a -> b) -> c",
            "a -> b -> c",
            "not (a and b) or c",
            "(if c then 1 else 2) + 3",
            "-(x + 1) * 2",
            "pre (x + 1)",
            "(a => b) => c",
            "-(-x)",
            "- -x",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} printed as {printed}");
        }
    }
}

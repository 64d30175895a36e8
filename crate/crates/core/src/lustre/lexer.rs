use num_bigint::BigInt;
use num_rational::BigRational;

use super::ast::Pos;
use super::{Diagnostic, DiagnosticKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Real(BigRational),
    /// Keyword or punctuation.
    Sym(&'static str),
    /// `--%NAME` pragma opener, e.g. `PROPERTY` or `IVC`.
    Pragma(String),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const KEYWORDS: &[&str] = &[
    "node", "returns", "var", "let", "tel", "if", "then", "else", "pre", "not", "and", "or", "div", "mod", "true",
    "false", "bool", "int", "real",
];

// Longest first so that `->` wins over `-` and `<=` over `<`.
const PUNCT: &[&str] = &["=>", "->", "<=", ">=", "<>", "(", ")", ",", ";", ":", "=", "<", ">", "+", "-", "*"];

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            if chars.get(i + 2) == Some(&'%') {
                for _ in 0..3 {
                    bump!();
                }
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    bump!();
                }
                let name: String = chars[start..i].iter().collect();
                if name.is_empty() {
                    return Err(Diagnostic::new(DiagnosticKind::Lex, pos, "empty pragma name"));
                }
                out.push(Token { tok: Tok::Pragma(name.to_ascii_uppercase()), pos });
                continue;
            }
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i + 1 >= chars.len() {
                    return Err(Diagnostic::new(DiagnosticKind::Lex, pos, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == ')' {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Sym(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let whole: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                bump!();
                let fstart = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
                let frac: String = chars[fstart..i].iter().collect();
                out.push(Token { tok: Tok::Real(decimal(&whole, &frac)), pos });
            } else if i < chars.len() && chars[i] == '.' {
                // `1.` is accepted as a real literal.
                bump!();
                out.push(Token { tok: Tok::Real(decimal(&whole, "")), pos });
            } else {
                let n: BigInt = whole.parse().expect("digits");
                out.push(Token { tok: Tok::Int(n), pos });
            }
            continue;
        }
        if let Some(p) = PUNCT.iter().find(|p| {
            let pc: Vec<char> = p.chars().collect();
            chars[i..].starts_with(&pc)
        }) {
            for _ in 0..p.len() {
                bump!();
            }
            out.push(Token { tok: Tok::Sym(p), pos });
            continue;
        }
        return Err(Diagnostic::new(DiagnosticKind::Lex, pos, format!("unexpected character {c:?}")));
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

fn decimal(whole: &str, frac: &str) -> BigRational {
    let digits: BigInt = format!("{whole}{frac}").parse().expect("digits");
    let den = num_traits::pow(BigInt::from(10), frac.len());
    BigRational::new(digits, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_comparisons() {
        assert_eq!(
            toks("a -> b => c <= d"),
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("->"),
                Tok::Ident("b".into()),
                Tok::Sym("=>"),
                Tok::Ident("c".into()),
                Tok::Sym("<="),
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reals_and_comments() {
        let t = toks("0.25 -- ignored\n(* block *) 3 --%PROPERTY");
        assert_eq!(t[0], Tok::Real(BigRational::new(1.into(), 4.into())));
        assert_eq!(t[1], Tok::Int(3.into()));
        assert_eq!(t[2], Tok::Pragma("PROPERTY".into()));
    }

    #[test]
    fn positions_track_lines() {
        let t = lex("node\n  x").unwrap();
        assert_eq!((t[1].pos.line, t[1].pos.col), (2, 3));
    }

    #[test]
    fn bad_character() {
        let err = lex("a # b").unwrap_err();
        assert_eq!(err.kind, DiagnosticKind::Lex);
    }
}

//! Incremental reader for solver responses.

use std::fmt;
use std::io::{self, BufRead};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            Sexp::Atom(_) => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads one s-expression. Returns `Ok(None)` at end of input.
pub fn read<R: BufRead>(r: &mut R) -> io::Result<Option<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let mut atom = String::new();
    let mut buf = [0u8; 1];
    loop {
        if r.read(&mut buf)? == 0 {
            if stack.is_empty() && !atom.is_empty() {
                return Ok(Some(Sexp::Atom(atom)));
            }
            if stack.is_empty() {
                return Ok(None);
            }
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "unterminated s-expression"));
        }
        let c = buf[0] as char;
        match c {
            '"' => {
                atom.push('"');
                loop {
                    if r.read(&mut buf)? == 0 {
                        return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "unterminated string"));
                    }
                    atom.push(buf[0] as char);
                    if buf[0] == b'"' {
                        // `""` is an escaped quote inside SMT-LIB strings
                        let peek = r.fill_buf()?;
                        if peek.first() == Some(&b'"') {
                            r.consume(1);
                            atom.push('"');
                            continue;
                        }
                        break;
                    }
                }
            }
            '|' => {
                atom.push('|');
                loop {
                    if r.read(&mut buf)? == 0 {
                        return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "unterminated symbol"));
                    }
                    atom.push(buf[0] as char);
                    if buf[0] == b'|' {
                        break;
                    }
                }
            }
            ';' => {
                let mut line = String::new();
                r.read_line(&mut line)?;
            }
            '(' => {
                flush(&mut atom, &mut stack);
                stack.push(Vec::new());
            }
            ')' => {
                flush(&mut atom, &mut stack);
                let done = stack.pop().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "unbalanced `)`"))?;
                match stack.last_mut() {
                    Some(parent) => parent.push(Sexp::List(done)),
                    None => return Ok(Some(Sexp::List(done))),
                }
            }
            c if c.is_whitespace() => {
                if stack.is_empty() && !atom.is_empty() {
                    return Ok(Some(Sexp::Atom(atom)));
                }
                flush(&mut atom, &mut stack);
            }
            c => atom.push(c),
        }
    }
}

fn flush(atom: &mut String, stack: &mut [Vec<Sexp>]) {
    if !atom.is_empty() {
        if let Some(top) = stack.last_mut() {
            top.push(Sexp::Atom(std::mem::take(atom)));
        }
    }
}

/// Parses every s-expression in `s`.
pub fn parse_all(s: &str) -> io::Result<Vec<Sexp>> {
    let mut r = io::BufReader::new(s.as_bytes());
    let mut out = Vec::new();
    while let Some(x) = read(&mut r)? {
        out.push(x);
    }
    Ok(out)
}

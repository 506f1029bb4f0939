//! Minimal S-expression reader for SMT-LIB2 text.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SExprError {
    #[error("unbalanced ')' at byte {0}")]
    UnexpectedClose(usize),
    #[error("unterminated list opened at byte {0}")]
    Unterminated(usize),
    #[error("unterminated quoted token starting at byte {0}")]
    UnterminatedQuote(usize),
}

impl SExpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(l) => Some(l),
            SExpr::Atom(_) => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(SExpr::atom)
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (k, it) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses every top-level expression in `text`. Bare top-level atoms (such
/// as a solver's `sat` status line) are returned as atoms.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, SExprError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<(usize, Vec<SExpr>)> = Vec::new();
    let mut top = Vec::new();
    let mut i = 0;
    let push = |stack: &mut Vec<(usize, Vec<SExpr>)>, top: &mut Vec<SExpr>, e: SExpr| match stack.last_mut() {
        Some((_, l)) => l.push(e),
        None => top.push(e),
    };
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                stack.push((i, Vec::new()));
                i += 1;
            }
            b')' => {
                let (_, l) = stack.pop().ok_or(SExprError::UnexpectedClose(i))?;
                push(&mut stack, &mut top, SExpr::List(l));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            b'|' | b'"' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != c {
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(SExprError::UnterminatedQuote(start));
                }
                i += 1;
                let tok = &text[start..i];
                // |x| and x denote the same symbol
                let tok = if c == b'|' { &tok[1..tok.len() - 1] } else { tok };
                push(&mut stack, &mut top, SExpr::Atom(tok.to_string()));
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && !matches!(bytes[i], b'(' | b')' | b';')
                {
                    i += 1;
                }
                push(&mut stack, &mut top, SExpr::Atom(text[start..i].to_string()));
            }
        }
    }
    if let Some((open, _)) = stack.pop() {
        return Err(SExprError::Unterminated(open));
    }
    Ok(top)
}

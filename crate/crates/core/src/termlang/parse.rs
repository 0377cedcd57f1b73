//! Recursive-descent parser for the term grammar.
//!
//! ```text
//! expr  := sum
//! sum   := prod (("+" | "-") prod)*
//! prod  := unary ("*" unary)*
//! unary := "-" unary | atom ("^" nat)?
//! atom  := rational | var | prim "(" expr ")" | "(" expr ")"
//! var   := "x" nat
//! prim  := "exp" | "sin" | "cos" | "bump" | "bump_" nat
//! rational := int ("/" nat)?
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::{Primitive, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<&'static str>, found: String },
    UnknownVariable(String),
    ArityOverflow { index: usize, arity: usize },
    ZeroDenominator,
    ExponentTooLarge,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "expected {}, found {found}", expected.join(" or "))
            }
            ParseErrorKind::UnknownVariable(name) => write!(f, "unknown variable `{name}`"),
            ParseErrorKind::ArityOverflow { index, arity } => {
                write!(f, "variable x{index} exceeds arity {arity}")
            }
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator"),
            ParseErrorKind::ExponentTooLarge => write!(f, "exponent too large"),
        }
    }
}

const MAX_EXPONENT: u32 = 10_000;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    arity: Option<usize>,
}

/// Parses and normalizes a term over `x0 .. x{arity-1}`.
pub fn parse_term(text: &str, arity: usize) -> Result<Term, ParseError> {
    parse_raw(text, Some(arity)).map(|t| t.normalize())
}

/// Parses without normalizing and without an arity bound.
pub(crate) fn parse_unbounded(text: &str) -> Result<Term, ParseError> {
    parse_raw(text, None)
}

/// Parses keeping the tree shape as written.
pub fn parse_raw(text: &str, arity: Option<usize>) -> Result<Term, ParseError> {
    let mut p = Parser { src: text, pos: 0, arity };
    let t = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(vec!["operator", "end of input"]));
    }
    Ok(t)
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn found(&self) -> String {
        match self.peek_char() {
            None => "end of input".into(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            offset: self.pos,
            kind: ParseErrorKind::Syntax { expected, found: self.found() },
        }
    }

    fn sum(&mut self) -> Result<Term, ParseError> {
        let mut parts = vec![self.prod()?];
        loop {
            if self.eat('+') {
                parts.push(self.prod()?);
            } else if self.eat('-') {
                parts.push(-self.prod()?);
            } else {
                return Ok(Term::sum(parts));
            }
        }
    }

    fn prod(&mut self) -> Result<Term, ParseError> {
        let mut factors = vec![self.unary()?];
        while self.eat('*') {
            factors.push(self.unary()?);
        }
        Ok(Term::product(factors))
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error(vec!["exponent"]));
            }
            let e: u32 = digits
                .parse()
                .ok()
                .filter(|e| *e <= MAX_EXPONENT)
                .ok_or(ParseError { offset: start, kind: ParseErrorKind::ExponentTooLarge })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.peek_char().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error(vec!["`)`"]));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident().to_string();
                if let Some(p) = Primitive::from_name(&name) {
                    if !self.eat('(') {
                        return Err(self.error(vec!["`(`"]));
                    }
                    let arg = self.sum()?;
                    if !self.eat(')') {
                        return Err(self.error(vec!["`)`"]));
                    }
                    return Ok(Term::prim(p, arg));
                }
                let index = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                    .and_then(|d| d.parse::<usize>().ok());
                match index {
                    None => Err(ParseError { offset: start, kind: ParseErrorKind::UnknownVariable(name) }),
                    Some(index) => match self.arity {
                        Some(arity) if index >= arity => Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::ArityOverflow { index, arity },
                        }),
                        _ => Ok(Term::var(index)),
                    },
                }
            }
            _ => Err(self.error(vec!["number", "variable", "primitive", "`(`", "`-`"])),
        }
    }

    fn rational(&mut self) -> Result<Term, ParseError> {
        let numer: BigInt = self.digits().parse().expect("digits");
        let save = self.pos;
        if self.eat('/') {
            self.skip_ws();
            let start = self.pos;
            let d = self.digits();
            if d.is_empty() {
                // Not a fraction; leave `/` for the caller to reject.
                self.pos = save;
                return Ok(Term::constant(BigRational::from_integer(numer)));
            }
            let denom: BigInt = d.parse().expect("digits");
            if denom.is_zero() {
                return Err(ParseError { offset: start, kind: ParseErrorKind::ZeroDenominator });
            }
            return Ok(Term::constant(BigRational::new(numer, denom)));
        }
        Ok(Term::constant(BigRational::from_integer(numer)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalizes() {
        let t = parse_term("x0^2 - 1", 1).unwrap();
        assert_eq!(t.to_string(), "x0^2 - 1");
        let u = parse_term("(x0 - 1)*(x0 + 1)", 1).unwrap();
        assert_eq!(t, u);
        assert_eq!(parse_term("bump(x0)", 1).unwrap(), Term::bump(Term::var(0)));
        assert_eq!(parse_term("3/6*x0", 1).unwrap().to_string(), "1/2*x0");
    }

    #[test]
    fn reports_unknown_variables_and_overflow() {
        let e = parse_term("y0 * x0 - 1", 1).unwrap_err();
        assert_eq!(e.offset, 0);
        assert_eq!(e.kind, ParseErrorKind::UnknownVariable("y0".into()));
        let e = parse_term("x0 + x3", 2).unwrap_err();
        assert_eq!(e.offset, 5);
        assert_eq!(e.kind, ParseErrorKind::ArityOverflow { index: 3, arity: 2 });
    }

    #[test]
    fn reports_syntax_errors_with_offsets() {
        let e = parse_term("x0 + * 2", 1).unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));
        let e = parse_term("(x0 + 1", 1).unwrap_err();
        assert_eq!(e.offset, 7);
        assert!(parse_term("1/0", 0).is_err());
        assert!(parse_term("x0 x0", 1).is_err());
        assert!(parse_term("exp x0", 1).is_err());
        assert!(parse_term("", 0).is_err());
    }
}

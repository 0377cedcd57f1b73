//! Printing in the same grammar the parser reads.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Node, Term};
use crate::rational::format_rational;

// Context levels: 0 = sum operand, 1 = product operand, 2 = power base.
fn level(t: &Term) -> u8 {
    match t.node() {
        Node::Sum(_) => 0,
        Node::Product(_) | Node::Neg(_) | Node::Pow(..) => 1,
        Node::Const(q) if q.is_negative() => 1,
        Node::Const(_) | Node::Var(_) | Node::Prim(..) => 2,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, t: &Term, ctx: u8) -> fmt::Result {
    let nested_product = ctx == 1 && matches!(t.node(), Node::Product(_));
    if level(t) < ctx || nested_product {
        write!(f, "(")?;
        write_term(f, t)?;
        write!(f, ")")
    } else {
        write_term(f, t)
    }
}

fn write_summand(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    if matches!(t.node(), Node::Sum(_)) {
        write_at(f, t, 1)
    } else {
        write_term(f, t)
    }
}

/// Splits a leading negative sign off a sum operand: `Some(positive part)`.
fn negated(t: &Term) -> Option<Term> {
    match t.node() {
        Node::Neg(inner) => Some(inner.clone()),
        Node::Const(q) if q.is_negative() => Some(Term::constant(-q)),
        Node::Product(fs) => {
            let c = fs.first()?.as_constant()?;
            if !c.is_negative() {
                return None;
            }
            let mut rest: Vec<Term> = fs[1..].to_vec();
            if !(-c).is_one() {
                rest.insert(0, Term::constant(-c));
            }
            Some(Term::product(rest))
        }
        _ => None,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t.node() {
        Node::Const(q) => write!(f, "{}", format_rational(q)),
        Node::Var(i) => write!(f, "x{i}"),
        Node::Sum(ts) => {
            for (k, s) in ts.iter().enumerate() {
                match (k, negated(s)) {
                    (0, _) => write_at(f, s, 0)?,
                    (_, Some(pos)) => {
                        write!(f, " - ")?;
                        write_summand(f, &pos)?;
                    }
                    (_, None) => {
                        write!(f, " + ")?;
                        write_summand(f, s)?;
                    }
                }
            }
            Ok(())
        }
        Node::Product(fs) => {
            let mut start = 0;
            if let Some(c) = fs.first().and_then(Term::as_constant) {
                if fs.len() > 1 && (c == &-BigRational::one()) {
                    write!(f, "-")?;
                    start = 1;
                }
            }
            for (k, s) in fs[start..].iter().enumerate() {
                if k > 0 {
                    write!(f, "*")?;
                }
                write_at(f, s, 1)?;
            }
            Ok(())
        }
        Node::Neg(s) => {
            write!(f, "-")?;
            write_at(f, s, 2)
        }
        Node::Pow(s, e) => {
            write_at(f, s, 2)?;
            write!(f, "^{e}")
        }
        Node::Prim(p, s) => {
            write!(f, "{}(", p.name())?;
            write_term(f, s)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

//! Symbolic smooth functions `R^n -> R`.
//!
//! A [`Term`] is an immutable expression tree over rational constants,
//! variables `x0, x1, ...` and the smooth primitives `exp`, `sin`, `cos`
//! and the flat bump. Terms are cheap to clone and safe to share between
//! threads. [`Term::normalize`] rewrites a term into its sum-of-products
//! normal form, which is what structural equality is measured against.

mod diff;
mod eval;
mod interval;
mod normal;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use eval::{abs_at_least, eval, eval_f64, eval_interval, sign_at, Value};
pub(crate) use eval::interval_at;
pub use interval::{Interval, RatBox};
pub use normal::{Atom, Monomial, Poly};
pub use parse::{parse_raw, parse_term, ParseError, ParseErrorKind};

use crate::rational::int;

/// The smooth unary primitives.
///
/// `Bump(0)` is the flat bump `exp(-1/(1-t^2))` on `|t| < 1`, zero elsewhere.
/// `Bump(k)` for `k > 0` is `bump(t) / (1-t^2)^k`, again zero for `|t| >= 1`;
/// the family is closed under differentiation, which is how derivatives of
/// `bump` stay inside the term language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Primitive {
    Exp,
    Sin,
    Cos,
    Bump(u32),
}

impl Primitive {
    pub fn name(&self) -> String {
        match self {
            Primitive::Exp => "exp".into(),
            Primitive::Sin => "sin".into(),
            Primitive::Cos => "cos".into(),
            Primitive::Bump(0) => "bump".into(),
            Primitive::Bump(k) => format!("bump_{k}"),
        }
    }

    pub fn from_name(name: &str) -> Option<Primitive> {
        match name {
            "exp" => Some(Primitive::Exp),
            "sin" => Some(Primitive::Sin),
            "cos" => Some(Primitive::Cos),
            "bump" => Some(Primitive::Bump(0)),
            _ => {
                let k = name.strip_prefix("bump_")?;
                if k.is_empty() || !k.chars().all(|c| c.is_ascii_digit()) || k.starts_with('0') {
                    return None;
                }
                k.parse().ok().map(Primitive::Bump)
            }
        }
    }

    /// Exact value at a rational argument, when it is rational.
    pub fn exact_at(&self, t: &BigRational) -> Option<BigRational> {
        match self {
            Primitive::Exp | Primitive::Cos if t.is_zero() => Some(BigRational::one()),
            Primitive::Sin if t.is_zero() => Some(BigRational::zero()),
            Primitive::Bump(_) if t * t >= BigRational::one() => Some(BigRational::zero()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(BigRational),
    Var(usize),
    Sum(Vec<Term>),
    Product(Vec<Term>),
    Neg(Term),
    Pow(Term, u32),
    Prim(Primitive, Term),
}

/// An immutable, shareable expression tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Arc<Node>);

impl Term {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn from_node(node: Node) -> Term {
        Term(Arc::new(node))
    }

    pub fn constant(q: BigRational) -> Term {
        Term::from_node(Node::Const(q))
    }

    pub fn int(n: i64) -> Term {
        Term::constant(int(n))
    }

    pub fn zero() -> Term {
        Term::int(0)
    }

    pub fn one() -> Term {
        Term::int(1)
    }

    pub fn var(index: usize) -> Term {
        Term::from_node(Node::Var(index))
    }

    pub fn sum(terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Term::from_node(Node::Sum(terms)),
        }
    }

    pub fn product(terms: Vec<Term>) -> Term {
        match terms.len() {
            0 => Term::one(),
            1 => terms.into_iter().next().unwrap(),
            _ => Term::from_node(Node::Product(terms)),
        }
    }

    pub fn pow(&self, exponent: u32) -> Term {
        Term::from_node(Node::Pow(self.clone(), exponent))
    }

    pub fn prim(p: Primitive, arg: Term) -> Term {
        Term::from_node(Node::Prim(p, arg))
    }

    pub fn exp(arg: Term) -> Term {
        Term::prim(Primitive::Exp, arg)
    }

    pub fn sin(arg: Term) -> Term {
        Term::prim(Primitive::Sin, arg)
    }

    pub fn cos(arg: Term) -> Term {
        Term::prim(Primitive::Cos, arg)
    }

    pub fn bump(arg: Term) -> Term {
        Term::prim(Primitive::Bump(0), arg)
    }

    pub fn square(&self) -> Term {
        self.pow(2)
    }

    /// `1 + f_1^2 + ... + f_k^2`, kept as a tree so its positivity stays visible.
    pub fn one_plus_squares(fs: &[Term]) -> Term {
        let mut parts = vec![Term::one()];
        parts.extend(fs.iter().map(Term::square));
        Term::sum(parts)
    }

    /// `f_1^2 + ... + f_k^2`, kept as a tree.
    pub fn sum_of_squares(fs: &[Term]) -> Term {
        Term::sum(fs.iter().map(Term::square).collect())
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant().is_some_and(Zero::is_zero)
    }

    /// Variable indices occurring anywhere in the term.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(i) => {
                out.insert(*i);
            }
            Node::Sum(ts) | Node::Product(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Node::Neg(t) | Node::Pow(t, _) | Node::Prim(_, t) => t.collect_vars(out),
        }
    }

    /// One past the largest variable index, i.e. the least admissible arity.
    pub fn min_arity(&self) -> usize {
        self.variables().last().map_or(0, |i| i + 1)
    }

    pub fn has_primitives(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var(_) => false,
            Node::Prim(..) => true,
            Node::Sum(ts) | Node::Product(ts) => ts.iter().any(Term::has_primitives),
            Node::Neg(t) | Node::Pow(t, _) => t.has_primitives(),
        }
    }

    /// Replaces every `x_i` by `images[i]`. Not normalized.
    pub fn substitute(&self, images: &[Term]) -> Term {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(i) => images.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(ts) => Term::from_node(Node::Sum(ts.iter().map(|t| t.substitute(images)).collect())),
            Node::Product(ts) => {
                Term::from_node(Node::Product(ts.iter().map(|t| t.substitute(images)).collect()))
            }
            Node::Neg(t) => Term::from_node(Node::Neg(t.substitute(images))),
            Node::Pow(t, e) => t.substitute(images).pow(*e),
            Node::Prim(p, t) => Term::prim(*p, t.substitute(images)),
        }
    }

    /// Renames variables through `map` (`x_i` becomes `x_{map(i)}`).
    pub fn rename(&self, map: impl Fn(usize) -> usize + Copy) -> Term {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(i) => Term::var(map(*i)),
            Node::Sum(ts) => Term::from_node(Node::Sum(ts.iter().map(|t| t.rename(map)).collect())),
            Node::Product(ts) => Term::from_node(Node::Product(ts.iter().map(|t| t.rename(map)).collect())),
            Node::Neg(t) => Term::from_node(Node::Neg(t.rename(map))),
            Node::Pow(t, e) => t.rename(map).pow(*e),
            Node::Prim(p, t) => Term::prim(*p, t.rename(map)),
        }
    }

    /// Shifts every variable index by `offset`.
    pub fn shift(&self, offset: usize) -> Term {
        self.rename(|i| i + offset)
    }

    pub fn normalize(&self) -> Term {
        Poly::from_term(self).to_term()
    }

    /// `Some(p)` iff the term is built without primitives.
    pub fn as_polynomial(&self) -> Option<Poly> {
        if self.has_primitives() {
            None
        } else {
            Some(Poly::from_term(self))
        }
    }

    pub fn differentiate(&self, var: usize) -> Term {
        diff::derivative(self, var).normalize()
    }

    /// Exact value at a rational point when one can be certified symbolically.
    pub fn exact_value(&self, point: &[BigRational]) -> Option<BigRational> {
        eval::exact_direct(self, point).or_else(|| {
            let images: Vec<Term> = point.iter().cloned().map(Term::constant).collect();
            self.substitute(&images).normalize().as_constant().cloned()
        })
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

impl Add for &Term {
    type Output = Term;
    fn add(self, rhs: &Term) -> Term {
        Term::sum(vec![self.clone(), rhs.clone()])
    }
}

impl Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term::sum(vec![self, rhs])
    }
}

impl Sub for &Term {
    type Output = Term;
    fn sub(self, rhs: &Term) -> Term {
        Term::sum(vec![self.clone(), -rhs])
    }
}

impl Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        &self - &rhs
    }
}

impl Mul for &Term {
    type Output = Term;
    fn mul(self, rhs: &Term) -> Term {
        Term::product(vec![self.clone(), rhs.clone()])
    }
}

impl Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::product(vec![self, rhs])
    }
}

impl Neg for &Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::from_node(Node::Neg(self.clone()))
    }
}

impl Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        -&self
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Term, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse::parse_unbounded(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn primitive_names_round_trip() {
        for p in [Primitive::Exp, Primitive::Sin, Primitive::Cos, Primitive::Bump(0), Primitive::Bump(3)] {
            assert_eq!(Primitive::from_name(&p.name()), Some(p));
        }
        assert_eq!(Primitive::from_name("bump_0"), None);
        assert_eq!(Primitive::from_name("tan"), None);
    }

    #[test]
    fn exact_primitive_values() {
        assert_eq!(Primitive::Bump(0).exact_at(&int(1)), Some(int(0)));
        assert_eq!(Primitive::Bump(2).exact_at(&rat(-3, 2)), Some(int(0)));
        assert_eq!(Primitive::Bump(0).exact_at(&rat(1, 2)), None);
        assert_eq!(Primitive::Sin.exact_at(&int(0)), Some(int(0)));
    }

    #[test]
    fn substitution_and_variables() {
        let t = parse_term("x0*x1 + sin(x2)", 3).unwrap();
        assert_eq!(t.variables().into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        let s = t.substitute(&[Term::int(2), Term::var(0), Term::zero()]).normalize();
        assert_eq!(s, parse_term("2*x0", 1).unwrap());
    }

    #[test]
    fn exact_value_uses_symbolic_cancellation() {
        let h = parse_term("bump(x0) - bump(1/2)", 1).unwrap();
        assert_eq!(h.exact_value(&[rat(1, 2)]), Some(int(0)));
        assert_eq!(h.exact_value(&[int(0)]), None);
    }
}

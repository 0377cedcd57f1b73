//! Exact, enclosed and floating-point evaluation.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::interval::{Interval, RatBox};
use super::{Node, Primitive, Term};
use crate::rational::format_rational;

/// The value of a term at a rational point.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    /// The true value lies inside the interval.
    Enclosure(Interval),
}

impl Value {
    pub fn interval(&self) -> Interval {
        match self {
            Value::Exact(q) => Interval::from_rational(q),
            Value::Enclosure(iv) => *iv,
        }
    }

    pub fn width(&self) -> f64 {
        match self {
            Value::Exact(_) => 0.0,
            Value::Enclosure(iv) => iv.width(),
        }
    }

    /// Certified sign, if one can be read off.
    pub fn sign(&self) -> Option<Ordering> {
        match self {
            Value::Exact(q) => Some(q.cmp(&BigRational::zero())),
            Value::Enclosure(iv) if iv.lo > 0.0 => Some(Ordering::Greater),
            Value::Enclosure(iv) if iv.hi < 0.0 => Some(Ordering::Less),
            Value::Enclosure(_) => None,
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Enclosure(iv) => iv.mid(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Enclosure(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{}", format_rational(q)),
            Value::Enclosure(iv) => write!(f, "{iv}"),
        }
    }
}

/// Exact value when symbolic, else an enclosure from outward-rounded arithmetic.
pub fn eval(t: &Term, point: &[BigRational]) -> Value {
    if let Some(q) = t.exact_value(point) {
        return Value::Exact(q);
    }
    let xs: Vec<Interval> = point.iter().map(Interval::from_rational).collect();
    Value::Enclosure(interval_at(t, &xs))
}

/// Enclosure of the range of `t` over the box.
pub fn eval_interval(t: &Term, region: &RatBox) -> Interval {
    interval_at(t, &region.to_intervals())
}

pub(crate) fn interval_at(t: &Term, xs: &[Interval]) -> Interval {
    match t.node() {
        Node::Const(q) => Interval::from_rational(q),
        Node::Var(i) => xs.get(*i).copied().unwrap_or_else(Interval::entire),
        Node::Sum(ts) => ts
            .iter()
            .fold(Interval::point(0.0), |acc, s| acc.add(&interval_at(s, xs))),
        Node::Product(ts) => {
            let mut acc = Interval::point(1.0);
            for s in ts {
                acc = acc.mul(&interval_at(s, xs));
                if acc.is_exact_zero() {
                    break;
                }
            }
            acc
        }
        Node::Neg(s) => interval_at(s, xs).neg(),
        Node::Pow(s, e) => interval_at(s, xs).powi(*e),
        Node::Prim(p, s) => {
            let arg = interval_at(s, xs);
            match p {
                Primitive::Exp => arg.exp(),
                Primitive::Sin => arg.sin(),
                Primitive::Cos => arg.cos(),
                Primitive::Bump(k) => arg.bump(*k),
            }
        }
    }
}

/// Exact evaluation along the tree; `None` once a primitive leaves the rationals.
pub(crate) fn exact_direct(t: &Term, point: &[BigRational]) -> Option<BigRational> {
    match t.node() {
        Node::Const(q) => Some(q.clone()),
        Node::Var(i) => point.get(*i).cloned(),
        Node::Sum(ts) => ts
            .iter()
            .try_fold(BigRational::zero(), |acc, s| Some(acc + exact_direct(s, point)?)),
        Node::Product(ts) => {
            // A zero factor decides the product even if another factor is irrational.
            let mut acc = Some(BigRational::from_integer(1.into()));
            for s in ts {
                match exact_direct(s, point) {
                    Some(v) if v.is_zero() => return Some(v),
                    Some(v) => acc = acc.map(|a| a * v),
                    None => acc = None,
                }
            }
            acc
        }
        Node::Neg(s) => exact_direct(s, point).map(|v| -v),
        Node::Pow(s, e) => {
            if *e == 0 {
                return Some(BigRational::from_integer(1.into()));
            }
            exact_direct(s, point).map(|v| num_traits::pow(v, *e as usize))
        }
        Node::Prim(p, s) => p.exact_at(&exact_direct(s, point)?),
    }
}

/// Plain floating-point evaluation, for sampling and test oracles.
pub fn eval_f64(t: &Term, x: &[f64]) -> f64 {
    match t.node() {
        Node::Const(q) => q.to_f64().unwrap_or(f64::NAN),
        Node::Var(i) => x.get(*i).copied().unwrap_or(f64::NAN),
        Node::Sum(ts) => ts.iter().map(|s| eval_f64(s, x)).sum(),
        Node::Product(ts) => ts.iter().map(|s| eval_f64(s, x)).product(),
        Node::Neg(s) => -eval_f64(s, x),
        Node::Pow(s, e) => eval_f64(s, x).powi(*e as i32),
        Node::Prim(p, s) => {
            let v = eval_f64(s, x);
            match p {
                Primitive::Exp => v.exp(),
                Primitive::Sin => v.sin(),
                Primitive::Cos => v.cos(),
                Primitive::Bump(k) => {
                    let one_minus = 1.0 - v * v;
                    if one_minus <= 0.0 {
                        0.0
                    } else {
                        (-1.0 / one_minus).exp() / one_minus.powi(*k as i32)
                    }
                }
            }
        }
    }
}

/// Certified sign of `t` at a rational point.
pub fn sign_at(t: &Term, point: &[BigRational]) -> Option<Ordering> {
    eval(t, point).sign()
}

/// `|t(point)| >= bound`, certified.
pub fn abs_at_least(t: &Term, point: &[BigRational], bound: &BigRational) -> bool {
    match eval(t, point) {
        Value::Exact(q) => &q.abs() >= bound,
        Value::Enclosure(iv) => {
            let b = Interval::from_rational(bound).hi;
            iv.lo >= b || iv.hi <= -b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::termlang::parse_term;

    #[test]
    fn polynomial_values_are_exact() {
        let t = parse_term("x0^2 - 1", 1).unwrap();
        assert_eq!(eval(&t, &[int(1)]), Value::Exact(int(0)));
        assert_eq!(eval(&t, &[rat(1, 2)]), Value::Exact(rat(-3, 4)));
    }

    #[test]
    fn bump_values_are_enclosed() {
        let b = parse_term("bump(x0)", 1).unwrap();
        let at0 = eval(&b, &[int(0)]).interval();
        assert!(at0.contains((-1.0f64).exp()) && at0.width() < 1e-15);
        // exp(-1/(1 - 1/4)) = exp(-4/3)
        let half = eval(&b, &[rat(1, 2)]).interval();
        assert!(half.contains((-4.0f64 / 3.0).exp()) && half.width() < 1e-15);
        assert_eq!(eval(&b, &[int(1)]), Value::Exact(int(0)));
    }

    #[test]
    fn interval_examples() {
        let t = parse_term("1 + x0^2", 1).unwrap();
        assert!(eval_interval(&t, &RatBox::parse("-3,3").unwrap()).lo >= 1.0);
        let x = parse_term("x0", 1).unwrap();
        assert_eq!(eval_interval(&x, &RatBox::parse("2,5").unwrap()), Interval::new(2.0, 5.0));
        let p = crate::termlang::Term::var(0) * (crate::termlang::Term::var(0) - crate::termlang::Term::one());
        let iv = eval_interval(&p, &RatBox::parse("0,1").unwrap());
        assert!(iv.lo <= -0.25 && iv.hi >= 0.0);
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!(iv.contains(x * (x - 1.0)));
        }
    }

    #[test]
    fn zero_factor_decides_product() {
        let t = parse_term("x0*exp(x0)", 1).unwrap();
        assert_eq!(exact_direct(&t, &[int(0)]), Some(int(0)));
    }
}

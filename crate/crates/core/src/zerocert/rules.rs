//! Symbolic shortcuts tried before any numerical work.

use num_traits::{Signed, Zero};

use super::{Divisor, Query, RuleTrace, Target};
use crate::termlang::{Atom, Monomial, Node, Poly, Primitive, Term};

const MAX_POWER: u32 = 4;
const MAX_TERMS: usize = 4000;

pub(super) fn apply(q: &Query) -> Option<RuleTrace> {
    for (i, c) in q.constraints.iter().enumerate() {
        if Poly::from_term(c).as_constant().is_some_and(|k| !k.is_zero()) {
            return Some(RuleTrace::VacuousConstraint { constraint: i });
        }
    }
    match &q.target {
        Target::Vanishes { term } => {
            let g = Poly::from_term(term);
            if g.is_zero() {
                return Some(RuleTrace::ZeroTarget);
            }
            ideal_multiple(&g, &q.constraints)
        }
        Target::Positive { term, guard } => {
            if guard.as_ref().is_some_and(|g| Poly::from_term(g).is_zero()) {
                return Some(RuleTrace::GuardZero);
            }
            let h = Poly::from_term(term);
            if h.is_positive_constant() {
                return Some(RuleTrace::PositiveConstant);
            }
            (positive_tree(term) || positive_poly(&h)).then_some(RuleTrace::PositiveTree)
        }
    }
}

/// Divisors whose common zeros contain the constrained zero set.
pub(super) fn divisors(constraints: &[Term]) -> Vec<(Divisor, Poly)> {
    let mut out = Vec::new();
    for (i, c) in constraints.iter().enumerate() {
        let p = Poly::from_term(c);
        if p.is_zero() {
            continue;
        }
        if p.len() == 1 {
            let (m, _) = p.leading().expect("one term");
            if m.factors().iter().any(|(_, e)| *e > 1) {
                let rad = radical_of(m);
                out.push((Divisor::MonomialRadical { index: i, term: rad.to_term() }, rad));
            }
        }
        out.push((Divisor::Constraint { index: i }, p));
    }
    out
}

/// The product of the distinct atoms of a monomial.
pub(super) fn radical_of(m: &Monomial) -> Poly {
    m.factors()
        .iter()
        .fold(Poly::constant(super::unit()), |acc, (a, _)| acc.mul(&Poly::atom(a.clone())))
}

fn ideal_multiple(g: &Poly, constraints: &[Term]) -> Option<RuleTrace> {
    let divs = divisors(constraints);
    if divs.is_empty() {
        return None;
    }
    let polys: Vec<Poly> = divs.iter().map(|(_, p)| p.clone()).collect();
    let mut power = g.clone();
    for k in 1..=MAX_POWER {
        if k > 1 {
            power = power.mul(g);
        }
        if power.len() > MAX_TERMS {
            return None;
        }
        let (quotients, remainder) = power.divide_by(&polys);
        if remainder.is_zero() {
            let (divisors, cofactors) = divs
                .iter()
                .zip(quotients)
                .filter(|(_, q)| !q.is_zero())
                .map(|((d, _), q)| (d.clone(), q.to_term()))
                .unzip();
            return Some(RuleTrace::IdealMultiple { power: k, divisors, cofactors });
        }
    }
    None
}

/// Strict positivity read off the tree shape.
pub(super) fn positive_tree(t: &Term) -> bool {
    match t.node() {
        Node::Const(q) => q.is_positive(),
        Node::Sum(ts) => ts.iter().all(nonnegative_tree) && ts.iter().any(positive_tree),
        Node::Product(ts) => ts.iter().all(positive_tree),
        Node::Pow(b, e) => *e == 0 || positive_tree(b),
        Node::Prim(Primitive::Exp, _) => true,
        Node::Var(_) | Node::Neg(_) | Node::Prim(..) => false,
    }
}

pub(super) fn nonnegative_tree(t: &Term) -> bool {
    match t.node() {
        Node::Const(q) => !q.is_negative(),
        Node::Sum(ts) | Node::Product(ts) => ts.iter().all(nonnegative_tree),
        Node::Pow(b, e) => e % 2 == 0 || nonnegative_tree(b),
        Node::Prim(Primitive::Exp | Primitive::Bump(_), _) => true,
        Node::Var(_) | Node::Neg(_) | Node::Prim(..) => false,
    }
}

/// Positive constant plus monomials that are nonnegative factor by factor.
pub(super) fn positive_poly(p: &Poly) -> bool {
    let mut constant_positive = false;
    for (m, c) in p.terms() {
        if !c.is_positive() {
            return false;
        }
        if m.is_one() {
            constant_positive = true;
            continue;
        }
        let nonneg = m.factors().iter().all(|(a, e)| {
            e % 2 == 0 || matches!(a, Atom::Prim(Primitive::Exp | Primitive::Bump(_), _))
        });
        if !nonneg {
            return false;
        }
    }
    constant_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::{parse_term, RatBox};

    fn q(cs: &[&str], g: &str) -> Query {
        Query::vanishes(
            RatBox::parse("-2,2").unwrap(),
            cs.iter().map(|c| parse_term(c, 1).unwrap()).collect(),
            parse_term(g, 1).unwrap(),
        )
    }

    #[test]
    fn divisibility_rule() {
        match apply(&q(&["x0 - 1"], "x0^2 - 1")) {
            Some(RuleTrace::IdealMultiple { power: 1, cofactors, .. }) => {
                assert_eq!(cofactors, vec![parse_term("x0 + 1", 1).unwrap()]);
            }
            other => panic!("{other:?}"),
        }
        assert!(apply(&q(&["x0^2 - 1"], "x0 - 1")).is_none());
        assert!(matches!(apply(&q(&["x0^3"], "x0")), Some(RuleTrace::IdealMultiple { power: 1, .. })));
        assert!(matches!(apply(&q(&["(x0-1)^2"], "x0 - 1")), Some(RuleTrace::IdealMultiple { power: 2, .. })));
        assert!(matches!(apply(&q(&["x0"], "x0")), Some(RuleTrace::IdealMultiple { power: 1, .. })));
    }

    #[test]
    fn trivial_rules() {
        assert_eq!(apply(&q(&["3"], "x0")), Some(RuleTrace::VacuousConstraint { constraint: 0 }));
        assert_eq!(apply(&q(&["x0"], "0")), Some(RuleTrace::ZeroTarget));
        let pos = Query::positive(RatBox::parse("-2,2").unwrap(), vec![], Term::one_plus_squares(&[Term::var(0)]), None);
        assert_eq!(apply(&pos), Some(RuleTrace::PositiveTree));
        assert!(positive_poly(&Poly::from_term(&parse_term("x0^2 + exp(x0) + 1/3", 1).unwrap())));
        assert!(!positive_poly(&Poly::from_term(&parse_term("x0^2 - x0 + 1", 1).unwrap())));
    }
}

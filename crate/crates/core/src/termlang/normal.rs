//! Sum-of-products normal form.
//!
//! Every term is read as a polynomial with rational coefficients whose
//! indeterminates ("atoms") are variables and normalized primitive
//! applications. Monomials are ordered lexicographically, atoms ascending.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Node, Primitive, Term};
use crate::upoly::UPoly;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(usize),
    Prim(Primitive, Term),
}

impl Atom {
    pub fn to_term(&self) -> Term {
        match self {
            Atom::Var(i) => Term::var(*i),
            Atom::Prim(p, arg) => Term::prim(*p, arg.clone()),
        }
    }
}

/// A power product of atoms; exponents are positive and atoms strictly ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent_of(&self, atom: &Atom) -> u32 {
        self.0.iter().find(|(a, _)| a == atom).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (atom, e) in &self.0 {
            if j < other.0.len() && &other.0[j].0 == atom {
                let f = other.0[j].1;
                if f > *e {
                    return None;
                }
                if f < *e {
                    out.push((atom.clone(), e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *atom {
                return None;
            } else {
                out.push((atom.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes one atom, returning its exponent and the cofactor.
    pub fn split_atom(&self, atom: &Atom) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(a, k)| {
                if a == atom {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }

    fn to_factor_terms(&self) -> Vec<Term> {
        self.0
            .iter()
            .map(|(a, e)| if *e == 1 { a.to_term() } else { a.to_term().pow(*e) })
            .collect()
    }
}

impl Ord for Monomial {
    /// Lexicographic: the larger monomial has the larger exponent on the
    /// smallest atom where the two differ.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial over atoms with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn atom(a: Atom) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::atom(a), BigRational::one());
        p
    }

    pub fn var(i: usize) -> Poly {
        Poly::atom(Atom::Var(i))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, k)| (n.mul(m), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &other.terms {
            for (n, k) in &self.terms {
                out.add_term(n.mul(m), k * c);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(BigRational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Multivariate division by a list of divisors in lex order.
    /// Returns the quotients and the remainder; `g = sum q_i d_i + r`.
    pub fn divide_by(&self, divisors: &[Poly]) -> (Vec<Poly>, Poly) {
        let mut quotients = vec![Poly::zero(); divisors.len()];
        let mut remainder = Poly::zero();
        let mut p = self.clone();
        while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let mut divided = false;
            for (i, d) in divisors.iter().enumerate() {
                let Some((dm, dc)) = d.leading() else { continue };
                if let Some(q) = lm.div(dm) {
                    let coeff = &lc / dc;
                    p = p.sub(&d.mul_term(&q, &coeff));
                    quotients[i].add_term(q, coeff);
                    divided = true;
                    break;
                }
            }
            if !divided {
                p.terms.remove(&lm);
                remainder.add_term(lm, lc);
            }
        }
        (quotients, remainder)
    }

    /// Coefficients of the powers of `atom`: `self = sum_j c_j * atom^j`.
    /// `None` when `atom` also occurs inside another atom.
    pub fn coefficients_in(&self, atom: &Atom) -> Option<Vec<Poly>> {
        let Atom::Var(v) = atom else { return None };
        let mut out: Vec<Poly> = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_atom(atom);
            if rest.0.iter().any(|(a, _)| matches!(a, Atom::Prim(_, t) if t.variables().contains(v))) {
                return None;
            }
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, Poly::zero());
            }
            out[e].add_term(rest, c.clone());
        }
        Some(out)
    }

    /// Dense univariate view in `x_var`, if that is the only atom.
    pub fn to_univariate(&self, var: usize) -> Option<UPoly> {
        let atom = Atom::Var(var);
        let mut coeffs: Vec<BigRational> = Vec::new();
        for (m, c) in &self.terms {
            let e = match m.0.as_slice() {
                [] => 0,
                [(a, e)] if *a == atom => *e as usize,
                _ => return None,
            };
            if coeffs.len() <= e {
                coeffs.resize(e + 1, BigRational::zero());
            }
            coeffs[e] = c.clone();
        }
        Some(UPoly::new(coeffs))
    }

    pub fn from_univariate(p: &UPoly, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in p.coeffs().iter().enumerate() {
            let m = if e == 0 {
                Monomial::one()
            } else {
                Monomial(vec![(Atom::Var(var), e as u32)])
            };
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn from_term(t: &Term) -> Poly {
        match t.node() {
            Node::Const(q) => Poly::constant(q.clone()),
            Node::Var(i) => Poly::var(*i),
            Node::Sum(ts) => ts.iter().fold(Poly::zero(), |acc, t| acc.add(&Poly::from_term(t))),
            Node::Product(ts) => ts
                .iter()
                .fold(Poly::constant(BigRational::one()), |acc, t| acc.mul(&Poly::from_term(t))),
            Node::Neg(t) => Poly::from_term(t).neg(),
            Node::Pow(t, e) => Poly::from_term(t).pow(*e),
            Node::Prim(p, arg) => {
                let narg = Poly::from_term(arg);
                if let Some(c) = narg.as_constant() {
                    if let Some(v) = p.exact_at(&c) {
                        return Poly::constant(v);
                    }
                }
                Poly::atom(Atom::Prim(*p, narg.to_term()))
            }
        }
    }

    /// The canonical tree: a sum (descending monomials) of `coeff * atom^e * ...`.
    pub fn to_term(&self) -> Term {
        let parts: Vec<Term> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut factors = m.to_factor_terms();
                if factors.is_empty() {
                    Term::constant(c.clone())
                } else if c.is_one() {
                    Term::product(factors)
                } else {
                    factors.insert(0, Term::constant(c.clone()));
                    Term::product(factors)
                }
            })
            .collect();
        Term::sum(parts)
    }

    pub fn is_positive_constant(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_positive())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::termlang::parse_term;

    fn p(s: &str, n: usize) -> Poly {
        Poly::from_term(&parse_term(s, n).unwrap())
    }

    #[test]
    fn lex_order_puts_high_powers_first() {
        let t = parse_term("1 + x1^3 + x0 + x0^2", 2).unwrap();
        assert_eq!(t.to_string(), "x0^2 + x0 + x1^3 + 1");
    }

    #[test]
    fn normalization_is_idempotent() {
        for s in ["(x0+1)*(x0-1)", "sin(x0*2 + x0)^2 - exp(0)", "bump(x0)*x1 - 3/4"] {
            let t = parse_term(s, 2).unwrap();
            assert_eq!(t.normalize(), t);
        }
    }

    #[test]
    fn division_detects_exact_factors() {
        let g = p("x0^2 - 1", 1);
        let f = p("x0 - 1", 1);
        let (q, r) = g.divide_by(&[f]);
        assert!(r.is_zero());
        assert_eq!(q[0], p("x0 + 1", 1));
        let (_, r) = p("x0", 1).divide_by(&[p("x0^2 - 1", 1)]);
        assert!(!r.is_zero());
    }

    #[test]
    fn multivariate_division_by_list() {
        let (_, r) = p("x0 + x1 - 1", 2).divide_by(&[p("x0", 2), p("x1 - 1", 2)]);
        assert!(r.is_zero());
    }

    #[test]
    fn coefficients_split_by_variable() {
        let g = p("x1^2*x0 - x1 + 3", 2);
        let cs = g.coefficients_in(&Atom::Var(1)).unwrap();
        assert_eq!(cs, vec![Poly::constant(int(3)), Poly::constant(int(-1)), Poly::var(0)]);
        assert!(p("sin(x1) + x1", 2).coefficients_in(&Atom::Var(1)).is_none());
    }

    #[test]
    fn monomial_division() {
        let a = Monomial(vec![(Atom::Var(0), 2), (Atom::Var(2), 1)]);
        let b = Monomial(vec![(Atom::Var(0), 1)]);
        assert_eq!(a.div(&b), Some(Monomial(vec![(Atom::Var(0), 1), (Atom::Var(2), 1)])));
        assert_eq!(b.div(&a), None);
        let c = Monomial(vec![(Atom::Var(1), 1)]);
        assert_eq!(a.div(&c), None);
    }
}

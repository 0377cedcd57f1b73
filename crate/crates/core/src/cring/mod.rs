//! Finitely presented C∞-rings `C∞(R^n)/<g_1, ..., g_k>` over a box.
//!
//! Elements are terms; equality of elements is radical equality (the
//! difference vanishes on the zero set of the relations inside the box),
//! always answered as a [`Verdict`].
//!
//! Localization adjoins a variable `y` with the relation `y*a - 1`. Queries
//! eliminate such variables symbolically where possible (substituting
//! `y = 1/a` and clearing denominators), so the large default box of `y`
//! only matters for terms where `y` occurs inside a primitive.

mod commute;
mod hom;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use commute::{
    check_fraction_axioms, coproduct_localize_commute, invert_idempotent, localize_chain, quotient_localize_commute,
    ChainReport, CoproductLocalizeReport, FractionCheck, IdempotentReport, QuotientLocalizeReport,
};
pub use hom::Hom;

use crate::rational::{from_f64, int, pow2, rat};
use crate::termlang::{Atom, Interval, Poly, RatBox, Term, Value};
use crate::zerocert::{self, Coord, Point, Query, QueryBudget, Target, Verdict, Witness};

/// Default interval for variables added by `adjoin_variables`.
pub fn adjoin_interval() -> (BigRational, BigRational) {
    (int(-10), int(10))
}

/// Default interval for localization variables.
pub fn localizer_interval() -> (BigRational, BigRational) {
    (-pow2(20), pow2(20))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CringError {
    #[error("term uses x{index} but the ring has {arity} variable(s)")]
    Arity { index: usize, arity: usize },
    #[error("box has dimension {found}, expected {expected}")]
    BoxDimension { expected: usize, found: usize },
    #[error("expected {expected} generator image(s), found {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("homomorphisms do not compose: target of the first is not the source of the second")]
    ChainMismatch,
    #[error("{0} is not a polynomial with integer coefficients")]
    NotIntegerPolynomial(Term),
    #[error("element is not idempotent: e^2 - e is nonzero at {}", .0.point)]
    NotIdempotent(Box<Witness>),
    #[error("too many variables for renaming search ({0}, limit 8)")]
    RenamingTooLarge(usize),
}

/// A variable `var` with the relation `var * element - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Localizer {
    pub var: usize,
    pub element: Term,
}

impl Localizer {
    pub fn relation(&self) -> Term {
        (Term::var(self.var) * self.element.clone() - Term::one()).normalize()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    names: Vec<String>,
    relations: Vec<Term>,
    region: RatBox,
    localizers: Vec<Localizer>,
}

/// Normal form, zero relations dropped, nonzero constants collapsed to `1`,
/// duplicates removed (first occurrence kept).
pub fn normalize_relations(relations: impl IntoIterator<Item = Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for r in relations {
        let mut n = r.normalize();
        if n.is_zero() {
            continue;
        }
        if n.as_constant().is_some() {
            n = Term::one();
        }
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

fn check_arity(t: &Term, arity: usize) -> Result<(), CringError> {
    match t.variables().into_iter().find(|&i| i >= arity) {
        Some(index) => Err(CringError::Arity { index, arity }),
        None => Ok(()),
    }
}

impl Presentation {
    pub fn new(arity: usize, relations: Vec<Term>, region: RatBox) -> Result<Presentation, CringError> {
        if region.dim() != arity {
            return Err(CringError::BoxDimension { expected: arity, found: region.dim() });
        }
        for r in &relations {
            check_arity(r, arity)?;
        }
        Ok(Presentation {
            names: (0..arity).map(|i| format!("x{i}")).collect(),
            relations: normalize_relations(relations),
            region,
            localizers: Vec::new(),
        })
    }

    pub fn free(region: RatBox) -> Presentation {
        Presentation::new(region.dim(), Vec::new(), region).expect("no relations")
    }

    /// The initial ring `R` (no variables).
    pub fn initial() -> Presentation {
        Presentation::free(RatBox::new(Vec::new()).expect("empty box"))
    }

    /// Reads integer polynomial relations as smooth relations.
    pub fn lift_from_cring(arity: usize, relations: Vec<Term>, region: RatBox) -> Result<Presentation, CringError> {
        for r in &relations {
            let integral = r
                .as_polynomial()
                .is_some_and(|p| p.terms().all(|(_, c)| c.is_integer()));
            if !integral {
                return Err(CringError::NotIntegerPolynomial(r.clone()));
            }
        }
        Presentation::new(arity, relations, region)
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relations(&self) -> &[Term] {
        &self.relations
    }

    pub fn region(&self) -> &RatBox {
        &self.region
    }

    pub fn localizers(&self) -> &[Localizer] {
        &self.localizers
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn check_term(&self, t: &Term) -> Result<(), CringError> {
        check_arity(t, self.arity())
    }

    /// Builds the query "target holds on Z(relations, extra) in the box",
    /// with localization variables eliminated where the terms allow it.
    pub fn query(&self, extra: &[Term], target: Target) -> Query {
        let mut constraints: Vec<Term> = self.relations.iter().chain(extra).cloned().collect();
        let mut target = target;
        for loc in self.localizers.iter().rev() {
            if let Some((c, t)) = eliminate(loc, &constraints, &target) {
                constraints = c;
                target = t;
            }
        }
        Query { region: self.region.clone(), constraints, target }
    }

    pub fn decide(&self, extra: &[Term], target: Target, budget: &QueryBudget) -> Verdict {
        zerocert::decide(&self.query(extra, target), budget)
    }

    /// `f` vanishes on the zero set: `f` is zero in the ring up to radical.
    pub fn radical_zero(&self, f: &Term, budget: &QueryBudget) -> Verdict {
        self.decide(&[], Target::Vanishes { term: f.clone() }, budget)
    }

    /// Radical equality of two elements.
    pub fn equal(&self, f: &Term, g: &Term, budget: &QueryBudget) -> Verdict {
        self.radical_zero(&(f.clone() - g.clone()), budget)
    }

    /// `f` has no zero on the zero set, so it is a unit.
    pub fn is_invertible(&self, f: &Term, budget: &QueryBudget) -> Verdict {
        self.decide(std::slice::from_ref(f), Target::Vanishes { term: Term::one() }, budget)
    }

    /// The zero set in the box is empty (the ring is trivial).
    pub fn is_trivial(&self, budget: &QueryBudget) -> Verdict {
        self.decide(&[], Target::Vanishes { term: Term::one() }, budget)
    }

    /// `h > 0` on the zero set.
    pub fn positive(&self, h: &Term, budget: &QueryBudget) -> Verdict {
        self.decide(&[], Target::Positive { term: h.clone(), guard: None }, budget)
    }

    pub fn quotient(&self, extra: &[Term]) -> Result<(Presentation, Hom), CringError> {
        for t in extra {
            self.check_term(t)?;
        }
        let mut q = self.clone();
        q.relations = normalize_relations(self.relations.iter().chain(extra).cloned());
        let hom = Hom::inclusion(self, &q);
        Ok((q, hom))
    }

    pub fn adjoin_variables(&self, k: usize) -> (Presentation, Hom) {
        let mut p = self.clone();
        let (lo, hi) = adjoin_interval();
        for _ in 0..k {
            p.names.push(format!("x{}", p.names.len()));
            p.region.push(lo.clone(), hi.clone());
        }
        let hom = Hom::inclusion(self, &p);
        (p, hom)
    }

    pub fn coproduct(&self, other: &Presentation) -> (Presentation, Hom, Hom) {
        let n = self.arity();
        let mut names = self.names.clone();
        names.extend((0..other.arity()).map(|i| format!("x{}", n + i)));
        let p = Presentation {
            names,
            relations: normalize_relations(self.relations.iter().cloned().chain(other.relations.iter().map(|r| r.shift(n)))),
            region: self.region.concat(&other.region),
            localizers: self
                .localizers
                .iter()
                .cloned()
                .chain(other.localizers.iter().map(|l| Localizer { var: l.var + n, element: l.element.shift(n) }))
                .collect(),
        };
        let left = Hom::inclusion(self, &p);
        let right = Hom::new(other.clone(), p.clone(), (0..other.arity()).map(|i| Term::var(n + i)).collect())
            .expect("image count matches");
        (p, left, right)
    }

    /// Inverts each listed element with its own fresh variable.
    pub fn localize_set(&self, elements: &[Term]) -> Result<Localized, CringError> {
        let mut p = self.clone();
        let mut fresh = Vec::new();
        for a in elements {
            self.check_term(a)?;
            let var = p.arity();
            p.names.push(format!("x{var}"));
            let (lo, hi) = localizer_interval();
            p.region.push(lo, hi);
            let loc = Localizer { var, element: a.normalize() };
            p.relations = normalize_relations(p.relations.iter().cloned().chain([loc.relation()]));
            p.localizers.push(loc);
            fresh.push(var);
        }
        let inclusion = Hom::inclusion(self, &p);
        Ok(Localized { ring: p, inverted: elements.iter().map(Term::normalize).collect(), fresh, inclusion })
    }

    pub fn localize(&self, a: &Term) -> Result<Localized, CringError> {
        self.localize_set(std::slice::from_ref(a))
    }

    /// Variables that are not localization variables.
    pub fn base_vars(&self) -> Vec<usize> {
        (0..self.arity()).filter(|v| self.localizers.iter().all(|l| l.var != *v)).collect()
    }

    /// Certified points of the zero set, at most `want` of them: a grid when
    /// the base ring is free, otherwise isolated zeros; localization
    /// coordinates are lifted as `1/a`.
    pub fn sample_points(&self, want: usize, budget: &QueryBudget) -> Vec<Point> {
        let loc_relations: Vec<Term> = self.localizers.iter().map(Localizer::relation).collect();
        let base_relations: Vec<Term> =
            self.relations.iter().filter(|r| !loc_relations.contains(r)).cloned().collect();
        let loc_vars: Vec<usize> = self.localizers.iter().map(|l| l.var).collect();
        let base_only = base_relations.iter().all(|r| r.variables().iter().all(|v| !loc_vars.contains(v)));
        if !base_only {
            let z = zerocert::find_zeros(&self.region, &self.relations, budget);
            return z.points.into_iter().take(want).collect();
        }
        let base_vars = self.base_vars();
        let mut out = Vec::new();
        if base_relations.is_empty() {
            for resolution in grid_resolutions(base_vars.len(), want) {
                out = self
                    .grid(&base_vars, resolution)
                    .into_iter()
                    .filter_map(|p| self.lift(p))
                    .collect();
                if out.len() >= want {
                    break;
                }
            }
        } else {
            let z = zerocert::find_zeros(&self.region, &base_relations, budget);
            out = z.points.into_iter().filter_map(|p| self.lift(p)).collect();
        }
        out.truncate(want);
        out
    }

    /// Grid points with `resolution` steps per base variable; other
    /// coordinates at zero.
    pub fn grid(&self, vars: &[usize], resolution: usize) -> Vec<Point> {
        let mut points = vec![vec![BigRational::zero(); self.arity()]];
        for &v in vars {
            let (lo, hi) = (self.region.lo(v), self.region.hi(v));
            let steps = if lo == hi { 0 } else { resolution.max(1) };
            let mut next = Vec::new();
            for p in &points {
                for k in 0..=steps {
                    let mut q = p.clone();
                    q[v] = if steps == 0 { lo.clone() } else { lo + (hi - lo) * rat(k as i64, steps as i64) };
                    next.push(q);
                }
            }
            points = next;
        }
        points.into_iter().map(Point::exact).collect()
    }

    /// Sets each localization coordinate to `1/a` at the point, if `a` is
    /// certified nonzero there.
    pub fn lift(&self, mut point: Point) -> Option<Point> {
        for loc in &self.localizers {
            if point.sign_of(&loc.element)? == std::cmp::Ordering::Equal { return None }
            point.coords[loc.var] = match point.value_of(&loc.element) {
                Value::Exact(v) => Coord::exact(BigRational::one() / v),
                Value::Enclosure(iv) => {
                    let inv = Interval::point(1.0).div(&iv);
                    Coord::Range { lo: from_f64(inv.lo)?, hi: from_f64(inv.hi)? }
                }
            };
        }
        Some(point)
    }
}

fn grid_resolutions(dims: usize, want: usize) -> Vec<usize> {
    if dims == 0 {
        return vec![0];
    }
    let mut base = 1usize;
    while (base + 1).pow(dims as u32) < want && base < 64 {
        base += 1;
    }
    vec![base, base * 2, base * 4, base * 8]
}

/// Eliminates one localization variable from all terms, if it occurs only
/// polynomially. The relation `y*a - 1` is dropped and `a != 0` is added as
/// a side condition on the target.
fn eliminate(loc: &Localizer, constraints: &[Term], target: &Target) -> Option<(Vec<Term>, Target)> {
    let relation = loc.relation();
    let pos = constraints.iter().position(|c| c.normalize() == relation)?;
    let y = Atom::Var(loc.var);
    let a = Poly::from_term(&loc.element);
    let coefficients = |t: &Term| Poly::from_term(t).coefficients_in(&y);
    let clear = |coeffs: &[Poly], degree: usize| -> Term {
        let mut acc = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            acc = acc.add(&c.mul(&a.pow((degree - k) as u32)));
        }
        acc.to_term()
    };
    let mut out = Vec::with_capacity(constraints.len() - 1);
    for (i, c) in constraints.iter().enumerate() {
        if i == pos {
            continue;
        }
        let coeffs = coefficients(c)?;
        out.push(clear(&coeffs, coeffs.len().saturating_sub(1)));
    }
    let target = match target {
        Target::Vanishes { term } => {
            let coeffs = coefficients(term)?;
            let cleared = clear(&coeffs, coeffs.len().saturating_sub(1));
            Target::Vanishes { term: (loc.element.clone() * cleared).normalize() }
        }
        Target::Positive { term, guard } => {
            let coeffs = coefficients(term)?;
            let degree = coeffs.len().saturating_sub(1);
            let even = degree + degree % 2;
            let cleared = clear(&coeffs, even);
            let guard = match guard {
                Some(g) => {
                    let gc = coefficients(g)?;
                    clear(&gc, gc.len().saturating_sub(1))
                }
                None => Term::one(),
            };
            Target::Positive { term: cleared, guard: Some((loc.element.clone() * guard).normalize()) }
        }
    };
    Some((out, target))
}

impl fmt::Display for Presentation {
    /// In session-script form: `vars=N relations=[...] box=...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relations.iter().map(Term::to_string).collect();
        write!(f, "vars={} relations=[{}] box={}", self.arity(), rels.join("; "), self.region)
    }
}

/// A localization `A{S^-1}` with its inclusion `A -> A{S^-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Localized {
    pub ring: Presentation,
    pub inverted: Vec<Term>,
    /// The fresh variable of each inverted element.
    pub fresh: Vec<usize>,
    pub inclusion: Hom,
}

/// A renaming `pi` with `rename(p.relations, pi) = q.relations` as
/// multisets, if one exists.
pub fn find_renaming(p: &Presentation, q: &Presentation) -> Result<Option<Vec<usize>>, CringError> {
    let n = p.arity();
    if n != q.arity() || p.relations.len() != q.relations.len() {
        return Ok(None);
    }
    if n > 8 {
        return Err(CringError::RenamingTooLarge(n));
    }
    let sig_p: Vec<Vec<(u32, usize)>> = (0..n).map(|v| signature(&p.relations, v)).collect();
    let sig_q: Vec<Vec<(u32, usize)>> = (0..n).map(|v| signature(&q.relations, v)).collect();
    let mut target: Vec<Term> = q.relations.clone();
    target.sort();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        i: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sig_p: &[Vec<(u32, usize)>],
        sig_q: &[Vec<(u32, usize)>],
        rels: &[Term],
        target: &[Term],
    ) -> bool {
        let n = perm.len();
        if i == n {
            let mut renamed: Vec<Term> = rels.iter().map(|r| r.rename(|v| perm[v]).normalize()).collect();
            renamed.sort();
            return renamed == target;
        }
        for j in 0..n {
            if used[j] || sig_p[i] != sig_q[j] {
                continue;
            }
            used[j] = true;
            perm[i] = j;
            if search(i + 1, perm, used, sig_p, sig_q, rels, target) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    let found = search(0, &mut perm, &mut used, &sig_p, &sig_q, &p.relations, &target);
    Ok(found.then_some(perm))
}

/// Renaming-invariant profile of a variable: per relation containing it,
/// (highest exponent, number of monomials), sorted.
fn signature(relations: &[Term], v: usize) -> Vec<(u32, usize)> {
    let atom = Atom::Var(v);
    let mut out: Vec<(u32, usize)> = relations
        .iter()
        .filter(|r| r.variables().contains(&v))
        .map(|r| {
            let p = Poly::from_term(r);
            let e = p.terms().map(|(m, _)| m.exponent_of(&atom)).max().unwrap_or(0);
            (e, p.len())
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::parse_term;

    fn t(s: &str, n: usize) -> Term {
        parse_term(s, n).unwrap()
    }

    #[test]
    fn elimination_clears_denominators() {
        let p = Presentation::free(RatBox::parse("-2,2").unwrap());
        let l = p.localize(&t("x0", 1)).unwrap().ring;
        let q = l.query(&[], Target::Vanishes { term: t("x1*x0 - 1", 2) });
        assert!(q.constraints.is_empty());
        assert_eq!(q.target, Target::Vanishes { term: t("x0*(1 - 1)", 1) });
        let q = l.query(&[], Target::Vanishes { term: t("x1^2", 2) });
        assert_eq!(q.target, Target::Vanishes { term: t("x0", 1) });
        let q = l.query(&[], Target::Vanishes { term: t("exp(x1)", 2) });
        assert_eq!(q.constraints, vec![t("x0*x1 - 1", 2)]);
    }

    #[test]
    fn renaming_search() {
        let a = Presentation::new(2, vec![t("x0^2 - x1", 2)], RatBox::parse("0,1;0,1").unwrap()).unwrap();
        let b = Presentation::new(2, vec![t("x1^2 - x0", 2)], RatBox::parse("0,1;0,1").unwrap()).unwrap();
        assert_eq!(find_renaming(&a, &b).unwrap(), Some(vec![1, 0]));
        let c = Presentation::new(2, vec![t("x1^2 + x0", 2)], RatBox::parse("0,1;0,1").unwrap()).unwrap();
        assert_eq!(find_renaming(&a, &c).unwrap(), None);
    }

    #[test]
    fn grid_includes_endpoints() {
        let p = Presentation::free(RatBox::parse("0,1").unwrap());
        assert_eq!(p.grid(&[0], 5).len(), 6);
    }
}

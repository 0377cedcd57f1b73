//! Basic opens `D(a)` of the smooth spectrum, covers, point samples,
//! spectral maps, finite product spectra and the constructible basis.
//!
//! Primes are only ever represented by points `x` of the zero set (the
//! maximal ideals `ker ev_x`); everything else is decided through zero sets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cring::{CringError, Hom, Presentation};
use crate::radical::radical_member;
use crate::rational::int;
use crate::termlang::{interval_at, Interval, RatBox, Term, Value};
use crate::zerocert::{Point, QueryBudget, SignClaim, Target, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpectrumError {
    #[error("basic opens belong to different presentations")]
    DifferentRings,
    #[error("factor boxes disagree on a shared coordinate")]
    BoxMismatch,
    #[error("empty list")]
    Empty,
    #[error(transparent)]
    Ring(#[from] CringError),
}

/// `D(a)`: the primes not containing `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicOpen {
    pub ring: Presentation,
    pub term: Term,
}

impl BasicOpen {
    pub fn new(ring: &Presentation, term: Term) -> Result<BasicOpen, SpectrumError> {
        ring.check_term(&term)?;
        Ok(BasicOpen { ring: ring.clone(), term })
    }

    pub fn whole(ring: &Presentation) -> BasicOpen {
        BasicOpen { ring: ring.clone(), term: Term::one() }
    }

    fn same_ring(&self, other: &BasicOpen) -> Result<(), SpectrumError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(SpectrumError::DifferentRings)
        }
    }
}

/// `D(a) ⊆ D(b)`, i.e. `Z(b) ∩ Z(I) ⊆ Z(a)`.
pub fn basic_leq(a: &BasicOpen, b: &BasicOpen, budget: &QueryBudget) -> Result<Verdict, SpectrumError> {
    a.same_ring(b)?;
    Ok(a.ring.decide(std::slice::from_ref(&b.term), Target::Vanishes { term: a.term.clone() }, budget))
}

pub fn basic_equal(a: &BasicOpen, b: &BasicOpen, budget: &QueryBudget) -> Result<Verdict, SpectrumError> {
    Ok(basic_leq(a, b, budget)?.and(basic_leq(b, a, budget)?))
}

/// `D(a) ∩ D(b) = D(ab)`.
pub fn basic_meet(a: &BasicOpen, b: &BasicOpen) -> Result<BasicOpen, SpectrumError> {
    a.same_ring(b)?;
    Ok(BasicOpen { ring: a.ring.clone(), term: a.term.clone() * b.term.clone() })
}

/// `D(a) ∪ D(b) = D(a^2 + b^2)`.
pub fn basic_join(a: &BasicOpen, b: &BasicOpen) -> Result<BasicOpen, SpectrumError> {
    a.same_ring(b)?;
    Ok(BasicOpen { ring: a.ring.clone(), term: a.term.square() + b.term.square() })
}

#[derive(Clone, Debug)]
pub struct CoverReport {
    pub verdict: Verdict,
    /// Indices of a subfamily that still covers, pruned one index at a time.
    pub subcover: Vec<usize>,
}

/// The `D(a_i)` cover the spectrum: the `a_i` have no common zero on `Z(I)`.
pub fn covers(p: &Presentation, family: &[Term], budget: &QueryBudget) -> Result<CoverReport, SpectrumError> {
    if family.is_empty() {
        return Err(SpectrumError::Empty);
    }
    for a in family {
        p.check_term(a)?;
    }
    let covered = |idx: &[usize]| {
        let terms: Vec<Term> = idx.iter().map(|&i| family[i].clone()).collect();
        p.decide(&terms, Target::Vanishes { term: Term::one() }, budget)
    };
    let mut subcover: Vec<usize> = (0..family.len()).collect();
    let verdict = covered(&subcover);
    if !verdict.is_proved() {
        return Ok(CoverReport { verdict, subcover: Vec::new() });
    }
    let mut k = 0;
    while k < subcover.len() {
        let mut fewer = subcover.clone();
        fewer.remove(k);
        if !fewer.is_empty() && covered(&fewer).is_proved() {
            subcover = fewer;
        } else {
            k += 1;
        }
    }
    Ok(CoverReport { verdict, subcover })
}

/// A point of `Z(I)`, standing for the maximal ideal `ker ev_x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub point: Point,
    /// Every relation vanishes at the point.
    pub on_zero_set: Verdict,
}

impl SpectrumPoint {
    pub fn new(p: &Presentation, point: Point) -> SpectrumPoint {
        let on_zero_set = Verdict::all(p.relations().iter().map(|r| Verdict::from_sign(&point, r, SignClaim::Zero)));
        SpectrumPoint { point, on_zero_set }
    }

    /// One line of space-separated coordinates, for plotting.
    pub fn export_line(&self) -> String {
        let parts: Vec<String> = self
            .point
            .coords
            .iter()
            .map(|c| match c.as_exact() {
                Some(q) => crate::rational::format_rational(q),
                None => format!("{:.17e}", c.approx()),
            })
            .collect();
        parts.join(" ")
    }
}

/// Points of `Z(I)` in the box: the grid with `resolution` steps per
/// variable for a free ring, otherwise the isolated zeros. Points whose
/// membership is refuted are dropped.
pub fn sample_points(p: &Presentation, resolution: usize, budget: &QueryBudget) -> Vec<SpectrumPoint> {
    let localizer_relations: Vec<Term> = p.localizers().iter().map(|l| l.relation()).collect();
    let base_free = p.relations().iter().all(|r| localizer_relations.contains(r));
    let points: Vec<Point> = if base_free {
        p.grid(&p.base_vars(), resolution).into_iter().filter_map(|x| p.lift(x)).collect()
    } else {
        p.sample_points(4096, budget)
    };
    points
        .into_iter()
        .map(|x| SpectrumPoint::new(p, x))
        .filter(|x| !x.on_zero_set.is_refuted())
        .collect()
}

/// `m_x ∈ D(a)`: `a(x) != 0`.
pub fn point_in_open(x: &SpectrumPoint, open: &BasicOpen) -> Verdict {
    Verdict::from_sign(&x.point, &open.term, SignClaim::Nonzero)
}

/// A term `t` with `x` outside `D(t)` and `y` inside, both certified:
/// `x_i - c` when `x` has an exact coordinate `c` where `y` differs,
/// otherwise a bump centred near `y_i` whose support misses `x_i`.
pub fn separating_term(x: &SpectrumPoint, y: &SpectrumPoint) -> Option<Term> {
    let certified = |t: &Term| {
        Verdict::from_sign(&x.point, t, SignClaim::Zero).is_proved()
            && Verdict::from_sign(&y.point, t, SignClaim::Nonzero).is_proved()
    };
    let pairs = || x.point.coords.iter().zip(&y.point.coords).enumerate();
    for (i, (cx, _)) in pairs() {
        if let Some(c) = cx.as_exact() {
            let t = Term::var(i) - Term::constant(c.clone());
            if certified(&t) {
                return Some(t);
            }
        }
    }
    for (i, (cx, cy)) in pairs() {
        let gap = if cx.hi() < cy.lo() {
            cy.lo() - cx.hi()
        } else if cy.hi() < cx.lo() {
            cx.lo() - cy.hi()
        } else {
            continue;
        };
        let centre = crate::rational::midpoint(cy.lo(), cy.hi());
        let radius = (cy.hi() - cy.lo() + gap) / int(2);
        let t = Term::bump((Term::var(i) - Term::constant(centre)) * Term::constant(radius.recip())).normalize();
        if certified(&t) {
            return Some(t);
        }
    }
    None
}

/// A point of a finite product spectrum: a point of one factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductPoint {
    pub factor: usize,
    pub point: SpectrumPoint,
}

#[derive(Clone, Debug)]
pub struct ProductOpen {
    /// One term per factor.
    pub element: Vec<Term>,
    /// Indices of product points in `D(element)`, computed factorwise.
    pub members: Vec<usize>,
    /// Factorwise and glued membership agree at every matched point.
    pub agree: bool,
}

#[derive(Clone, Debug)]
pub struct ProductSpectrum {
    pub points: Vec<ProductPoint>,
    /// The product as one presentation: a selector variable `t` with
    /// `prod (t - i) = 0`, factor `i` living on the slice `t = i`.
    pub glued: Presentation,
    pub glued_points: Vec<Point>,
    /// Glued points and factor points correspond one to one.
    pub matched: bool,
    pub opens: Vec<ProductOpen>,
}

/// Lagrange basis polynomial for node `i` among `0..n`, in variable `t`.
fn selector(i: usize, n: usize, t: usize) -> Term {
    let factors: Vec<Term> = (0..n)
        .filter(|&j| j != i)
        .map(|j| {
            (Term::var(t) - Term::int(j as i64)) * Term::constant(crate::rational::rat(1, i as i64 - j as i64))
        })
        .collect();
    Term::product(factors).normalize()
}

fn glue(factors: &[Presentation]) -> Result<(Presentation, usize), SpectrumError> {
    let width = factors.iter().map(Presentation::arity).max().unwrap_or(0);
    let mut bounds = Vec::new();
    for l in 0..width {
        let mut shared = factors.iter().filter(|f| f.arity() > l).map(|f| (f.region().lo(l), f.region().hi(l)));
        let first = shared.next().expect("some factor has this coordinate");
        if shared.any(|b| b != first) {
            return Err(SpectrumError::BoxMismatch);
        }
        bounds.push((first.0.clone(), first.1.clone()));
    }
    let n = factors.len();
    bounds.push((int(0), int(n as i64 - 1)));
    let t = width;
    let mut relations = vec![Term::product((0..n).map(|i| Term::var(t) - Term::int(i as i64)).collect())];
    for (i, f) in factors.iter().enumerate() {
        let s = selector(i, n, t);
        for r in f.relations() {
            relations.push(s.clone() * r.clone());
        }
        for l in f.arity()..width {
            relations.push(s.clone() * Term::var(l));
        }
    }
    let region = RatBox::new(bounds).expect("ordered bounds");
    Ok((Presentation::new(width + 1, relations, region)?, t))
}

fn glued_element(element: &[Term], t: usize) -> Term {
    let n = element.len();
    Term::sum(element.iter().enumerate().map(|(i, a)| selector(i, n, t) * a.clone()).collect()).normalize()
}

fn close(a: &Point, b: &[f64]) -> bool {
    a.approx().iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

/// The spectrum of a finite product, factorwise and through the glued
/// presentation; each listed element (one term per factor) is checked on
/// both sides.
pub fn product_spectrum(
    factors: &[Presentation],
    elements: &[Vec<Term>],
    resolution: usize,
    budget: &QueryBudget,
) -> Result<ProductSpectrum, SpectrumError> {
    if factors.is_empty() {
        return Err(SpectrumError::Empty);
    }
    let (glued, t) = glue(factors)?;
    let points: Vec<ProductPoint> = factors
        .iter()
        .enumerate()
        .flat_map(|(i, f)| sample_points(f, resolution, budget).into_iter().map(move |point| ProductPoint { factor: i, point }))
        .collect();
    let glued_points = sample_points(&glued, resolution, budget).into_iter().map(|x| x.point).collect::<Vec<_>>();
    let partner: Vec<Option<usize>> = points
        .iter()
        .map(|pp| {
            let mut coords = pp.point.point.approx();
            coords.resize(t, 0.0);
            coords.push(pp.factor as f64);
            let hits: Vec<usize> = (0..glued_points.len()).filter(|&g| close(&glued_points[g], &coords)).collect();
            (hits.len() == 1).then(|| hits[0])
        })
        .collect();
    let mut used: Vec<usize> = partner.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let matched = partner.iter().all(Option::is_some) && used.len() == glued_points.len();
    let mut opens = Vec::new();
    for element in elements {
        if element.len() != factors.len() {
            return Err(SpectrumError::DifferentRings);
        }
        for (a, f) in element.iter().zip(factors) {
            f.check_term(a)?;
        }
        let g = glued_element(element, t);
        let mut members = Vec::new();
        let mut agree = true;
        for (k, pp) in points.iter().enumerate() {
            let here = Verdict::from_sign(&pp.point.point, &element[pp.factor], SignClaim::Nonzero);
            if here.is_proved() {
                members.push(k);
            }
            if let Some(gi) = partner[k] {
                let there = Verdict::from_sign(&glued_points[gi], &g, SignClaim::Nonzero);
                agree &= here.kind() == there.kind();
            } else {
                agree = false;
            }
        }
        opens.push(ProductOpen { element: element.clone(), members, agree });
    }
    Ok(ProductSpectrum { points, glued, glued_points, matched, opens })
}

#[derive(Clone, Debug)]
pub struct SpectralPointCheck {
    pub point: SpectrumPoint,
    /// `y ∈ D(h(a))`.
    pub preimage_side: Verdict,
    /// The image point lies in `D(a)`; `None` when not certified.
    pub image_side: Option<bool>,
}

impl SpectralPointCheck {
    pub fn consistent(&self) -> bool {
        match (self.preimage_side.is_decided(), self.image_side) {
            (true, Some(inside)) => self.preimage_side.is_proved() == inside,
            _ => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralMapReport {
    pub preimage: BasicOpen,
    pub checks: Vec<SpectralPointCheck>,
}

impl SpectralMapReport {
    pub fn agree(&self) -> bool {
        self.checks.iter().all(SpectralPointCheck::consistent)
    }
}

/// Evaluates the images of the generators at `y`, then `a` at that point.
fn image_in_open(h: &Hom, a: &Term, y: &Point) -> Option<bool> {
    let values: Vec<Value> = h.images.iter().map(|img| y.value_of(img)).collect();
    let sign = match values.iter().map(|v| v.as_exact().cloned()).collect::<Option<Vec<_>>>() {
        Some(exact) => crate::termlang::eval(a, &exact).sign(),
        None => {
            let xs: Vec<Interval> = values.iter().map(Value::interval).collect();
            let iv = interval_at(a, &xs);
            if iv.excludes_zero() {
                Some(if iv.lo > 0.0 { std::cmp::Ordering::Greater } else { std::cmp::Ordering::Less })
            } else if iv.is_exact_zero() {
                Some(std::cmp::Ordering::Equal)
            } else {
                None
            }
        }
    };
    sign.map(|s| s != std::cmp::Ordering::Equal)
}

/// The preimage of `D(a)` under `h*` is `D(h(a))`, checked at sampled
/// points of the target spectrum.
pub fn spectral_map(h: &Hom, open: &BasicOpen, resolution: usize, budget: &QueryBudget) -> Result<SpectralMapReport, SpectrumError> {
    if open.ring != h.source {
        return Err(SpectrumError::DifferentRings);
    }
    let preimage = BasicOpen::new(&h.target, h.apply(&open.term))?;
    let checks = sample_points(&h.target, resolution, budget)
        .into_iter()
        .map(|y| SpectralPointCheck {
            preimage_side: point_in_open(&y, &preimage),
            image_side: image_in_open(h, &open.term, &y.point),
            point: y,
        })
        .collect();
    Ok(SpectralMapReport { preimage, checks })
}

/// `D(a) ∩ Z(b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructibleBasic {
    pub open: Term,
    pub closed: Term,
}

impl ConstructibleBasic {
    pub fn new(open: Term, closed: Term) -> ConstructibleBasic {
        ConstructibleBasic { open, closed }
    }

    pub fn contains(&self, x: &Point) -> Verdict {
        Verdict::from_sign(x, &self.open, SignClaim::Nonzero).and(Verdict::from_sign(x, &self.closed, SignClaim::Zero))
    }
}

/// `(a1 a2, b1^2 + b2^2)`.
pub fn constructible_meet(c1: &ConstructibleBasic, c2: &ConstructibleBasic) -> ConstructibleBasic {
    ConstructibleBasic::new(c1.open.clone() * c2.open.clone(), c1.closed.square() + c2.closed.square())
}

#[derive(Clone, Debug)]
pub struct NilradicalReport {
    pub membership: Verdict,
    /// Whether `f` vanishes at each sampled point (and at the refutation
    /// witness, if any).
    pub points: Vec<(Point, Verdict)>,
}

impl NilradicalReport {
    pub fn consistent(&self) -> bool {
        if self.membership.is_proved() {
            self.points.iter().all(|(_, v)| !v.is_refuted())
        } else if self.membership.is_refuted() {
            self.points.iter().any(|(_, v)| v.is_refuted())
        } else {
            true
        }
    }
}

/// Radical membership against vanishing at every sampled point of `Z(I)`.
pub fn nilradical_point_test(
    p: &Presentation,
    f: &Term,
    resolution: usize,
    budget: &QueryBudget,
) -> Result<NilradicalReport, SpectrumError> {
    let membership = radical_member(p, f, budget).map_err(|e| match e {
        crate::radical::RadicalError::Ring(r) => SpectrumError::Ring(r),
        crate::radical::RadicalError::Incompatible => SpectrumError::DifferentRings,
    })?;
    let mut samples: Vec<Point> = sample_points(p, resolution, budget).into_iter().map(|x| x.point).collect();
    if let Some(w) = membership.witness() {
        samples.push(w.point.clone());
    }
    let points = samples
        .into_iter()
        .map(|x| {
            let v = Verdict::from_sign(&x, f, SignClaim::Zero);
            (x, v)
        })
        .collect();
    Ok(NilradicalReport { membership, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::parse_term;

    fn t(s: &str, n: usize) -> Term {
        parse_term(s, n).unwrap()
    }

    #[test]
    fn selectors_pick_their_node() {
        for n in 1..4 {
            for i in 0..n {
                for j in 0..n {
                    let v = selector(i, n, 0).exact_value(&[int(j as i64)]).unwrap();
                    assert_eq!(v, int((i == j) as i64));
                }
            }
        }
    }

    #[test]
    fn glued_presentation_of_two_points() {
        let region = RatBox::parse("-2,2").unwrap();
        let a = Presentation::new(1, vec![t("x0", 1)], region.clone()).unwrap();
        let b = Presentation::new(1, vec![t("x0 - 1", 1)], region).unwrap();
        let (g, sel) = glue(&[a, b]).unwrap();
        assert_eq!(sel, 1);
        let z = crate::zerocert::find_zeros(g.region(), g.relations(), &QueryBudget::default());
        assert!(z.complete);
        assert_eq!(z.points.len(), 2);
    }
}

//! The structure presheaf on basic opens: sections over `D(a)` are
//! fractions whose denominators have no zero on `Z(I) ∩ {a != 0}`, i.e.
//! elements of `A{a^-1}`. Restriction keeps the fraction; evaluation at a
//! point of the open is the residue map of the stalk.

use thiserror::Error;

use crate::cring::{CringError, Localized};
use crate::spectrum::{basic_leq, point_in_open, sample_points, BasicOpen, SpectrumError, SpectrumPoint};
use crate::termlang::{interval_at, Interval, Term, Value};
use crate::zerocert::{Point, QueryBudget, SignClaim, Target, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("target open is not certified to lie inside the source open ({0})")]
    NotSmaller(Verdict),
    #[error("denominator is not certified to be invertible on the open ({0})")]
    Denominator(Verdict),
    #[error("point is not certified to lie in the open ({0})")]
    NotInOpen(Verdict),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Ring(#[from] CringError),
}

/// `A{a^-1}`.
pub fn section_ring(open: &BasicOpen) -> Result<Localized, SheafError> {
    Ok(open.ring.localize(&open.term)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionOnBasic {
    pub open: BasicOpen,
    pub numerator: Term,
    pub denominator: Term,
    /// The denominator has no zero on `Z(I) ∩ {a != 0}`.
    pub certified: Verdict,
}

impl SectionOnBasic {
    pub fn new(open: &BasicOpen, numerator: Term, denominator: Term, budget: &QueryBudget) -> Result<SectionOnBasic, SheafError> {
        open.ring.check_term(&numerator)?;
        open.ring.check_term(&denominator)?;
        let certified = open.ring.decide(
            std::slice::from_ref(&denominator),
            Target::Vanishes { term: open.term.clone() },
            budget,
        );
        if !certified.is_proved() {
            return Err(SheafError::Denominator(certified));
        }
        Ok(SectionOnBasic { open: open.clone(), numerator, denominator, certified })
    }

    /// `f/1`, the image of a global element.
    pub fn global(open: &BasicOpen, f: Term, budget: &QueryBudget) -> Result<SectionOnBasic, SheafError> {
        SectionOnBasic::new(open, f, Term::one(), budget)
    }

    /// Sum, cleared to the product denominator.
    pub fn add(&self, other: &SectionOnBasic, budget: &QueryBudget) -> Result<SectionOnBasic, SheafError> {
        if self.open != other.open {
            return Err(SpectrumError::DifferentRings.into());
        }
        let numerator = self.numerator.clone() * other.denominator.clone() + other.numerator.clone() * self.denominator.clone();
        SectionOnBasic::new(&self.open, numerator, self.denominator.clone() * other.denominator.clone(), budget)
    }

    pub fn mul(&self, other: &SectionOnBasic, budget: &QueryBudget) -> Result<SectionOnBasic, SheafError> {
        if self.open != other.open {
            return Err(SpectrumError::DifferentRings.into());
        }
        SectionOnBasic::new(
            &self.open,
            self.numerator.clone() * other.numerator.clone(),
            self.denominator.clone() * other.denominator.clone(),
            budget,
        )
    }

    fn same_fraction(&self, other: &SectionOnBasic) -> bool {
        self.numerator == other.numerator && self.denominator == other.denominator
    }
}

/// Points of `D(a) ∩ Z(I)`: sample points of `A{a^-1}` without the fresh coordinate.
pub fn open_points(open: &BasicOpen, resolution: usize, budget: &QueryBudget) -> Result<Vec<SpectrumPoint>, SheafError> {
    let ring = section_ring(open)?.ring;
    let n = open.ring.arity();
    Ok(sample_points(&ring, resolution, budget)
        .into_iter()
        .map(|y| SpectrumPoint::new(&open.ring, Point { coords: y.point.coords[..n].to_vec() }))
        .collect())
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub section: SectionOnBasic,
    pub leq: Verdict,
    pub samples: usize,
    /// Largest difference of the two germ values over the samples.
    pub max_deviation: f64,
    /// Every sample also lies in the source open.
    pub inside_source: bool,
}

/// Grid resolution used to sample opens; at least 21 points per variable.
const RESOLUTION: usize = 24;

pub fn restrict(s: &SectionOnBasic, to: &BasicOpen, budget: &QueryBudget) -> Result<Restriction, SheafError> {
    let leq = basic_leq(to, &s.open, budget)?;
    if !leq.is_proved() {
        return Err(SheafError::NotSmaller(leq));
    }
    let section = SectionOnBasic::new(to, s.numerator.clone(), s.denominator.clone(), budget)?;
    let mut max_deviation: f64 = 0.0;
    let mut inside_source = true;
    let points = open_points(to, RESOLUTION, budget)?;
    for x in &points {
        inside_source &= point_in_open(x, &s.open).is_proved();
        if let (Ok(a), Ok(b)) = (germ_eval(s, x), germ_eval(&section, x)) {
            max_deviation = max_deviation.max((a.approx() - b.approx()).abs());
        }
    }
    Ok(Restriction { section, leq, samples: points.len(), max_deviation, inside_source })
}

/// The value of a section at a point of its open.
#[derive(Clone, Debug)]
pub struct Germ {
    pub value: Value,
    /// The germ is a unit of the stalk: its value is nonzero.
    pub invertible: Verdict,
}

impl Germ {
    pub fn approx(&self) -> f64 {
        self.value.approx()
    }
}

pub fn germ_eval(s: &SectionOnBasic, x: &SpectrumPoint) -> Result<Germ, SheafError> {
    let inside = point_in_open(x, &s.open);
    if !inside.is_proved() {
        return Err(SheafError::NotInOpen(inside));
    }
    let (num, den) = (x.point.value_of(&s.numerator), x.point.value_of(&s.denominator));
    let value = match (num.as_exact(), den.as_exact()) {
        (Some(n), Some(d)) if !num_traits::Zero::is_zero(d) => Value::Exact(n / d),
        _ => {
            let xs: Vec<Interval> = x.point.coords.iter().map(|c| c.interval()).collect();
            Value::Enclosure(interval_at(&s.numerator, &xs).div(&interval_at(&s.denominator, &xs)))
        }
    };
    let invertible = Verdict::from_sign(&x.point, &s.numerator, SignClaim::Nonzero);
    Ok(Germ { value, invertible })
}

#[derive(Clone, Debug)]
pub struct FunctorialityCase {
    pub section: SectionOnBasic,
    /// Restricting in two steps gives literally the direct restriction.
    pub syntactic: bool,
    pub samples: usize,
    pub max_deviation: f64,
}

/// `D(a) ≤ D(b) ≤ D(c)`: restricting sections over `D(c)` to `D(b)` and then
/// to `D(a)` equals restricting directly.
pub fn functoriality_check(
    a: &BasicOpen,
    b: &BasicOpen,
    c: &BasicOpen,
    sections: &[SectionOnBasic],
    budget: &QueryBudget,
) -> Result<Vec<FunctorialityCase>, SheafError> {
    let points = open_points(a, RESOLUTION, budget)?;
    sections
        .iter()
        .map(|s| {
            if s.open != *c {
                return Err(SpectrumError::DifferentRings.into());
            }
            let two_step = restrict(&restrict(s, b, budget)?.section, a, budget)?.section;
            let direct = restrict(s, a, budget)?.section;
            let mut max_deviation: f64 = 0.0;
            for x in &points {
                if let (Ok(u), Ok(v)) = (germ_eval(&two_step, x), germ_eval(&direct, x)) {
                    max_deviation = max_deviation.max((u.approx() - v.approx()).abs());
                }
            }
            Ok(FunctorialityCase {
                section: s.clone(),
                syntactic: two_step.same_fraction(&direct) && two_step.open == direct.open,
                samples: points.len(),
                max_deviation,
            })
        })
        .collect()
}

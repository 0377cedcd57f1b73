//! C∞-radical and smooth saturation, decided through zero sets.
//!
//! For a finitely generated ideal `I`, `f` lies in the C∞-radical of `I`
//! exactly when `f` vanishes on `Z(I)`; `g + I` lies in the smooth
//! saturation of `S + I` exactly when `g` has no zero on
//! `Z(I) ∩ {prod S != 0}`. Both are answered inside the presentation's box.

use thiserror::Error;

use crate::cring::{CringError, Presentation};
use crate::termlang::Term;
use crate::zerocert::{QueryBudget, Target, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RadicalError {
    #[error("presentations differ in arity or box")]
    Incompatible,
    #[error(transparent)]
    Ring(#[from] CringError),
}

/// The C∞-radical of the relation ideal, as a membership predicate.
#[derive(Clone, Debug)]
pub struct RadicalPredicate {
    pub ring: Presentation,
}

impl RadicalPredicate {
    pub fn new(ring: Presentation) -> RadicalPredicate {
        RadicalPredicate { ring }
    }

    pub fn contains(&self, f: &Term, budget: &QueryBudget) -> Verdict {
        self.ring.radical_zero(f, budget)
    }
}

/// The smooth saturation of a finite set, stored as the product of its elements.
#[derive(Clone, Debug)]
pub struct SaturationPredicate {
    pub ring: Presentation,
    pub product: Term,
}

impl SaturationPredicate {
    pub fn new(ring: Presentation, set: &[Term]) -> SaturationPredicate {
        SaturationPredicate { ring, product: Term::product(set.to_vec()).normalize() }
    }

    /// `Z(g) ∩ Z(I) ⊆ Z(prod S)`.
    pub fn contains(&self, g: &Term, budget: &QueryBudget) -> Verdict {
        self.ring.decide(std::slice::from_ref(g), Target::Vanishes { term: self.product.clone() }, budget)
    }
}

pub fn radical_member(p: &Presentation, f: &Term, budget: &QueryBudget) -> Result<Verdict, RadicalError> {
    p.check_term(f)?;
    Ok(RadicalPredicate::new(p.clone()).contains(f, budget))
}

pub fn saturation_member(p: &Presentation, set: &[Term], g: &Term, budget: &QueryBudget) -> Result<Verdict, RadicalError> {
    for t in set.iter().chain([g]) {
        p.check_term(t)?;
    }
    Ok(SaturationPredicate::new(p.clone(), set).contains(g, budget))
}

/// Radical of `I` inside radical of `J`, i.e. `Z(J) ⊆ Z(I)`.
pub fn radical_compare(i: &Presentation, j: &Presentation, budget: &QueryBudget) -> Result<Verdict, RadicalError> {
    if i.arity() != j.arity() || i.region() != j.region() {
        return Err(RadicalError::Incompatible);
    }
    Ok(Verdict::all(i.relations().iter().map(|g| j.radical_zero(g, budget))))
}

/// `1` is in the radical, i.e. `Z(I)` is empty: the ring is trivial.
pub fn nullstellensatz_check(p: &Presentation, budget: &QueryBudget) -> Verdict {
    p.is_trivial(budget)
}

/// Both sides of the separation criterion for a finite set `S`.
#[derive(Clone, Debug)]
pub struct SeparationReport {
    /// `prod S` is in the radical: the radical meets the monoid generated by `S`.
    pub meets_monoid: Verdict,
    /// `0 + I` is in the saturation of `S + I`: the radical meets the saturation.
    pub meets_saturation: Verdict,
}

impl SeparationReport {
    pub fn agree(&self) -> bool {
        self.meets_monoid.kind() == self.meets_saturation.kind()
    }
}

pub fn separation_check(p: &Presentation, set: &[Term], budget: &QueryBudget) -> Result<SeparationReport, RadicalError> {
    let product = Term::product(set.to_vec());
    Ok(SeparationReport {
        meets_monoid: radical_member(p, &product, budget)?,
        meets_saturation: saturation_member(p, set, &Term::zero(), budget)?,
    })
}

/// `1 + sum f_i^2` is a unit.
pub fn semireal_check(p: &Presentation, fs: &[Term], budget: &QueryBudget) -> Result<Verdict, RadicalError> {
    for f in fs {
        p.check_term(f)?;
    }
    Ok(p.is_invertible(&Term::one_plus_squares(fs), budget))
}

use serde::{Deserialize, Serialize};

use super::{check_arity, CringError, Presentation};
use crate::termlang::Term;
use crate::zerocert::{QueryBudget, Verdict};

/// A homomorphism given by the images of the source generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hom {
    pub source: Presentation,
    pub target: Presentation,
    pub images: Vec<Term>,
}

impl Hom {
    pub fn new(source: Presentation, target: Presentation, images: Vec<Term>) -> Result<Hom, CringError> {
        if images.len() != source.arity() {
            return Err(CringError::ImageCount { expected: source.arity(), found: images.len() });
        }
        for t in &images {
            check_arity(t, target.arity())?;
        }
        let images = images.iter().map(Term::normalize).collect();
        Ok(Hom { source, target, images })
    }

    pub fn identity(p: &Presentation) -> Hom {
        Hom::inclusion(p, p)
    }

    /// Generator `x_i` to `x_i`; the target has at least as many generators.
    pub fn inclusion(source: &Presentation, target: &Presentation) -> Hom {
        let images = (0..source.arity()).map(Term::var).collect();
        Hom::new(source.clone(), target.clone(), images).expect("inclusion into a larger ring")
    }

    /// Substitutes the generator images.
    pub fn apply(&self, e: &Term) -> Term {
        e.substitute(&self.images).normalize()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Hom) -> Result<Hom, CringError> {
        if first.target != self.source {
            return Err(CringError::ChainMismatch);
        }
        let images = first.images.iter().map(|t| self.apply(t)).collect();
        Hom::new(first.source.clone(), self.target.clone(), images)
    }

    /// Every source relation maps to a radical-zero element of the target.
    pub fn well_defined(&self, budget: &QueryBudget) -> Verdict {
        Verdict::all(self.source.relations().iter().map(|r| self.target.radical_zero(&self.apply(r), budget)))
    }
}

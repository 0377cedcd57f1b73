//! Filters of closed sets given by zero sets, and their correspondence with
//! ideals.
//!
//! A filter is generated by finitely many terms `c_i`; its members are the
//! closed sets containing `Z(c_1, ..., c_m)` inside the box. `hat` sends an
//! ideal to the filter of zero sets of its elements and `check` sends a
//! filter back to the ideal of functions whose zero set it contains.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cring::{CringError, Presentation};
use crate::radical::radical_member;
use crate::termlang::{RatBox, Term};
use crate::zerocert::{self, Query, QueryBudget, Target, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("filter and presentation differ in arity or box")]
    Incompatible,
    #[error(transparent)]
    Ring(#[from] CringError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedSetFilter {
    pub region: RatBox,
    pub generators: Vec<Term>,
}

impl ClosedSetFilter {
    pub fn new(region: RatBox, generators: Vec<Term>) -> Result<ClosedSetFilter, FilterError> {
        if generators.iter().any(|g| g.min_arity() > region.dim()) {
            return Err(FilterError::Incompatible);
        }
        Ok(ClosedSetFilter { region, generators })
    }

    pub fn arity(&self) -> usize {
        self.region.dim()
    }

    /// `Z(sum c_i^2)`: the least closed set in the filter.
    pub fn minimum(&self) -> Term {
        Term::sum_of_squares(&self.generators)
    }

    /// The filter generated by the old generators and `c`.
    pub fn with_generator(&self, c: Term) -> ClosedSetFilter {
        let mut generators = self.generators.clone();
        generators.push(c);
        ClosedSetFilter { region: self.region.clone(), generators }
    }

    fn query(&self, f: &Term) -> Query {
        Query::vanishes(self.region.clone(), self.generators.clone(), f.clone())
    }

    /// The empty set belongs to the filter.
    pub fn is_improper(&self, budget: &QueryBudget) -> Verdict {
        check(self, &Term::one(), budget)
    }
}

/// `{Z(f) : f in I}`, generated by the relations (the same zero set as
/// their sum of squares).
pub fn hat(p: &Presentation) -> ClosedSetFilter {
    ClosedSetFilter { region: p.region().clone(), generators: p.relations().to_vec() }
}

/// `Z(f)` belongs to the filter: `Z(generators) ⊆ Z(f)` in the box.
pub fn check(filter: &ClosedSetFilter, f: &Term, budget: &QueryBudget) -> Verdict {
    assert!(f.min_arity() <= filter.arity(), "term exceeds filter arity");
    zerocert::decide(&filter.query(f), budget)
}

#[derive(Clone, Debug)]
pub struct AdjunctionReport {
    /// `hat(I) ⊆ F`, as the single containment of sum-of-squares zero sets.
    pub left: Verdict,
    /// `I ⊆ check(F)`, one generator at a time.
    pub right: Verdict,
}

impl AdjunctionReport {
    pub fn agree(&self) -> bool {
        self.left.kind() == self.right.kind()
    }
}

pub fn galois_adjunction_test(
    p: &Presentation,
    filter: &ClosedSetFilter,
    budget: &QueryBudget,
) -> Result<AdjunctionReport, FilterError> {
    if p.region() != &filter.region || !p.localizers().is_empty() {
        return Err(FilterError::Incompatible);
    }
    let left = zerocert::zero_subset(&filter.minimum(), &Term::sum_of_squares(p.relations()), &filter.region, budget);
    let right = Verdict::all(p.relations().iter().map(|g| check(filter, g, budget)));
    Ok(AdjunctionReport { left, right })
}

#[derive(Clone, Debug)]
pub struct ClosureSample {
    pub term: Term,
    pub via_filter: Verdict,
    pub via_radical: Verdict,
    /// Both routes posed the same zero-set query.
    pub same_query: bool,
}

impl ClosureSample {
    pub fn agree(&self) -> bool {
        self.via_filter.kind() == self.via_radical.kind()
    }
}

/// Compares `check(hat(I), f)` with radical membership for each sample.
pub fn closure_equals_radical(
    p: &Presentation,
    samples: &[Term],
    budget: &QueryBudget,
) -> Result<Vec<ClosureSample>, FilterError> {
    let filter = hat(p);
    samples
        .iter()
        .map(|f| {
            let via_radical = radical_member(p, f, budget).map_err(|e| match e {
                crate::radical::RadicalError::Ring(r) => FilterError::Ring(r),
                crate::radical::RadicalError::Incompatible => FilterError::Incompatible,
            })?;
            let same_query = filter.query(f) == p.query(&[], Target::Vanishes { term: f.clone() });
            Ok(ClosureSample { term: f.clone(), via_filter: check(&filter, f, budget), via_radical, same_query })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s, 1).unwrap()
    }

    #[test]
    fn hat_keeps_the_zero_set() {
        let p = Presentation::new(1, vec![t("x0*(x0 - 1)")], RatBox::parse("-2,2").unwrap()).unwrap();
        let f = hat(&p);
        let b = QueryBudget::default();
        assert!(check(&f, &t("x0^2*(x0 - 1)"), &b).is_proved());
        assert!(f.is_improper(&b).is_refuted());
        let minimum = f.minimum();
        assert!(check(&f, &minimum, &b).is_proved());
    }

    #[test]
    fn localized_rings_are_not_compared() {
        let p = Presentation::free(RatBox::parse("-1,1").unwrap());
        let l = p.localize(&t("x0")).unwrap().ring;
        assert_eq!(galois_adjunction_test(&l, &hat(&p), &QueryBudget::default()).unwrap_err(), FilterError::Incompatible);
    }
}

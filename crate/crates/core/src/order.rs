//! Point-level order theory: the preorder `f ≺ g` (`g - f` positive on
//! the zero set), the orderings `P_x = {f : f(x) >= 0}` at points, Harrison
//! basics `H(a)` and the support map `P_x -> m_x`.

use crate::cring::{CringError, Presentation};
use crate::spectrum::{point_in_open, separating_term, BasicOpen, SpectrumPoint};
use crate::termlang::Term;
use crate::zerocert::{QueryBudget, SignClaim, Verdict};

/// `f ≺ g`: `g - f > 0` on `Z(I)`. Refuted only with a certified point of
/// `Z(I)` where `g - f <= 0`.
pub fn precedes(f: &Term, g: &Term, p: &Presentation, budget: &QueryBudget) -> Result<Verdict, CringError> {
    p.check_term(f)?;
    p.check_term(g)?;
    Ok(p.positive(&(g.clone() - f.clone()), budget))
}

/// The ordering `P_x` of a point of the spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOrdering {
    pub point: SpectrumPoint,
}

impl PointOrdering {
    pub fn new(point: SpectrumPoint) -> PointOrdering {
        PointOrdering { point }
    }

    /// `f ∈ P_x`: `f(x) >= 0`.
    pub fn contains(&self, f: &Term) -> Verdict {
        Verdict::from_sign(&self.point.point, f, SignClaim::NonNegative)
    }

    /// `P_x ∈ H(a)`: `a(x) > 0`.
    pub fn in_harrison(&self, a: &Term) -> Verdict {
        Verdict::from_sign(&self.point.point, a, SignClaim::Positive)
    }

    /// `f ∈ supp(P_x) = P_x ∩ -P_x`: `f(x) = 0`.
    pub fn support_contains(&self, f: &Term) -> Verdict {
        Verdict::from_sign(&self.point.point, f, SignClaim::Zero)
    }
}

pub fn ordering_member(ordering: &PointOrdering, f: &Term) -> Verdict {
    ordering.contains(f)
}

pub fn harrison_member(ordering: &PointOrdering, a: &Term) -> Verdict {
    ordering.in_harrison(a)
}

/// The support of `P_x` is the maximal ideal `m_x`.
pub fn supp_of(ordering: &PointOrdering) -> SpectrumPoint {
    ordering.point.clone()
}

#[derive(Clone, Debug)]
pub struct SuppSpectralCase {
    pub point: SpectrumPoint,
    /// `m_x ∈ D(a)`.
    pub in_open: Verdict,
    /// `P_x ∈ H(a)`.
    pub positive: Verdict,
    /// `P_x ∈ H(-a)`.
    pub negative: Verdict,
}

impl SuppSpectralCase {
    pub fn agree(&self) -> bool {
        if !(self.in_open.is_decided() && self.positive.is_decided() && self.negative.is_decided()) {
            return true;
        }
        self.in_open.is_proved() == (self.positive.is_proved() || self.negative.is_proved())
    }
}

/// `supp^-1[D(a)] = H(a) ∪ H(-a)`, checked at each sample point.
pub fn supp_spectral_check(p: &Presentation, a: &Term, points: &[SpectrumPoint]) -> Result<Vec<SuppSpectralCase>, CringError> {
    p.check_term(a)?;
    let open = BasicOpen { ring: p.clone(), term: a.clone() };
    let minus = -a.clone();
    Ok(points
        .iter()
        .map(|x| {
            let o = PointOrdering::new(x.clone());
            SuppSpectralCase {
                point: x.clone(),
                in_open: point_in_open(&supp_of(&o), &open),
                positive: o.in_harrison(a),
                negative: o.in_harrison(&minus),
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct SuppBijection {
    pub orderings: usize,
    /// Distinct orderings have certifiably distinct supports: for each pair
    /// some term lies in one support and not in the other.
    pub injective: bool,
    /// Each sampled maximal ideal is the support of exactly one ordering.
    pub onto_samples: bool,
}

pub fn supp_bijection_check(points: &[SpectrumPoint]) -> SuppBijection {
    let orderings: Vec<PointOrdering> = points.iter().cloned().map(PointOrdering::new).collect();
    let supports: Vec<SpectrumPoint> = orderings.iter().map(supp_of).collect();
    let mut injective = true;
    for i in 0..orderings.len() {
        for j in 0..orderings.len() {
            if i == j {
                continue;
            }
            injective &= match separating_term(&supports[i], &supports[j]) {
                Some(t) => orderings[i].support_contains(&t).is_proved() && orderings[j].support_contains(&t).is_refuted(),
                None => false,
            };
        }
    }
    let onto_samples = points.iter().all(|x| supports.iter().filter(|s| *s == x).count() == 1);
    SuppBijection { orderings: orderings.len(), injective, onto_samples }
}

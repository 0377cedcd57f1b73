//! Exact decisions when every active variable is pinned to finitely many
//! values by univariate polynomial constraints.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::point::{Coord, Point};
use super::{
    Candidate, CandidateOutcome, Certificate, Evidence, Location, Proof, Query, Target,
    VarRoots, Verdict, Witness,
};
use crate::rational::simplest_in;
use crate::termlang::{Poly, RatBox, Term};
use crate::upoly::UPoly;

const MAX_CANDIDATES: usize = 4096;

pub(super) fn active_vars(q: &Query) -> BTreeSet<usize> {
    q.all_terms().flat_map(Term::variables).collect()
}

/// Per active variable: the gcd of its univariate constraints with Bezout cofactors.
pub(super) fn pin_variables(region: &RatBox, constraints: &[Term], active: &BTreeSet<usize>) -> Option<Vec<VarRoots>> {
    let polys: Vec<Poly> = constraints.iter().map(Poly::from_term).collect();
    let mut out = Vec::new();
    for &v in active {
        let mut sources = Vec::new();
        let mut gcd: Option<UPoly> = None;
        let mut cofactors: Vec<UPoly> = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            let Some(u) = p.to_univariate(v) else { continue };
            if u.is_constant() {
                continue;
            }
            sources.push(i);
            match &gcd {
                None => {
                    let lead = u.leading().expect("nonconstant").recip();
                    gcd = Some(u.scale(&lead));
                    cofactors.push(UPoly::constant(lead));
                }
                Some(g) => {
                    let (d, s, t) = g.extended_gcd(&u);
                    cofactors = cofactors.iter().map(|c| c.mul(&s)).collect();
                    cofactors.push(t);
                    gcd = Some(d);
                }
            }
        }
        let gcd = gcd?;
        let s = gcd.squarefree();
        let roots = s
            .isolate(region.lo(v), region.hi(v))
            .iter()
            .map(|r| Coord::from_root(&s, r))
            .collect();
        out.push(VarRoots { var: v, gcd, sources, cofactors, roots });
    }
    Some(out)
}

/// Builds the full-dimensional point for one candidate.
pub(super) fn candidate_point(region: &RatBox, vars: &[VarRoots], indices: &[usize]) -> Point {
    let mut coords: Vec<Coord> = (0..region.dim())
        .map(|i| Coord::exact(simplest_in(region.lo(i), region.hi(i))))
        .collect();
    for (vr, &k) in vars.iter().zip(indices) {
        coords[vr.var] = vr.roots[k].clone();
    }
    Point { coords }
}

/// All index tuples in lexicographic order (first variable slowest).
pub(super) fn candidates(vars: &[VarRoots]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for vr in vars {
        let mut next = Vec::with_capacity(out.len() * vr.roots.len());
        for prefix in &out {
            for k in 0..vr.roots.len() {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub(super) enum PointStatus {
    /// A constraint is certifiably nonzero here.
    Excluded(usize),
    /// Every constraint vanishes.
    OnZeroSet,
    Undecided,
}

pub(super) fn point_status(point: &Point, constraints: &[Term], skip: &BTreeSet<usize>) -> PointStatus {
    for (i, c) in constraints.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        match point.sign_of(c) {
            Some(Ordering::Equal) => {}
            Some(_) => return PointStatus::Excluded(i),
            None => return PointStatus::Undecided,
        }
    }
    PointStatus::OnZeroSet
}

/// `Some(true)` if the target holds at the point, `Some(false)` if it certifiably fails.
pub(super) fn target_at(point: &Point, target: &Target) -> Option<bool> {
    match target {
        Target::Vanishes { term } => point.sign_of(term).map(|s| s == Ordering::Equal),
        Target::Positive { term, guard } => {
            let guard_sign = match guard {
                Some(g) => match point.sign_of(g) {
                    Some(Ordering::Equal) => return Some(true),
                    other => other,
                },
                None => Some(Ordering::Greater),
            };
            match point.sign_of(term) {
                Some(Ordering::Greater) => Some(true),
                Some(_) => guard_sign.map(|_| false),
                None => None,
            }
        }
    }
}

pub(super) fn decide(q: &Query) -> Option<Verdict> {
    let active = active_vars(q);
    if active.is_empty() {
        return None;
    }
    let vars = pin_variables(&q.region, &q.constraints, &active)?;
    let count = vars.iter().map(|v| v.roots.len()).product::<usize>();
    if count > MAX_CANDIDATES {
        return None;
    }
    let sources: BTreeSet<usize> = vars.iter().flat_map(|v| v.sources.iter().copied()).collect();
    let mut records = Vec::with_capacity(count);
    for indices in candidates(&vars) {
        let point = candidate_point(&q.region, &vars, &indices);
        let outcome = match point_status(&point, &q.constraints, &sources) {
            PointStatus::Excluded(i) => CandidateOutcome::Excluded { constraint: i },
            PointStatus::Undecided => return None,
            PointStatus::OnZeroSet => match target_at(&point, &q.target) {
                Some(true) => CandidateOutcome::TargetHolds,
                Some(false) => {
                    return Some(Verdict::Refuted(Witness {
                        point,
                        evidence: Evidence::Counterexample { query: Box::new(q.clone()), location: Location::Pointwise },
                    }))
                }
                None => return None,
            },
        };
        records.push(Candidate { indices, outcome });
    }
    Some(Verdict::Proved(Certificate::Query {
        query: Box::new(q.clone()),
        proof: Proof::Enumeration { vars, candidates: records },
    }))
}

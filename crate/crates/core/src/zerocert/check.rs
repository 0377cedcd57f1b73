//! Re-validation of certificates and witnesses without re-running the search.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use super::enumerate::{self, candidate_point};
use super::point::Coord;
use super::rules::{positive_poly, positive_tree, radical_of};
use super::search::{krawczyk, Prepared, Problem};
use super::{
    BoxTree, CandidateOutcome, Certificate, Divisor, Evidence, LeafReason, Location, Proof, Query, RuleTrace,
    Target, VarRoots, Verdict, Witness,
};
use crate::rational::parse_rational;
use crate::termlang::{eval, Poly, RatBox};
use crate::upoly::UPoly;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("query terms do not fit the box dimension")]
    Arity,
    #[error("rule does not apply: {0}")]
    Rule(String),
    #[error("polynomial identity fails: {0}")]
    Identity(String),
    #[error("root list for x{var} is wrong: {reason}")]
    Roots { var: usize, reason: String },
    #[error("candidate list is wrong: {0}")]
    Candidates(String),
    #[error("box leaf at depth {depth} not justified: {reason}")]
    Leaf { depth: usize, reason: String },
    #[error("sign claim not certified: {0}")]
    Sign(String),
    #[error("witness rejected: {0}")]
    Witness(String),
}

pub fn check_verdict(v: &Verdict) -> Result<(), CheckError> {
    match v {
        Verdict::Proved(c) => check_certificate(c),
        Verdict::Refuted(w) => check_witness(w),
        Verdict::Unknown(_) => Ok(()),
    }
}

pub fn check_certificate(cert: &Certificate) -> Result<(), CheckError> {
    match cert {
        Certificate::All { parts } => parts.iter().try_for_each(check_certificate),
        Certificate::Split { query, parts } => {
            let subs = super::split::split(query).ok_or_else(|| CheckError::Rule("query does not split".into()))?;
            if subs.len() != parts.len() {
                return Err(CheckError::Rule(format!("{} case(s) expected, {} given", subs.len(), parts.len())));
            }
            for (sub, part) in subs.iter().zip(parts) {
                let claimed = match part {
                    Certificate::Query { query, .. } | Certificate::Split { query, .. } => query,
                    _ => return Err(CheckError::Rule("case proof is not about a query".into())),
                };
                if **claimed != *sub {
                    return Err(CheckError::Rule(format!("case proof is about {claimed}, expected {sub}")));
                }
                check_certificate(part)?;
            }
            Ok(())
        }
        Certificate::Sign { point, term, claim } => match point.sign_of(term) {
            Some(s) if claim.holds(s) => Ok(()),
            _ => Err(CheckError::Sign(format!("{term} at {point}"))),
        },
        Certificate::Query { query, proof } => {
            if !query.arity_ok() {
                return Err(CheckError::Arity);
            }
            match proof {
                Proof::Rule { trace } => check_rule(query, trace),
                Proof::Enumeration { vars, candidates } => check_enumeration(query, vars, candidates),
                Proof::Boxes { tree } => {
                    let pb = Problem::new(query);
                    check_tree(&pb, &query.region, tree, 0)
                }
            }
        }
    }
}

fn check_rule(q: &Query, trace: &RuleTrace) -> Result<(), CheckError> {
    let fail = |m: &str| Err(CheckError::Rule(m.to_string()));
    match (trace, &q.target) {
        (RuleTrace::VacuousConstraint { constraint }, _) => {
            match q.constraints.get(*constraint).map(|c| Poly::from_term(c).as_constant()) {
                Some(Some(k)) if !k.is_zero() => Ok(()),
                _ => fail("constraint is not a nonzero constant"),
            }
        }
        (RuleTrace::ZeroTarget, Target::Vanishes { term }) if Poly::from_term(term).is_zero() => Ok(()),
        (RuleTrace::PositiveConstant, Target::Positive { term, .. })
            if Poly::from_term(term).is_positive_constant() =>
        {
            Ok(())
        }
        (RuleTrace::GuardZero, Target::Positive { guard: Some(g), .. }) if Poly::from_term(g).is_zero() => Ok(()),
        (RuleTrace::PositiveTree, Target::Positive { term, .. })
            if positive_tree(term) || positive_poly(&Poly::from_term(term)) =>
        {
            Ok(())
        }
        (RuleTrace::IdealMultiple { power, divisors, cofactors }, Target::Vanishes { term }) => {
            if *power == 0 || divisors.len() != cofactors.len() {
                return fail("malformed ideal-multiple trace");
            }
            let mut sum = Poly::zero();
            for (d, cof) in divisors.iter().zip(cofactors) {
                sum = sum.add(&divisor_poly(q, d)?.mul(&Poly::from_term(cof)));
            }
            let lhs = Poly::from_term(term).pow(*power);
            if lhs.sub(&sum).is_zero() {
                Ok(())
            } else {
                Err(CheckError::Identity(format!("({term})^{power} differs from the combination")))
            }
        }
        _ => fail("rule does not match the target"),
    }
}

/// The polynomial a divisor stands for, after checking that its zero set
/// contains that of the constraint it comes from.
fn divisor_poly(q: &Query, d: &Divisor) -> Result<Poly, CheckError> {
    let constraint = |i: usize| {
        q.constraints
            .get(i)
            .map(Poly::from_term)
            .ok_or_else(|| CheckError::Rule(format!("no constraint c{i}")))
    };
    match d {
        Divisor::Constraint { index } => constraint(*index),
        Divisor::MonomialRadical { index, term } => {
            let c = constraint(*index)?;
            let (m, _) = match (c.len(), c.leading()) {
                (1, Some(lead)) => lead,
                _ => return Err(CheckError::Rule(format!("c{index} is not a single monomial"))),
            };
            let rad = radical_of(m);
            if rad.sub(&Poly::from_term(term)).is_zero() {
                Ok(rad)
            } else {
                Err(CheckError::Rule(format!("{term} is not the radical of c{index}")))
            }
        }
    }
}

fn roots_error(var: usize, reason: impl Into<String>) -> CheckError {
    CheckError::Roots { var, reason: reason.into() }
}

fn check_var_roots(q: &Query, vr: &VarRoots) -> Result<(), CheckError> {
    let v = vr.var;
    if v >= q.region.dim() {
        return Err(roots_error(v, "variable outside the box"));
    }
    if vr.sources.is_empty() || vr.sources.len() != vr.cofactors.len() {
        return Err(roots_error(v, "malformed sources"));
    }
    let mut combination = UPoly::zero();
    for (&i, cof) in vr.sources.iter().zip(&vr.cofactors) {
        let u = q
            .constraints
            .get(i)
            .and_then(|c| Poly::from_term(c).to_univariate(v))
            .ok_or_else(|| roots_error(v, format!("c{i} is not univariate in x{v}")))?;
        if vr.gcd.is_zero() || !vr.gcd.divides(&u) {
            return Err(roots_error(v, format!("gcd does not divide c{i}")));
        }
        combination = combination.add(&cof.mul(&u));
    }
    if combination != vr.gcd {
        return Err(CheckError::Identity(format!("Bezout combination for x{v}")));
    }
    let s = vr.gcd.squarefree();
    let (lo, hi) = (q.region.lo(v), q.region.hi(v));
    if s.count_roots_closed(lo, hi) != vr.roots.len() {
        return Err(roots_error(v, "root count differs from Sturm count"));
    }
    for (k, r) in vr.roots.iter().enumerate() {
        let ok = match r {
            Coord::Exact { value } => value >= lo && value <= hi && s.eval(value).is_zero(),
            Coord::Root { poly, lo: a, hi: b } => {
                *poly == s && a < b && a >= lo && b <= hi && s.count_roots_open(a, b) == 1
            }
            Coord::Range { .. } => false,
        };
        if !ok {
            return Err(roots_error(v, format!("root {k} is not an isolated root")));
        }
        if vr.roots[..k].iter().any(|other| !other.disjoint_from(r)) {
            return Err(roots_error(v, format!("root {k} overlaps an earlier one")));
        }
    }
    Ok(())
}

fn check_enumeration(q: &Query, vars: &[VarRoots], candidates: &[super::Candidate]) -> Result<(), CheckError> {
    let listed: BTreeSet<usize> = vars.iter().map(|v| v.var).collect();
    if listed.len() != vars.len() {
        return Err(CheckError::Candidates("a variable is listed twice".into()));
    }
    if !enumerate::active_vars(q).is_subset(&listed) {
        return Err(CheckError::Candidates("an active variable is not pinned".into()));
    }
    for vr in vars {
        check_var_roots(q, vr)?;
    }
    let expected = enumerate::candidates(vars);
    if expected.len() != candidates.len() || expected.iter().zip(candidates).any(|(e, c)| *e != c.indices) {
        return Err(CheckError::Candidates("not the full product of root sets".into()));
    }
    for c in candidates {
        let point = candidate_point(&q.region, vars, &c.indices);
        let ok = match &c.outcome {
            CandidateOutcome::Excluded { constraint } => q
                .constraints
                .get(*constraint)
                .and_then(|t| point.sign_of(t))
                .is_some_and(|s| s != Ordering::Equal),
            CandidateOutcome::TargetHolds => enumerate::target_at(&point, &q.target) == Some(true),
        };
        if !ok {
            return Err(CheckError::Candidates(format!("outcome at {point} not certified")));
        }
    }
    Ok(())
}

fn check_tree(pb: &Problem, region: &RatBox, tree: &BoxTree, depth: usize) -> Result<(), CheckError> {
    match tree {
        BoxTree::Split { dim, lower, upper } => {
            if *dim >= region.dim() || region.width(*dim).is_zero() {
                return Err(CheckError::Leaf { depth, reason: format!("cannot split dimension {dim}") });
            }
            let (l, u) = region.bisect(*dim);
            check_tree(pb, &l, lower, depth + 1)?;
            check_tree(pb, &u, upper, depth + 1)
        }
        BoxTree::Leaf(reason) => {
            let xs = region.to_intervals();
            let ok = match reason {
                LeafReason::ConstraintNonzero { index } => pb
                    .constraints
                    .iter()
                    .find(|(i, _)| i == index)
                    .is_some_and(|(_, c)| c.enclose(&xs).excludes_zero()),
                LeafReason::TargetHolds => pb.target_holds(&xs),
            };
            if ok {
                Ok(())
            } else {
                Err(CheckError::Leaf { depth, reason: format!("{reason:?} on {region}") })
            }
        }
    }
}

pub fn check_witness(w: &Witness) -> Result<(), CheckError> {
    let reject = |m: String| Err(CheckError::Witness(m));
    match &w.evidence {
        Evidence::Sign { term, claim } => match w.point.sign_of(term) {
            Some(s) if claim.holds(s) => Ok(()),
            _ => reject(format!("sign of {term} at {} not certified", w.point)),
        },
        Evidence::Counterexample { query, location } => {
            if !query.arity_ok() {
                return Err(CheckError::Arity);
            }
            if w.point.dim() != query.region.dim() || !w.point.within(&query.region) {
                return reject(format!("{} is not in the box", w.point));
            }
            let pb = Problem::new(query);
            match location {
                Location::Pointwise => {
                    for (i, c) in query.constraints.iter().enumerate() {
                        if w.point.sign_of(c) != Some(Ordering::Equal) {
                            return reject(format!("c{i} not certified zero at {}", w.point));
                        }
                    }
                    if enumerate::target_at(&w.point, &query.target) != Some(false) {
                        return reject("target failure not certified".into());
                    }
                    Ok(())
                }
                Location::SignChange { constraint, a, b } => {
                    if query.constraints.len() != 1 || *constraint != 0 {
                        return reject("sign change needs exactly one constraint".into());
                    }
                    let parse = |s: &[String]| -> Option<Vec<_>> { s.iter().map(|x| parse_rational(x)).collect() };
                    let (Some(a), Some(b)) = (parse(a), parse(b)) else {
                        return reject("unreadable endpoints".into());
                    };
                    let hull = w.point.region();
                    if a.len() != hull.dim() || b.len() != hull.dim() || !hull.contains(&a) || !hull.contains(&b) {
                        return reject("endpoints outside the witness range".into());
                    }
                    let c = &query.constraints[0];
                    let signs = (eval(c, &a).sign(), eval(c, &b).sign());
                    let opposite = matches!(
                        signs,
                        (Some(Ordering::Greater), Some(Ordering::Less)) | (Some(Ordering::Less), Some(Ordering::Greater))
                    );
                    if !opposite {
                        return reject("no certified sign change".into());
                    }
                    if !pb.target_fails(&hull.to_intervals()) {
                        return reject("target failure on the range not certified".into());
                    }
                    Ok(())
                }
                Location::Krawczyk { constraints, free } => {
                    let listed: BTreeSet<usize> = constraints.iter().copied().collect();
                    let required: BTreeSet<usize> = pb.constraints.iter().map(|(i, _)| *i).collect();
                    if listed != required || listed.len() != constraints.len() {
                        return reject("listed constraints are not the nonzero ones".into());
                    }
                    let free_set: BTreeSet<usize> = free.iter().copied().collect();
                    if free_set.len() != free.len() || free.iter().any(|&v| v >= w.point.dim()) {
                        return reject("bad free variables".into());
                    }
                    let fixed_exact = w
                        .point
                        .coords
                        .iter()
                        .enumerate()
                        .all(|(i, c)| free_set.contains(&i) || c.as_exact().is_some());
                    if !fixed_exact {
                        return reject("non-free coordinates must be exact".into());
                    }
                    let refs: Vec<&Prepared> = pb.constraints.iter().map(|(_, c)| c).collect();
                    let xs = w.point.region().to_intervals();
                    if !krawczyk(&refs, free, &xs) {
                        return reject("Krawczyk inclusion fails".into());
                    }
                    if !pb.target_fails(&xs) {
                        return reject("target failure on the range not certified".into());
                    }
                    Ok(())
                }
            }
        }
    }
}

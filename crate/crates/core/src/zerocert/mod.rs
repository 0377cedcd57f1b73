//! Certified three-valued decisions about zero sets inside a rational box.
//!
//! Every question is phrased as a [`Query`]: for all points `x` of the box
//! where each constraint vanishes, does the target hold? The answer is a
//! [`Verdict`]: `Proved` with a re-checkable [`Certificate`], `Refuted` with
//! a certified counterexample [`Witness`], or `Unknown` with a report of the
//! exhausted budget.
//!
//! Decision order: symbolic rules, exact enumeration when every active
//! variable is pinned down by a univariate polynomial constraint, then
//! branch and bound with interval enclosures, interval Newton and sign
//! changes for refutations.

mod check;
mod enumerate;
mod point;
mod rules;
mod search;
mod split;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use check::{check_certificate, check_verdict, check_witness, CheckError};
pub use point::{Coord, Point};
pub use search::{find_zeros, ZeroSet};

use crate::rational::{as_string, format_rational, pow2};
use crate::termlang::{RatBox, Term};
use crate::upoly::{RootInterval, UPoly};

/// Limits for the subdivision search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBudget {
    pub max_depth: u32,
    #[serde(with = "as_string")]
    pub min_width: BigRational,
    pub max_boxes: usize,
}

impl Default for QueryBudget {
    fn default() -> QueryBudget {
        QueryBudget { max_depth: 40, min_width: pow2(-40), max_boxes: 1_000_000 }
    }
}

impl QueryBudget {
    /// Twice the depth and box count, half the minimum width.
    pub fn doubled(&self) -> QueryBudget {
        QueryBudget {
            max_depth: self.max_depth * 2,
            min_width: &self.min_width / BigRational::from_integer(2.into()),
            max_boxes: self.max_boxes * 2,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.max_depth > 0 && self.min_width > BigRational::zero() && self.max_boxes > 0
    }
}

/// What must hold at every point of the constrained zero set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Vanishes { term: Term },
    /// `term > 0`, except where `guard` (if any) vanishes.
    Positive { term: Term, guard: Option<Term> },
}

impl Target {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Target::Vanishes { term } => vec![term],
            Target::Positive { term, guard } => std::iter::once(term).chain(guard.as_ref()).collect(),
        }
    }
}

/// `for all x in region with constraints(x) = 0: target(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub region: RatBox,
    pub constraints: Vec<Term>,
    pub target: Target,
}

impl Query {
    pub fn vanishes(region: RatBox, constraints: Vec<Term>, g: Term) -> Query {
        Query { region, constraints, target: Target::Vanishes { term: g } }
    }

    pub fn positive(region: RatBox, constraints: Vec<Term>, h: Term, guard: Option<Term>) -> Query {
        Query { region, constraints, target: Target::Positive { term: h, guard } }
    }

    /// Emptiness of the constrained zero set.
    pub fn empty(region: RatBox, constraints: Vec<Term>) -> Query {
        Query::vanishes(region, constraints, Term::one())
    }

    pub fn all_terms(&self) -> impl Iterator<Item = &Term> {
        self.constraints.iter().chain(self.target.terms())
    }

    pub fn arity_ok(&self) -> bool {
        self.all_terms().all(|t| t.min_arity() <= self.region.dim())
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.constraints.iter().map(Term::to_string).collect();
        write!(f, "Z({}) in [{}] => ", cs.join(", "), self.region)?;
        match &self.target {
            Target::Vanishes { term } => write!(f, "{term} = 0"),
            Target::Positive { term, guard: None } => write!(f, "{term} > 0"),
            Target::Positive { term, guard: Some(g) } => write!(f, "{term} > 0 or {g} = 0"),
        }
    }
}

/// Where a divisor in an ideal-multiple identity comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum Divisor {
    Constraint { index: usize },
    /// The product of the distinct atoms of a single-monomial constraint.
    MonomialRadical { index: usize, term: Term },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RuleTrace {
    /// Some constraint is a nonzero constant, so the zero set is empty.
    VacuousConstraint { constraint: usize },
    ZeroTarget,
    PositiveConstant,
    GuardZero,
    /// `target^power = sum cofactors[i] * divisors[i]`.
    IdealMultiple { power: u32, divisors: Vec<Divisor>, cofactors: Vec<Term> },
    /// Positivity visible from the expression tree (`1 + squares`, `exp`, ...).
    PositiveTree,
}

impl fmt::Display for RuleTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTrace::VacuousConstraint { constraint } => write!(f, "constraint c{constraint} is a nonzero constant"),
            RuleTrace::ZeroTarget => write!(f, "target is identically zero"),
            RuleTrace::PositiveConstant => write!(f, "target is a positive constant"),
            RuleTrace::GuardZero => write!(f, "guard is identically zero"),
            RuleTrace::IdealMultiple { power, divisors, cofactors } => {
                let parts: Vec<String> = divisors
                    .iter()
                    .zip(cofactors)
                    .map(|(d, q)| match d {
                        Divisor::Constraint { index } => format!("({q})*c{index}"),
                        Divisor::MonomialRadical { index, term } => format!("({q})*rad(c{index})={term}"),
                    })
                    .collect();
                write!(f, "target^{power} = {}", parts.join(" + "))
            }
            RuleTrace::PositiveTree => write!(f, "target positive by construction"),
        }
    }
}

/// Roots of one variable pinned by univariate polynomial constraints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarRoots {
    pub var: usize,
    /// `gcd = sum cofactors[i] * constraint[sources[i]]` as polynomials in `var`.
    pub gcd: UPoly,
    pub sources: Vec<usize>,
    pub cofactors: Vec<UPoly>,
    pub roots: Vec<Coord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CandidateOutcome {
    Excluded { constraint: usize },
    TargetHolds,
}

/// One point of the product of root sets, by index into each `VarRoots`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub indices: Vec<usize>,
    #[serde(flatten)]
    pub outcome: CandidateOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "leaf", rename_all = "snake_case")]
pub enum LeafReason {
    ConstraintNonzero { index: usize },
    TargetHolds,
}

/// The bisection tree of an exhaustive interval search; splits are at midpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxTree {
    Leaf(LeafReason),
    Split { dim: usize, lower: Box<BoxTree>, upper: Box<BoxTree> },
}

impl BoxTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            BoxTree::Leaf(_) => 1,
            BoxTree::Split { lower, upper, .. } => lower.leaf_count() + upper.leaf_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Proof {
    Rule { trace: RuleTrace },
    Enumeration { vars: Vec<VarRoots>, candidates: Vec<Candidate> },
    Boxes { tree: BoxTree },
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proof::Rule { trace } => write!(f, "rule: {trace}"),
            Proof::Enumeration { vars, candidates } => {
                let per: Vec<String> = vars.iter().map(|v| format!("x{}: {} root(s)", v.var, v.roots.len())).collect();
                write!(f, "exact enumeration ({}; {} candidate(s))", per.join(", "), candidates.len())
            }
            Proof::Boxes { tree } => write!(f, "interval subdivision ({} box(es))", tree.leaf_count()),
        }
    }
}

/// A claimed sign of a term at a certified point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClaim {
    Zero,
    Nonzero,
    Positive,
    Negative,
    NonPositive,
    NonNegative,
}

impl SignClaim {
    pub fn holds(&self, sign: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            SignClaim::Zero => sign == Equal,
            SignClaim::Nonzero => sign != Equal,
            SignClaim::Positive => sign == Greater,
            SignClaim::Negative => sign == Less,
            SignClaim::NonPositive => sign != Greater,
            SignClaim::NonNegative => sign != Less,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Query { query: Box<Query>, proof: Proof },
    /// Every part holds.
    All { parts: Vec<Certificate> },
    /// The query holds because each of the sub-queries it splits into holds.
    Split { query: Box<Query>, parts: Vec<Certificate> },
    /// `term` has the claimed sign at `point`.
    Sign { point: Point, term: Term, claim: SignClaim },
}

impl Certificate {
    /// One-line description for traces.
    pub fn summary(&self) -> String {
        match self {
            Certificate::Query { proof, .. } => proof.to_string(),
            Certificate::All { parts } => {
                let inner: Vec<String> = parts.iter().map(Certificate::summary).collect();
                inner.join("; ")
            }
            Certificate::Split { parts, .. } => {
                let inner: Vec<String> = parts.iter().map(Certificate::summary).collect();
                format!("split into {} case(s): {}", parts.len(), inner.join("; "))
            }
            Certificate::Sign { point, term, claim } => {
                format!("{term} is {} at {point}", serde_json::to_value(claim).unwrap().as_str().unwrap())
            }
        }
    }
}

/// How a counterexample point was located.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "located_by", rename_all = "snake_case")]
pub enum Location {
    /// Every constraint certifiably vanishes at the point itself.
    Pointwise,
    /// The single constraint changes sign between `a` and `b`; the point's
    /// range is their bounding box.
    SignChange {
        constraint: usize,
        a: Vec<String>,
        b: Vec<String>,
    },
    /// Interval Newton (Krawczyk) proves a unique zero of the listed
    /// constraints in the point's range, solving for `free` variables.
    Krawczyk { constraints: Vec<usize>, free: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Counterexample { query: Box<Query>, location: Location },
    Sign { term: Term, claim: SignClaim },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Point,
    pub evidence: Evidence,
}

impl Witness {
    pub fn summary(&self) -> String {
        match &self.evidence {
            Evidence::Counterexample { location, .. } => {
                let how = match location {
                    Location::Pointwise => "exact zero",
                    Location::SignChange { .. } => "sign change",
                    Location::Krawczyk { .. } => "interval Newton",
                };
                format!("{} ({how})", self.point)
            }
            Evidence::Sign { term, claim } => {
                format!("{} ({term} {})", self.point, serde_json::to_value(claim).unwrap().as_str().unwrap())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub depth_reached: u32,
    pub boxes_processed: usize,
    pub boxes_remaining: usize,
    pub reason: String,
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: depth {}, {} box(es) processed, {} remaining",
            self.reason, self.depth_reached, self.boxes_processed, self.boxes_remaining
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    Proved,
    Refuted,
    Unknown,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Proved => "PROVED",
            VerdictKind::Refuted => "REFUTED",
            VerdictKind::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "evidence", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Proved(Certificate),
    Refuted(Witness),
    Unknown(BudgetReport),
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Proved(_) => VerdictKind::Proved,
            Verdict::Refuted(_) => VerdictKind::Refuted,
            Verdict::Unknown(_) => VerdictKind::Unknown,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn is_decided(&self) -> bool {
        !self.is_unknown()
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Refuted(w) => Some(w),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Proved(c) => Some(c),
            _ => None,
        }
    }

    /// Conjunction: any refutation wins, then any unknown, else both proofs.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Refuted(w), _) | (_, Verdict::Refuted(w)) => Verdict::Refuted(w),
            (Verdict::Unknown(r), _) | (_, Verdict::Unknown(r)) => Verdict::Unknown(r),
            (Verdict::Proved(a), Verdict::Proved(b)) => {
                let mut parts = Vec::new();
                for c in [a, b] {
                    match c {
                        Certificate::All { parts: inner } => parts.extend(inner),
                        other => parts.push(other),
                    }
                }
                Verdict::Proved(Certificate::All { parts })
            }
        }
    }

    /// Unknown without any search having been run.
    pub fn unknown(reason: impl Into<String>) -> Verdict {
        Verdict::Unknown(BudgetReport { depth_reached: 0, boxes_processed: 0, boxes_remaining: 1, reason: reason.into() })
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut acc: Option<Verdict> = None;
        for v in verdicts {
            acc = Some(match acc {
                None => v,
                Some(a) => a.and(v),
            });
        }
        acc.unwrap_or(Verdict::Proved(Certificate::All { parts: Vec::new() }))
    }

    /// Short human-readable detail: the witness, certificate or budget.
    pub fn detail(&self) -> String {
        match self {
            Verdict::Proved(c) => c.summary(),
            Verdict::Refuted(w) => format!("witness {}", w.summary()),
            Verdict::Unknown(r) => r.to_string(),
        }
    }

    /// Sign-based verdict at a point: Proved if `claim` holds, Refuted if its
    /// negation is certified, Unknown if the sign cannot be settled.
    pub fn from_sign(point: &Point, term: &Term, claim: SignClaim) -> Verdict {
        let negation = match claim {
            SignClaim::Zero => SignClaim::Nonzero,
            SignClaim::Nonzero => SignClaim::Zero,
            SignClaim::Positive => SignClaim::NonPositive,
            SignClaim::Negative => SignClaim::NonNegative,
            SignClaim::NonPositive => SignClaim::Positive,
            SignClaim::NonNegative => SignClaim::Negative,
        };
        match point.sign_of(term) {
            Some(s) if claim.holds(s) => {
                Verdict::Proved(Certificate::Sign { point: point.clone(), term: term.clone(), claim })
            }
            Some(_) => Verdict::Refuted(Witness {
                point: point.clone(),
                evidence: Evidence::Sign { term: term.clone(), claim: negation },
            }),
            None => Verdict::Unknown(BudgetReport {
                depth_reached: 0,
                boxes_processed: 0,
                boxes_remaining: 1,
                reason: format!("sign of {term} at {point} not certified"),
            }),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())
    }
}

/// Decides a query.
pub fn decide(query: &Query, budget: &QueryBudget) -> Verdict {
    assert!(query.arity_ok(), "query terms exceed the box dimension");
    if let Some(trace) = rules::apply(query) {
        return Verdict::Proved(Certificate::Query { query: Box::new(query.clone()), proof: Proof::Rule { trace } });
    }
    if let Some(parts) = split::split(query) {
        let mut proofs = Vec::with_capacity(parts.len());
        let mut unknown = None;
        for part in &parts {
            match decide(part, budget) {
                Verdict::Proved(c) => proofs.push(c),
                Verdict::Refuted(w) => return Verdict::Refuted(w),
                u @ Verdict::Unknown(_) => {
                    unknown.get_or_insert(u);
                }
            }
        }
        return unknown.unwrap_or(Verdict::Proved(Certificate::Split { query: Box::new(query.clone()), parts: proofs }));
    }
    if let Some(v) = enumerate::decide(query) {
        return v;
    }
    search::decide(query, budget)
}

/// Isolating intervals for the distinct real roots of `p` in a 1-D box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootIsolation {
    /// `p` is the zero polynomial: every point is a root.
    EntireBox,
    Roots(Vec<RootInterval>),
}

impl RootIsolation {
    pub fn len(&self) -> Option<usize> {
        match self {
            RootIsolation::EntireBox => None,
            RootIsolation::Roots(r) => Some(r.len()),
        }
    }

    pub fn roots(&self) -> &[RootInterval] {
        match self {
            RootIsolation::EntireBox => &[],
            RootIsolation::Roots(r) => r,
        }
    }
}

pub fn isolate_roots(p: &UPoly, lo: &BigRational, hi: &BigRational) -> RootIsolation {
    if p.is_zero() {
        RootIsolation::EntireBox
    } else {
        RootIsolation::Roots(p.isolate(lo, hi))
    }
}

/// `Z(f)` inside the box is empty.
pub fn is_empty_zero_set(f: &Term, region: &RatBox, budget: &QueryBudget) -> Verdict {
    decide(&Query::empty(region.clone(), vec![f.clone()]), budget)
}

/// `Z(f)` inside the box is contained in `Z(g)`.
pub fn zero_subset(f: &Term, g: &Term, region: &RatBox, budget: &QueryBudget) -> Verdict {
    decide(&Query::vanishes(region.clone(), vec![f.clone()], g.clone()), budget)
}

/// `Z(f) = Z(g)` inside the box: the meet of both containments.
pub fn zero_equal(f: &Term, g: &Term, region: &RatBox, budget: &QueryBudget) -> Verdict {
    zero_subset(f, g, region, budget).and(zero_subset(g, f, region, budget))
}

/// `h` has no zero on the common zero set of the constraints inside the box.
pub fn nonvanishing_on(h: &Term, constraints: &[Term], region: &RatBox, budget: &QueryBudget) -> Verdict {
    let mut cs = constraints.to_vec();
    cs.push(h.clone());
    decide(&Query::empty(region.clone(), cs), budget)
}

pub(crate) fn unit() -> BigRational {
    BigRational::one()
}

pub(crate) fn fmt_point(values: &[BigRational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

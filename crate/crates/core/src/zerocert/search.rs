//! Branch and bound over the box.
//!
//! Boxes are processed level by level. Within a level the work is spread
//! over the rayon pool, but results are consumed in level order, so the
//! verdict (including which witness is reported) does not depend on the
//! number of threads.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::enumerate::{self, PointStatus};
use super::point::{Coord, Point};
use super::{
    BoxTree, BudgetReport, Certificate, Evidence, LeafReason, Location, Proof, Query, QueryBudget,
    Target, Verdict, Witness,
};
use crate::rational::{from_f64, midpoint, simplest_in};
use crate::termlang::{eval, interval_at, Interval, Poly, RatBox, Term};

/// A term with its partial derivatives in the active variables.
pub(super) struct Prepared {
    pub term: Term,
    pub grad: Vec<(usize, Term)>,
}

impl Prepared {
    pub fn new(term: &Term, active: &[usize]) -> Prepared {
        let vars = term.variables();
        let grad = active
            .iter()
            .filter(|v| vars.contains(v))
            .map(|&v| (v, term.differentiate(v)))
            .collect();
        Prepared { term: term.clone(), grad }
    }

    /// Natural enclosure intersected with the mean-value form.
    pub fn enclose(&self, xs: &[Interval]) -> Interval {
        let natural = interval_at(&self.term, xs);
        if natural.is_exact_zero() || self.grad.is_empty() {
            return natural;
        }
        let center: Vec<Interval> = xs.iter().map(|x| Interval::point(x.mid())).collect();
        let mut mv = interval_at(&self.term, &center);
        for (v, d) in &self.grad {
            let dv = interval_at(d, xs);
            mv = mv.add(&dv.mul(&xs[*v].sub(&center[*v])));
        }
        natural.intersect(&mv).unwrap_or(natural)
    }

    fn value_f64(&self, x: &[f64]) -> f64 {
        crate::termlang::eval_f64(&self.term, x)
    }

    fn partial_f64(&self, var: usize, x: &[f64]) -> f64 {
        self.grad
            .iter()
            .find(|(v, _)| *v == var)
            .map_or(0.0, |(_, d)| crate::termlang::eval_f64(d, x))
    }

    fn partial_interval(&self, var: usize, xs: &[Interval]) -> Interval {
        self.grad
            .iter()
            .find(|(v, _)| *v == var)
            .map_or(Interval::point(0.0), |(_, d)| interval_at(d, xs))
    }
}

/// The query with constraint indices, active variables and derivatives.
pub(super) struct Problem<'a> {
    pub query: &'a Query,
    pub active: Vec<usize>,
    /// (original index, prepared term); zero constraints are dropped.
    pub constraints: Vec<(usize, Prepared)>,
    pub target: Option<Prepared>,
    pub guard: Option<Prepared>,
}

impl<'a> Problem<'a> {
    pub fn new(query: &'a Query) -> Problem<'a> {
        let active: Vec<usize> = enumerate::active_vars(query).into_iter().collect();
        let constraints = query
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !Poly::from_term(c).is_zero())
            .map(|(i, c)| (i, Prepared::new(c, &active)))
            .collect();
        let (target, guard) = match &query.target {
            Target::Vanishes { term } => (Some(Prepared::new(term, &active)), None),
            Target::Positive { term, guard } => {
                (Some(Prepared::new(term, &active)), guard.as_ref().map(|g| Prepared::new(g, &active)))
            }
        };
        Problem { query, active, constraints, target, guard }
    }

    fn positive(&self) -> bool {
        matches!(self.query.target, Target::Positive { .. })
    }

    /// Target certified on the whole box, if so.
    pub(super) fn target_holds(&self, xs: &[Interval]) -> bool {
        if let Some(g) = &self.guard {
            if g.enclose(xs).is_exact_zero() {
                return true;
            }
        }
        let t = self.target.as_ref().expect("target");
        let iv = t.enclose(xs);
        if self.positive() {
            iv.lo > 0.0
        } else {
            iv.is_exact_zero()
        }
    }

    /// Target certifiably fails everywhere on the box.
    pub(super) fn target_fails(&self, xs: &[Interval]) -> bool {
        let iv = self.target.as_ref().expect("target").enclose(xs);
        if self.positive() {
            iv.hi <= 0.0 && self.guard.as_ref().is_none_or(|g| g.enclose(xs).excludes_zero())
        } else {
            iv.excludes_zero()
        }
    }

    /// Certified failure of the target at an exact point.
    fn target_fails_at(&self, p: &[BigRational]) -> bool {
        let point = Point::exact(p.to_vec());
        enumerate::target_at(&point, &self.query.target) == Some(false)
    }

    fn constraints_vanish_at(&self, p: &[BigRational]) -> bool {
        self.constraints
            .iter()
            .all(|(_, c)| c.term.exact_value(p).is_some_and(|v| num_traits::Zero::is_zero(&v)))
    }

    fn counterexample(&self, point: Point, location: Location) -> Witness {
        Witness {
            point,
            evidence: Evidence::Counterexample { query: Box::new(self.query.clone()), location },
        }
    }

    /// Fills inactive coordinates with the simplest value in range.
    fn full_point(&self, region: &RatBox, active_coords: &[(usize, Coord)]) -> Point {
        let mut coords: Vec<Coord> = (0..region.dim())
            .map(|i| Coord::exact(simplest_in(self.query.region.lo(i), self.query.region.hi(i))))
            .collect();
        for (v, c) in active_coords {
            coords[*v] = c.clone();
        }
        Point { coords }
    }
}

enum Outcome {
    Cleared(LeafReason),
    Refuted(Witness),
    Open,
}

#[derive(Clone)]
struct Node {
    region: RatBox,
    path: Vec<(usize, bool)>,
}

fn can_split(region: &RatBox, active: &[usize], depth: u32, budget: &QueryBudget) -> Option<usize> {
    if depth >= budget.max_depth {
        return None;
    }
    let d = region.widest(active)?;
    (region.width(d) > budget.min_width).then_some(d)
}

fn examine(pb: &Problem, region: &RatBox) -> Outcome {
    let xs = region.to_intervals();
    for (i, c) in &pb.constraints {
        if c.enclose(&xs).excludes_zero() {
            return Outcome::Cleared(LeafReason::ConstraintNonzero { index: *i });
        }
    }
    if pb.target_holds(&xs) {
        return Outcome::Cleared(LeafReason::TargetHolds);
    }
    for p in [region.center(), region.simplest_point()] {
        if pb.constraints_vanish_at(&p) && pb.target_fails_at(&p) {
            let coords = pb.active.iter().map(|&v| (v, Coord::exact(p[v].clone()))).collect::<Vec<_>>();
            return Outcome::Refuted(pb.counterexample(pb.full_point(region, &coords), Location::Pointwise));
        }
    }
    let fails = pb.target_fails(&xs);
    if fails && pb.constraints.len() == 1 {
        if let Some(w) = sign_change(pb, region) {
            return Outcome::Refuted(w);
        }
    }
    if !pb.constraints.is_empty() {
        if let Some(found) = newton_zero(pb, region) {
            match found {
                Found::Exact(p) => {
                    if pb.target_fails_at(&p) {
                        let coords = pb.active.iter().map(|&v| (v, Coord::exact(p[v].clone()))).collect::<Vec<_>>();
                        return Outcome::Refuted(pb.counterexample(pb.full_point(region, &coords), Location::Pointwise));
                    }
                }
                Found::Verified { point, free } => {
                    if pb.target_fails(&point.region().to_intervals()) {
                        let constraints = pb.constraints.iter().map(|(i, _)| *i).collect();
                        return Outcome::Refuted(pb.counterexample(point, Location::Krawczyk { constraints, free }));
                    }
                }
            }
        }
    }
    Outcome::Open
}

/// Single constraint with opposite certified signs at two points of the box.
fn sign_change(pb: &Problem, region: &RatBox) -> Option<Witness> {
    let (index, c) = &pb.constraints[0];
    let mut probes = vec![region.center(), region.simplest_point()];
    if pb.active.len() <= 8 {
        for mask in 0..(1u32 << pb.active.len()) {
            let mut p = region.center();
            for (k, &v) in pb.active.iter().enumerate() {
                p[v] = if mask & (1 << k) == 0 { region.lo(v).clone() } else { region.hi(v).clone() };
            }
            probes.push(p);
        }
    }
    let signs: Vec<Option<Ordering>> = probes.iter().map(|p| eval(&c.term, p).sign()).collect();
    let pos = signs.iter().position(|s| *s == Some(Ordering::Greater))?;
    let neg = signs.iter().position(|s| *s == Some(Ordering::Less))?;
    let (mut a, mut b) = (probes[pos].clone(), probes[neg].clone());
    for _ in 0..64 {
        let m: Vec<BigRational> = a.iter().zip(&b).map(|(x, y)| midpoint(x, y)).collect();
        match eval(&c.term, &m).sign() {
            Some(Ordering::Greater) => a = m,
            Some(Ordering::Less) => b = m,
            Some(Ordering::Equal) => {
                let coords = pb.active.iter().map(|&v| (v, Coord::exact(m[v].clone()))).collect::<Vec<_>>();
                return Some(pb.counterexample(pb.full_point(region, &coords), Location::Pointwise));
            }
            None => break,
        }
    }
    let coords: Vec<(usize, Coord)> = pb
        .active
        .iter()
        .map(|&v| {
            let (lo, hi) = if a[v] <= b[v] { (&a[v], &b[v]) } else { (&b[v], &a[v]) };
            let c = if lo == hi { Coord::exact(lo.clone()) } else { Coord::Range { lo: lo.clone(), hi: hi.clone() } };
            (v, c)
        })
        .collect();
    let location = Location::SignChange {
        constraint: *index,
        a: super::fmt_point(&a),
        b: super::fmt_point(&b),
    };
    Some(pb.counterexample(pb.full_point(region, &coords), location))
}

pub(super) enum Found {
    Exact(Vec<BigRational>),
    /// A unique zero of all constraints, free coordinates as ranges.
    Verified { point: Point, free: Vec<usize> },
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Variables to solve for: all active ones, or for underdetermined systems
/// the ones with the largest partial derivatives at the center.
fn choose_free(pb: &Problem, x: &[f64]) -> Vec<usize> {
    let m = pb.constraints.len();
    if m >= pb.active.len() {
        return pb.active.clone();
    }
    let mut scored: Vec<(f64, usize)> = pb
        .active
        .iter()
        .map(|&v| {
            let s: f64 = pb.constraints.iter().map(|(_, c)| c.partial_f64(v, x).abs()).sum();
            (if s.is_finite() { s } else { 0.0 }, v)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut free: Vec<usize> = scored.into_iter().take(m).map(|(_, v)| v).collect();
    free.sort_unstable();
    free
}

/// Float Newton (least squares) for the constraints in the free variables.
fn newton(pb: &Problem, start: &[f64], free: &[usize], lo: &[f64], hi: &[f64]) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    let k = free.len();
    for _ in 0..40 {
        let f: Vec<f64> = pb.constraints.iter().map(|(_, c)| c.value_f64(&x)).collect();
        if f.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let jac: Vec<Vec<f64>> = pb
            .constraints
            .iter()
            .map(|(_, c)| free.iter().map(|&v| c.partial_f64(v, &x)).collect())
            .collect();
        // Normal equations (J^T J + mu I) dx = -J^T f.
        let mut a = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for (row, fi) in jac.iter().zip(&f) {
            for p in 0..k {
                rhs[p] -= row[p] * fi;
                for q in 0..k {
                    a[p][q] += row[p] * row[q];
                }
            }
        }
        let scale = (0..k).map(|p| a[p][p]).fold(0.0f64, f64::max).max(1e-300);
        for (p, row) in a.iter_mut().enumerate() {
            row[p] += 1e-15 * scale;
        }
        let dx = solve(a, rhs)?;
        let mut step = 0.0f64;
        for (j, &v) in free.iter().enumerate() {
            x[v] += dx[j];
            step = step.max(dx[j].abs() / (1.0 + x[v].abs()));
            let w = hi[v] - lo[v];
            if !(x[v] >= lo[v] - w && x[v] <= hi[v] + w) {
                return None;
            }
        }
        if step < 1e-15 {
            break;
        }
    }
    let residual = pb.constraints.iter().map(|(_, c)| c.value_f64(&x).abs()).fold(0.0, f64::max);
    (residual < 1e-8).then_some(x)
}

/// Gaussian elimination with partial pivoting.
pub(super) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(Ordering::Equal))?;
        if a[piv][col].abs() < 1e-300 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub(super) fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve(a.to_vec(), e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Krawczyk test: the constraints (square in the free variables, others
/// held at their degenerate values) have a unique zero in `xs`.
pub(super) fn krawczyk(constraints: &[&Prepared], free: &[usize], xs: &[Interval]) -> bool {
    let k = free.len();
    if constraints.len() != k || k == 0 {
        return false;
    }
    let center: Vec<Interval> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| if free.contains(&i) { Interval::point(x.mid()) } else { *x })
        .collect();
    let fc: Vec<Interval> = constraints.iter().map(|c| interval_at(&c.term, &center)).collect();
    let jx: Vec<Vec<Interval>> = constraints
        .iter()
        .map(|c| free.iter().map(|&v| c.partial_interval(v, xs)).collect())
        .collect();
    let mid: Vec<Vec<f64>> = jx.iter().map(|row| row.iter().map(Interval::mid).collect()).collect();
    let Some(y) = invert(&mid) else { return false };
    for (j, &vj) in free.iter().enumerate() {
        let mut kj = center[vj];
        for i in 0..k {
            kj = kj.sub(&Interval::point(y[j][i]).mul(&fc[i]));
        }
        for (l, &vl) in free.iter().enumerate() {
            let mut entry = Interval::point(if j == l { 1.0 } else { 0.0 });
            for i in 0..k {
                entry = entry.sub(&Interval::point(y[j][i]).mul(&jx[i][l]));
            }
            kj = kj.add(&entry.mul(&xs[vl].sub(&center[vl])));
        }
        if !kj.interior_of(&xs[vj]) {
            return false;
        }
    }
    true
}

/// Looks for a zero of all constraints in the box by Newton's method, then
/// certifies it exactly (rational snapping) or by the Krawczyk test.
fn newton_zero(pb: &Problem, region: &RatBox) -> Option<Found> {
    let dim = region.dim();
    let center = region.center();
    let mut x: Vec<f64> = center.iter().map(to_f64).collect();
    let lo: Vec<f64> = (0..dim).map(|i| to_f64(region.lo(i))).collect();
    let hi: Vec<f64> = (0..dim).map(|i| to_f64(region.hi(i))).collect();
    for (i, q) in pb.query.region.center().iter().enumerate() {
        if !pb.active.contains(&i) {
            x[i] = to_f64(q);
        }
    }
    let free = choose_free(pb, &x);
    let sol = newton(pb, &x, &free, &lo, &hi)?;
    if free.iter().any(|&v| sol[v] < lo[v] || sol[v] > hi[v]) {
        return None;
    }
    // Exact rational zero nearby?
    for tol in [1e-12, 1e-9, 1e-6] {
        let mut p = center.clone();
        for &v in &free {
            let r = tol * (1.0 + sol[v].abs());
            let (a, b) = (from_f64(sol[v] - r)?, from_f64(sol[v] + r)?);
            p[v] = simplest_in(&a, &b);
        }
        if pb.query.region.contains(&p) && pb.constraints_vanish_at(&p) {
            return Some(Found::Exact(p));
        }
    }
    if pb.constraints.len() != free.len() {
        return None;
    }
    let refs: Vec<&Prepared> = pb.constraints.iter().map(|(_, c)| c).collect();
    for rel in [1e-10, 1e-7, 1e-4] {
        let mut coords: Vec<Coord> = center.iter().cloned().map(Coord::exact).collect();
        for &v in &free {
            let r = rel * (1.0 + sol[v].abs());
            coords[v] = Coord::Range { lo: from_f64(sol[v] - r)?, hi: from_f64(sol[v] + r)? };
        }
        let point = Point { coords };
        if !point.within(&pb.query.region) {
            continue;
        }
        if krawczyk(&refs, &free, &point.region().to_intervals()) {
            let active: Vec<(usize, Coord)> = pb.active.iter().map(|&v| (v, point.coords[v].clone())).collect();
            return Some(Found::Verified { point: pb.full_point(region, &active), free });
        }
    }
    None
}

/// A box around `p` in which the Krawczyk test proves `p` is the only zero.
fn isolating_box(refs: &[&Prepared], active: &[usize], p: &Point) -> Option<Vec<Interval>> {
    let own = p.region().to_intervals();
    let approx = p.approx();
    for rel in [1e-2, 1e-3, 1e-4, 1e-6, 1e-8] {
        let mut xs = own.clone();
        for &v in active {
            let r = rel * (1.0 + approx[v].abs());
            xs[v] = Interval::new(own[v].lo - r, own[v].hi + r);
        }
        if krawczyk(refs, active, &xs) {
            return Some(xs);
        }
    }
    None
}

/// Builds the bisection tree from leaf paths.
fn build_tree(mut leaves: Vec<(Vec<(usize, bool)>, LeafReason)>) -> BoxTree {
    leaves.sort_by(|a, b| a.0.iter().map(|p| p.1).cmp(b.0.iter().map(|p| p.1)));
    fn go(leaves: &[(Vec<(usize, bool)>, LeafReason)], depth: usize) -> BoxTree {
        if leaves.len() == 1 && leaves[0].0.len() == depth {
            return BoxTree::Leaf(leaves[0].1.clone());
        }
        let dim = leaves[0].0[depth].0;
        let split = leaves.partition_point(|l| !l.0[depth].1);
        BoxTree::Split {
            dim,
            lower: Box::new(go(&leaves[..split], depth + 1)),
            upper: Box::new(go(&leaves[split..], depth + 1)),
        }
    }
    go(&leaves, 0)
}

pub(super) fn decide(query: &Query, budget: &QueryBudget) -> Verdict {
    let pb = Problem::new(query);
    let mut level = vec![Node { region: query.region.clone(), path: Vec::new() }];
    let mut leaves = Vec::new();
    let mut undecided = 0usize;
    let mut processed = 0usize;
    let mut depth = 0u32;
    loop {
        if level.is_empty() {
            break;
        }
        if processed + level.len() > budget.max_boxes {
            return Verdict::Unknown(BudgetReport {
                depth_reached: depth,
                boxes_processed: processed,
                boxes_remaining: level.len() + undecided,
                reason: "box limit reached".into(),
            });
        }
        let outcomes: Vec<Outcome> = level.par_iter().map(|n| examine(&pb, &n.region)).collect();
        processed += level.len();
        let mut next = Vec::new();
        for (node, outcome) in level.into_iter().zip(outcomes) {
            match outcome {
                Outcome::Refuted(w) => return Verdict::Refuted(w),
                Outcome::Cleared(reason) => leaves.push((node.path, reason)),
                Outcome::Open => match can_split(&node.region, &pb.active, depth, budget) {
                    Some(d) => {
                        let (l, u) = node.region.bisect(d);
                        let mut pl = node.path.clone();
                        pl.push((d, false));
                        let mut pu = node.path;
                        pu.push((d, true));
                        next.push(Node { region: l, path: pl });
                        next.push(Node { region: u, path: pu });
                    }
                    None => undecided += 1,
                },
            }
        }
        level = next;
        if !level.is_empty() {
            depth += 1;
        }
    }
    if undecided > 0 {
        return Verdict::Unknown(BudgetReport {
            depth_reached: depth,
            boxes_processed: processed,
            boxes_remaining: undecided,
            reason: "depth or width limit reached".into(),
        });
    }
    Verdict::Proved(Certificate::Query {
        query: Box::new(query.clone()),
        proof: Proof::Boxes { tree: build_tree(leaves) },
    })
}

/// Certified points of the common zero set of `constraints` in the box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSet {
    pub points: Vec<Point>,
    /// Every zero in the box is listed (exactly once).
    pub complete: bool,
}

/// Enumerates zeros; exact when variables are pinned by univariate
/// polynomials, otherwise by subdivision with interval Newton.
pub fn find_zeros(region: &RatBox, constraints: &[Term], budget: &QueryBudget) -> ZeroSet {
    zeros_sliced(region, constraints, budget, &BTreeSet::new())
}

/// Slices along a variable whose univariate constraint has only rational
/// roots, so later variables may become univariate after substitution.
fn zeros_sliced(region: &RatBox, constraints: &[Term], budget: &QueryBudget, sliced: &BTreeSet<usize>) -> ZeroSet {
    let query = Query::empty(region.clone(), constraints.to_vec());
    if super::rules::apply(&query).is_some() {
        return ZeroSet { points: Vec::new(), complete: true };
    }
    let active: BTreeSet<usize> = constraints.iter().flat_map(Term::variables).collect();
    if !active.is_empty() && enumerate::pin_variables(region, constraints, &active).is_none() {
        for &v in active.difference(sliced) {
            let Some(roots) = rational_roots(region, constraints, v) else { continue };
            let mut points = Vec::new();
            let mut complete = true;
            for r in roots {
                let images: Vec<Term> =
                    (0..region.dim()).map(|i| if i == v { Term::constant(r.clone()) } else { Term::var(i) }).collect();
                let mut sub: Vec<Term> =
                    constraints.iter().map(|c| c.substitute(&images).normalize()).filter(|c| !c.is_zero()).collect();
                sub.push(Term::var(v) - Term::constant(r));
                let mut inner = sliced.clone();
                inner.insert(v);
                let z = zeros_sliced(region, &sub, budget, &inner);
                complete &= z.complete;
                points.extend(z.points);
            }
            return ZeroSet { points, complete };
        }
    }
    zeros_direct(region, constraints, budget)
}

/// The roots in the box of some nonconstant univariate constraint in `v`,
/// when they are all rational.
fn rational_roots(region: &RatBox, constraints: &[Term], v: usize) -> Option<Vec<BigRational>> {
    constraints.iter().find_map(|c| {
        let u = c.as_polynomial()?.to_univariate(v)?;
        if u.is_constant() {
            return None;
        }
        let s = u.squarefree();
        s.isolate(region.lo(v), region.hi(v))
            .iter()
            .map(|r| Coord::from_root(&s, r).as_exact().cloned())
            .collect()
    })
}

fn zeros_direct(region: &RatBox, constraints: &[Term], budget: &QueryBudget) -> ZeroSet {
    let query = Query::empty(region.clone(), constraints.to_vec());
    if super::rules::apply(&query).is_some() {
        return ZeroSet { points: Vec::new(), complete: true };
    }
    let active: BTreeSet<usize> = constraints.iter().flat_map(Term::variables).collect();
    let free_dims = active.len() < region.dim();
    if active.is_empty() {
        // All constraints are zero: the whole box.
        return ZeroSet { points: Vec::new(), complete: false };
    }
    if let Some(vars) = enumerate::pin_variables(region, constraints, &active) {
        let sources: BTreeSet<usize> = vars.iter().flat_map(|v| v.sources.iter().copied()).collect();
        let mut points = Vec::new();
        let mut decided = true;
        for indices in enumerate::candidates(&vars) {
            let p = enumerate::candidate_point(region, &vars, &indices);
            match enumerate::point_status(&p, constraints, &sources) {
                PointStatus::OnZeroSet => points.push(p),
                PointStatus::Excluded(_) => {}
                PointStatus::Undecided => {
                    decided = false;
                    break;
                }
            }
        }
        if decided {
            return ZeroSet { points, complete: !free_dims };
        }
    }
    let pb = Problem::new(&query);
    let refs: Vec<&Prepared> = pb.constraints.iter().map(|(_, c)| c).collect();
    let square = refs.len() == pb.active.len();
    let mut level = vec![region.clone()];
    let mut points: Vec<Point> = Vec::new();
    // Boxes around found zeros that provably contain no other zero.
    let mut isolated: Vec<Vec<Interval>> = Vec::new();
    let mut complete = !free_dims;
    let mut processed = 0usize;
    let mut depth = 0u32;
    while !level.is_empty() {
        if processed + level.len() > budget.max_boxes {
            complete = false;
            break;
        }
        processed += level.len();
        let results: Vec<(bool, Option<Point>, bool)> = level
            .par_iter()
            .map(|b| {
                let xs = b.to_intervals();
                if pb.constraints.iter().any(|(_, c)| c.enclose(&xs).excludes_zero()) {
                    return (true, None, false);
                }
                let found = match newton_zero(&pb, b) {
                    Some(Found::Exact(p)) => Some(Point::exact(p)),
                    Some(Found::Verified { point, .. }) => Some(point),
                    None => None,
                };
                let unique = square && krawczyk(&refs, &pb.active, &xs);
                (false, found, unique)
            })
            .collect();
        let mut next = Vec::new();
        for (b, (cleared, found, unique)) in level.into_iter().zip(results) {
            if cleared {
                continue;
            }
            if let Some(p) = &found {
                if points.iter().all(|q| p.distinct_from(q)) {
                    points.push(p.clone());
                    if square {
                        isolated.extend(isolating_box(&refs, &pb.active, p));
                    }
                }
            }
            if unique && found.as_ref().is_some_and(|p| p.within(&b)) {
                continue;
            }
            let xs = b.to_intervals();
            if isolated.iter().any(|u| pb.active.iter().all(|&v| xs[v].subset_of(&u[v]))) {
                continue;
            }
            match can_split(&b, &pb.active, depth, budget) {
                Some(d) => {
                    let (l, u) = b.bisect(d);
                    next.push(l);
                    next.push(u);
                }
                None => complete = false,
            }
        }
        level = next;
        depth += 1;
    }
    // Overlapping ranges may describe one zero twice; only claim completeness
    // when all listed points are pairwise distinct.
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if !points[i].distinct_from(&points[j]) {
                complete = false;
            }
        }
    }
    points.sort_by(|a, b| {
        a.approx()
            .iter()
            .zip(b.approx().iter())
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    ZeroSet { points, complete }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::parse_term;

    fn t(s: &str, n: usize) -> Term {
        parse_term(s, n).unwrap()
    }

    #[test]
    fn bump_level_crossing_is_refuted_by_sign_change() {
        let region = RatBox::parse("-2,2").unwrap();
        let q = Query::empty(region.clone(), vec![t("bump(x0) - 1/4", 1)]);
        let v = decide(&q, &QueryBudget::default());
        let w = v.witness().expect("refuted");
        let x = w.point.approx()[0].abs();
        // bump(x) = 1/4 where 1/(1-x^2) = ln 4.
        let expected = (1.0 - 1.0 / 4f64.ln()).sqrt();
        assert!((x - expected).abs() < 1e-9, "{x} vs {expected}");
        let q = Query::empty(region, vec![t("bump(x0) - 1/2", 1)]);
        assert!(decide(&q, &QueryBudget::default()).is_proved());
    }

    #[test]
    fn two_dimensional_refutation_by_krawczyk() {
        let region = RatBox::parse("-2,2;-2,2").unwrap();
        let q = Query::vanishes(region, vec![t("x0^2 + x1^2 - 2", 2), t("x0 - x1 - 1/3", 2)], t("x0", 2));
        let v = decide(&q, &QueryBudget::default());
        assert!(v.is_refuted(), "{v:?}");
    }

    #[test]
    fn circle_positive_target_is_proved_by_boxes() {
        let region = RatBox::parse("-2,2;-2,2").unwrap();
        let q = Query::positive(region, vec![t("x0^2 + x1^2 - 1", 2)], t("x0 + 3", 2), None);
        let v = decide(&q, &QueryBudget::default());
        assert!(v.is_proved(), "{v:?}");
    }

    #[test]
    fn zeros_of_a_regular_system_are_complete() {
        let region = RatBox::parse("-2,2;-2,2").unwrap();
        let z = find_zeros(&region, &[t("x0^2 + x1^2 - 2", 2), t("x0 - x1", 2)], &QueryBudget::default());
        assert!(z.complete, "{z:?}");
        assert_eq!(z.points.len(), 2);
        let z = find_zeros(&region, &[t("x0^2 + x1^2 - 1", 2), t("x0*x1 - 1/4", 2)], &QueryBudget::default());
        assert_eq!(z.points.len(), 4);
        assert!(z.complete);
    }

    #[test]
    fn tree_building_matches_paths() {
        let leaves = vec![
            (vec![(0, true)], LeafReason::TargetHolds),
            (vec![(0, false), (0, false)], LeafReason::ConstraintNonzero { index: 0 }),
            (vec![(0, false), (0, true)], LeafReason::TargetHolds),
        ];
        let tree = build_tree(leaves);
        assert_eq!(tree.leaf_count(), 3);
        assert!(matches!(tree, BoxTree::Split { dim: 0, .. }));
    }
}

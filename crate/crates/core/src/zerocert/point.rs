//! Certified points: coordinates that are rational, isolated algebraic, or
//! only known to lie in a small range.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{as_string, midpoint, pow2};
use crate::termlang::{eval, Interval, RatBox, Term, Value};
use crate::upoly::{RootInterval, UPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coord {
    Exact {
        #[serde(with = "as_string")]
        value: BigRational,
    },
    /// The unique root of the square-free `poly` in the open interval.
    Root {
        poly: UPoly,
        #[serde(with = "as_string")]
        lo: BigRational,
        #[serde(with = "as_string")]
        hi: BigRational,
    },
    /// Some value in the closed interval, certified by other means.
    Range {
        #[serde(with = "as_string")]
        lo: BigRational,
        #[serde(with = "as_string")]
        hi: BigRational,
    },
}

impl Coord {
    pub fn exact(value: BigRational) -> Coord {
        Coord::Exact { value }
    }

    pub fn from_root(poly: &UPoly, root: &RootInterval) -> Coord {
        match root {
            RootInterval::Exact(q) => Coord::exact(q.clone()),
            RootInterval::Open { .. } => {
                // Rational roots with small denominators show up as the
                // simplest rational of a slightly refined interval.
                let mut r = root.clone();
                for _ in 0..24 {
                    let q = crate::rational::simplest_in(r.lo(), r.hi());
                    if poly.eval(&q).is_zero() {
                        return Coord::exact(q);
                    }
                    r = r.bisect(poly);
                    if let RootInterval::Exact(q) = r {
                        return Coord::exact(q);
                    }
                }
                Coord::Root { poly: poly.clone(), lo: r.lo().clone(), hi: r.hi().clone() }
            }
        }
    }

    pub fn lo(&self) -> &BigRational {
        match self {
            Coord::Exact { value } => value,
            Coord::Root { lo, .. } | Coord::Range { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &BigRational {
        match self {
            Coord::Exact { value } => value,
            Coord::Root { hi, .. } | Coord::Range { hi, .. } => hi,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Coord::Exact { value } => Some(value),
            _ => None,
        }
    }

    /// Nearest double, refining algebraic coordinates first.
    pub fn approx(&self) -> f64 {
        let c = self.refined(&pow2(-60));
        midpoint(c.lo(), c.hi()).to_f64().unwrap_or(f64::NAN)
    }

    pub fn interval(&self) -> Interval {
        Interval::from_rationals(self.lo(), self.hi())
    }

    /// Narrows a `Root` coordinate to width at most `width`.
    pub fn refined(&self, width: &BigRational) -> Coord {
        match self {
            Coord::Root { poly, lo, hi } => {
                let r = RootInterval::Open { lo: lo.clone(), hi: hi.clone() }.refine(poly, width);
                Coord::from_root(poly, &r)
            }
            _ => self.clone(),
        }
    }

    pub(super) fn disjoint_from(&self, other: &Coord) -> bool {
        let strict = |c: &Coord| matches!(c, Coord::Root { .. });
        // Root intervals are open, so touching endpoints do not overlap.
        if strict(self) || strict(other) {
            self.hi() <= other.lo() || other.hi() <= self.lo()
        } else {
            self.hi() < other.lo() || other.hi() < self.lo()
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Exact { value } => write!(f, "{}", crate::rational::format_rational(value)),
            _ => {
                let c = self.refined(&pow2(-50));
                match c {
                    Coord::Exact { value } => write!(f, "{}", crate::rational::format_rational(&value)),
                    _ => write!(f, "~{:.12}", c.approx()),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<Coord>,
}

impl Point {
    pub fn exact(values: Vec<BigRational>) -> Point {
        Point { coords: values.into_iter().map(Coord::exact).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(|c| c.as_exact().is_some())
    }

    pub fn as_rationals(&self) -> Option<Vec<BigRational>> {
        self.coords.iter().map(|c| c.as_exact().cloned()).collect()
    }

    pub fn approx(&self) -> Vec<f64> {
        self.coords.iter().map(Coord::approx).collect()
    }

    pub fn region(&self) -> RatBox {
        RatBox::new(self.coords.iter().map(|c| (c.lo().clone(), c.hi().clone())).collect())
            .expect("coordinate ranges are ordered")
    }

    pub fn refined(&self, width: &BigRational) -> Point {
        Point { coords: self.coords.iter().map(|c| c.refined(width)).collect() }
    }

    /// Certainly different points.
    pub fn distinct_from(&self, other: &Point) -> bool {
        self.coords.iter().zip(&other.coords).any(|(a, b)| a.disjoint_from(b))
    }

    pub fn within(&self, region: &RatBox) -> bool {
        self.coords
            .iter()
            .enumerate()
            .all(|(i, c)| region.lo(i) <= c.lo() && c.hi() <= region.hi(i))
    }

    /// Extends with extra exact coordinates (e.g. values of eliminated variables).
    pub fn with_extra(&self, extra: Coord) -> Point {
        let mut coords = self.coords.clone();
        coords.push(extra);
        Point { coords }
    }

    /// Substitutes the exact coordinates into `t`, leaving the others symbolic.
    fn partial(&self, t: &Term) -> Term {
        let images: Vec<Term> = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| match c.as_exact() {
                Some(q) => Term::constant(q.clone()),
                None => Term::var(i),
            })
            .collect();
        t.substitute(&images).normalize()
    }

    /// Certified sign of `t` at the point, if one can be established.
    pub fn sign_of(&self, t: &Term) -> Option<Ordering> {
        if let Some(values) = self.as_rationals() {
            return eval(t, &values).sign();
        }
        let reduced = self.partial(t);
        if let Some(c) = reduced.as_constant() {
            return Some(c.cmp(&BigRational::zero()));
        }
        let vars = reduced.variables();
        if vars.len() == 1 {
            let v = *vars.iter().next().unwrap();
            if let (Some(p), Coord::Root { poly, lo, hi }) =
                (reduced.as_polynomial().and_then(|p| p.to_univariate(v)), &self.coords[v])
            {
                // The root of `poly` in (lo, hi) is a root of `p` iff the gcd keeps it.
                if poly.gcd(&p).count_roots_open(lo, hi) > 0 {
                    return Some(Ordering::Equal);
                }
                return self.refine_sign(&reduced, 400);
            }
        }
        self.refine_sign(&reduced, 60)
    }

    /// Sign from interval evaluation, bisecting root coordinates if needed.
    fn refine_sign(&self, t: &Term, rounds: usize) -> Option<Ordering> {
        let mut coords = self.coords.clone();
        for _ in 0..=rounds {
            let xs: Vec<Interval> = coords.iter().map(Coord::interval).collect();
            let iv = crate::termlang::interval_at(t, &xs);
            if iv.lo > 0.0 {
                return Some(Ordering::Greater);
            }
            if iv.hi < 0.0 {
                return Some(Ordering::Less);
            }
            if iv.is_exact_zero() {
                return Some(Ordering::Equal);
            }
            let mut progressed = false;
            for c in coords.iter_mut() {
                if let Coord::Root { poly, lo, hi } = c {
                    let width = (&*hi - &*lo) / crate::rational::int(2);
                    *c = Coord::Root { poly: poly.clone(), lo: lo.clone(), hi: hi.clone() }.refined(&width);
                    progressed = true;
                }
            }
            if !progressed {
                if let Some(values) = coords.iter().map(|c| c.as_exact().cloned()).collect::<Option<Vec<_>>>() {
                    return eval(t, &values).sign();
                }
                return None;
            }
        }
        None
    }

    /// Value at the point: exact when rational, else an enclosure.
    pub fn value_of(&self, t: &Term) -> Value {
        if let Some(values) = self.as_rationals() {
            return eval(t, &values);
        }
        let fine = self.refined(&pow2(-60));
        if let Some(values) = fine.as_rationals() {
            return eval(t, &values);
        }
        let xs: Vec<Interval> = fine.coords.iter().map(Coord::interval).collect();
        Value::Enclosure(crate::termlang::interval_at(t, &xs))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(Coord::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

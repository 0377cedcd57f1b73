//! Outward-rounded interval arithmetic over `f64`.
//!
//! Each elementary operation computes its rounding error exactly (two-sum,
//! fused multiply-add) and steps one ulp outward only when the result was
//! inexact, so exact values such as `[0, 0]` survive evaluation.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{f64_bounds, format_rational, from_f64, midpoint, simplest_in};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

const ENTIRE: Interval = Interval {
    lo: f64::NEG_INFINITY,
    hi: f64::INFINITY,
};

fn add_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s.is_nan() { f64::NEG_INFINITY } else { s };
    }
    if add_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s.is_nan() { f64::INFINITY } else { s };
    }
    if add_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn mul_exact_err(a: f64, b: f64, p: f64) -> Option<f64> {
    // Below this magnitude the fma residual may itself be rounded.
    if p != 0.0 && p.abs() < 1e-290 {
        return None;
    }
    Some(a.mul_add(b, -p))
}

fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return if p.is_nan() { f64::NEG_INFINITY } else { p };
    }
    match mul_exact_err(a, b, p) {
        Some(e) if e >= 0.0 => p,
        _ => p.next_down(),
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return if p.is_nan() { f64::INFINITY } else { p };
    }
    match mul_exact_err(a, b, p) {
        Some(e) if e <= 0.0 => p,
        _ => p.next_up(),
    }
}

fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return if q.is_nan() { f64::NEG_INFINITY } else { q };
    }
    if q == 0.0 {
        return if a == 0.0 { 0.0 } else { (0.0f64).next_down().min(q) };
    }
    // q*b - a has the sign of (q - a/b) * b.
    let r = q.mul_add(b, -a);
    if r == 0.0 && q.abs() >= 1e-290 {
        q
    } else if (r > 0.0) == (b > 0.0) || r == 0.0 {
        q.next_down()
    } else {
        q
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return if q.is_nan() { f64::INFINITY } else { q };
    }
    if q == 0.0 {
        return if a == 0.0 { 0.0 } else { (0.0f64).next_up().max(q) };
    }
    let r = q.mul_add(b, -a);
    if r == 0.0 && q.abs() >= 1e-290 {
        q
    } else if (r < 0.0) == (b > 0.0) || r == 0.0 {
        q.next_up()
    } else {
        q
    }
}

fn widen_down(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |v, _| v.next_down())
}

fn widen_up(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |v, _| v.next_up())
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        if lo.is_nan() || hi.is_nan() {
            return ENTIRE;
        }
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    pub fn entire() -> Interval {
        ENTIRE
    }

    pub fn from_rational(q: &BigRational) -> Interval {
        let (lo, hi) = f64_bounds(q);
        Interval::new(lo, hi)
    }

    pub fn from_rationals(lo: &BigRational, hi: &BigRational) -> Interval {
        Interval::new(f64_bounds(lo).0, f64_bounds(hi).1)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            let m = self.lo / 2.0 + self.hi / 2.0;
            m.clamp(self.lo, self.hi)
        } else if self.lo.is_finite() {
            self.lo
        } else if self.hi.is_finite() {
            self.hi
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strictly inside `other` (both ends).
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, o.lo, o.hi);
        let lo = mul_down(a, c).min(mul_down(a, d)).min(mul_down(b, c)).min(mul_down(b, d));
        let hi = mul_up(a, c).max(mul_up(a, d)).max(mul_up(b, c)).max(mul_up(b, d));
        Interval::new(lo, hi)
    }

    /// Reciprocal; the entire line when the interval meets zero.
    pub fn recip(&self) -> Interval {
        if self.contains_zero() {
            return ENTIRE;
        }
        Interval::new(div_down(1.0, self.hi), div_up(1.0, self.lo))
    }

    pub fn div(&self, o: &Interval) -> Interval {
        if o.contains_zero() {
            return ENTIRE;
        }
        let (a, b, c, d) = (self.lo, self.hi, o.lo, o.hi);
        let lo = div_down(a, c).min(div_down(a, d)).min(div_down(b, c)).min(div_down(b, d));
        let hi = div_up(a, c).max(div_up(a, d)).max(div_up(b, c)).max(div_up(b, d));
        Interval::new(lo, hi)
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn powi(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(1.0);
        }
        let pow_down = |x: f64| (1..e).fold(x, |acc, _| mul_down(acc, x));
        let pow_up = |x: f64| (1..e).fold(x, |acc, _| mul_up(acc, x));
        if e.is_multiple_of(2) {
            Interval::new(pow_down(self.mig()), pow_up(self.mag()))
        } else {
            let lo = if self.lo >= 0.0 { pow_down(self.lo) } else { -pow_up(-self.lo) };
            let hi = if self.hi >= 0.0 { pow_up(self.hi) } else { -pow_down(-self.hi) };
            Interval::new(lo, hi)
        }
    }

    pub fn exp(&self) -> Interval {
        let lo = if self.lo == f64::NEG_INFINITY {
            0.0
        } else {
            widen_down(self.lo.exp(), 2).max(0.0)
        };
        let hi = if self.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            widen_up(self.hi.exp(), 2)
        };
        Interval::new(lo, hi)
    }

    pub fn sin(&self) -> Interval {
        periodic(self, f64::sin, std::f64::consts::FRAC_PI_2)
    }

    pub fn cos(&self) -> Interval {
        periodic(self, f64::cos, 0.0)
    }

    /// `bump(t) / (1 - t^2)^k` on `|t| < 1`, zero elsewhere.
    pub fn bump(&self, k: u32) -> Interval {
        let s = self.powi(2);
        if s.lo >= 1.0 {
            return Interval::point(0.0);
        }
        // u = 1 / (1 - s) ranges over [u(s.lo), u(s.hi)]; the value is u^k e^{-u}.
        let u_at = |sv: f64| -> Interval {
            let one_minus = Interval::new(add_down(1.0, -sv), add_up(1.0, -sv));
            if one_minus.lo <= 0.0 {
                Interval::new(one_minus.recip().lo.max(1.0), f64::INFINITY)
            } else {
                one_minus.recip()
            }
        };
        let shape = |u: &Interval| -> Interval {
            if u.lo == f64::INFINITY {
                return Interval::point(0.0);
            }
            let v = u.powi(k).mul(&u.neg().exp());
            if u.hi == f64::INFINITY {
                Interval::new(0.0, v.hi.max(0.0))
            } else {
                v
            }
        };
        let left = u_at(s.lo);
        let right = if s.hi >= 1.0 {
            Interval::point(f64::INFINITY)
        } else {
            u_at(s.hi)
        };
        let fl = shape(&left);
        let fr = if right.lo == f64::INFINITY { Interval::point(0.0) } else { shape(&right) };
        let mut lo = fl.lo.min(fr.lo);
        let mut hi = fl.hi.max(fr.hi);
        let peak = k as f64;
        if left.lo <= peak && peak <= right.hi {
            hi = hi.max(shape(&Interval::point(peak)).hi);
        }
        if s.hi >= 1.0 {
            lo = 0.0;
        }
        Interval::new(lo.max(0.0), hi)
    }
}

/// Range of `sin` (`peak_shift = pi/2`) or `cos` (`peak_shift = 0`): maxima at
/// `peak_shift + 2k pi`, minima half a period later.
fn periodic(x: &Interval, f: fn(f64) -> f64, peak_shift: f64) -> Interval {
    let full = Interval::new(-1.0, 1.0);
    if !(x.lo.is_finite() && x.hi.is_finite()) || x.width() >= 6.0 || x.mag() > 1e8 {
        return full;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let slack = 1e-9;
    let hits = |shift: f64| -> bool {
        let k_lo = ((x.lo - shift) / two_pi - slack).ceil();
        let k_hi = ((x.hi - shift) / two_pi + slack).floor();
        k_lo <= k_hi
    };
    let (a, b) = (f(x.lo), f(x.hi));
    let mut lo = widen_down(a.min(b), 2);
    let mut hi = widen_up(a.max(b), 2);
    if hits(peak_shift) {
        hi = 1.0;
    }
    if hits(peak_shift + std::f64::consts::PI) {
        lo = -1.0;
    }
    Interval::new(lo.max(-1.0), hi.min(1.0))
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// A closed axis-aligned box with rational corners.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatBox {
    bounds: Vec<(BigRational, BigRational)>,
}

impl RatBox {
    /// `None` if some `lo > hi`.
    pub fn new(bounds: Vec<(BigRational, BigRational)>) -> Option<RatBox> {
        bounds.iter().all(|(lo, hi)| lo <= hi).then_some(RatBox { bounds })
    }

    pub fn cube(dim: usize, lo: BigRational, hi: BigRational) -> RatBox {
        RatBox::new(vec![(lo, hi); dim]).expect("lo <= hi")
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(BigRational, BigRational)] {
        &self.bounds
    }

    pub fn lo(&self, i: usize) -> &BigRational {
        &self.bounds[i].0
    }

    pub fn hi(&self, i: usize) -> &BigRational {
        &self.bounds[i].1
    }

    pub fn width(&self, i: usize) -> BigRational {
        &self.bounds[i].1 - &self.bounds[i].0
    }

    pub fn center(&self) -> Vec<BigRational> {
        self.bounds.iter().map(|(a, b)| midpoint(a, b)).collect()
    }

    /// Per coordinate, the rational with the smallest denominator.
    pub fn simplest_point(&self) -> Vec<BigRational> {
        self.bounds.iter().map(|(a, b)| simplest_in(a, b)).collect()
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        x.len() == self.dim() && self.bounds.iter().zip(x).all(|((a, b), v)| a <= v && v <= b)
    }

    pub fn to_intervals(&self) -> Vec<Interval> {
        self.bounds.iter().map(|(a, b)| Interval::from_rationals(a, b)).collect()
    }

    pub fn concat(&self, other: &RatBox) -> RatBox {
        let mut bounds = self.bounds.clone();
        bounds.extend(other.bounds.iter().cloned());
        RatBox { bounds }
    }

    pub fn push(&mut self, lo: BigRational, hi: BigRational) {
        assert!(lo <= hi);
        self.bounds.push((lo, hi));
    }

    pub fn with_bound(&self, i: usize, lo: BigRational, hi: BigRational) -> RatBox {
        let mut b = self.clone();
        b.bounds[i] = (lo, hi);
        b
    }

    /// Splits along `dim` at the midpoint.
    pub fn bisect(&self, dim: usize) -> (RatBox, RatBox) {
        let (a, b) = &self.bounds[dim];
        let m = midpoint(a, b);
        (self.with_bound(dim, a.clone(), m.clone()), self.with_bound(dim, m, b.clone()))
    }

    /// Index of the widest coordinate among `dims` (first one on ties).
    pub fn widest(&self, dims: &[usize]) -> Option<usize> {
        let mut best: Option<(usize, BigRational)> = None;
        for &d in dims {
            let w = self.width(d);
            if best.as_ref().is_none_or(|(_, bw)| &w > bw) {
                best = Some((d, w));
            }
        }
        best.map(|(d, _)| d)
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.bounds[i].0 == self.bounds[i].1
    }

    /// Smallest box of rationals containing the given double intervals.
    pub fn from_intervals(xs: &[Interval]) -> Option<RatBox> {
        let bounds = xs
            .iter()
            .map(|iv| Some((from_f64(iv.lo)?, from_f64(iv.hi)?)))
            .collect::<Option<Vec<_>>>()?;
        RatBox::new(bounds)
    }

    pub fn is_zero_dim(&self) -> bool {
        self.bounds.is_empty()
    }
}

impl fmt::Display for RatBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bounds
            .iter()
            .map(|(a, b)| format!("{},{}", format_rational(a), format_rational(b)))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl Serialize for RatBox {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatBox {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<RatBox, D::Error> {
        let text = String::deserialize(deserializer)?;
        RatBox::parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad box `{text}`")))
    }
}

impl RatBox {
    /// Parses `lo,hi;lo,hi;...` (an empty string is the zero-dimensional box).
    pub fn parse(text: &str) -> Option<RatBox> {
        let text = text.trim().trim_start_matches('[').trim_end_matches(']');
        if text.trim().is_empty() {
            return Some(RatBox { bounds: Vec::new() });
        }
        let bounds = text
            .split(';')
            .map(|part| {
                let (a, b) = part.split_once(',')?;
                Some((crate::rational::parse_rational(a)?, crate::rational::parse_rational(b)?))
            })
            .collect::<Option<Vec<_>>>()?;
        RatBox::new(bounds)
    }

    pub fn volume_is_zero(&self) -> bool {
        self.bounds.iter().any(|(a, b)| (b - a).is_zero())
    }
}

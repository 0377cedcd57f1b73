//! Dense univariate polynomials over the rationals: Euclidean algorithms,
//! square-free parts, Sturm sequences and real root isolation.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, int, midpoint, simplest_in};

/// Coefficients low to high, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<BigRational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> UPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> UPoly {
        UPoly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> UPoly {
        UPoly::default()
    }

    pub fn one() -> UPoly {
        UPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> UPoly {
        UPoly::new(vec![c])
    }

    /// `x - r`
    pub fn linear_root(r: &BigRational) -> UPoly {
        UPoly::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        self.eval(x).cmp(&BigRational::zero())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> UPoly {
        (0..e).fold(UPoly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &UPoly) -> (UPoly, UPoly) {
        let dl = divisor.leading().expect("division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / dl;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub fn monic(&self) -> UPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => UPoly::zero(),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*other = g`, `g` the monic gcd.
    pub fn extended_gcd(&self, other: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (UPoly::one(), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let k = l.recip();
                (r0.scale(&k), s0.scale(&k), t0.scale(&k))
            }
            None => (r0, s0, t0),
        }
    }

    /// Monic square-free part: the product of the distinct irreducible factors.
    pub fn squarefree(&self) -> UPoly {
        if self.is_constant() {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn divides(&self, other: &UPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Signed remainder sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone()];
        if self.is_constant() {
            return seq;
        }
        seq.push(self.derivative());
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        seq
    }

    /// Number of distinct real roots strictly inside `(a, b)`.
    pub fn count_roots_open(&self, a: &BigRational, b: &BigRational) -> usize {
        if a >= b || self.is_constant() {
            return 0;
        }
        let mut p = self.squarefree();
        for end in [a, b] {
            if p.eval(end).is_zero() {
                p = p.div_rem(&UPoly::linear_root(end)).0;
            }
        }
        let seq = p.sturm_sequence();
        let va = sign_variations(&seq, a);
        let vb = sign_variations(&seq, b);
        va.saturating_sub(vb)
    }

    /// Number of distinct real roots in the closed interval `[a, b]`.
    pub fn count_roots_closed(&self, a: &BigRational, b: &BigRational) -> usize {
        let ends = usize::from(self.eval(a).is_zero()) + usize::from(a != b && self.eval(b).is_zero());
        self.count_roots_open(a, b) + ends
    }

    /// Isolates the distinct real roots in `[lo, hi]`; sorted and disjoint.
    pub fn isolate(&self, lo: &BigRational, hi: &BigRational) -> Vec<RootInterval> {
        let s = self.squarefree();
        let mut out = Vec::new();
        if s.is_constant() || lo > hi {
            return out;
        }
        if s.eval(lo).is_zero() {
            out.push(RootInterval::Exact(lo.clone()));
        }
        if lo < hi {
            isolate_open(&s, lo.clone(), hi.clone(), &mut out);
            if s.eval(hi).is_zero() {
                out.push(RootInterval::Exact(hi.clone()));
            }
        }
        out
    }
}

fn sign_variations(seq: &[UPoly], x: &BigRational) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let positive = v.is_positive();
        if last.is_some_and(|l| l != positive) {
            count += 1;
        }
        last = Some(positive);
    }
    count
}

/// `s` square-free; pushes isolating intervals for the roots strictly inside `(a, b)`.
fn isolate_open(s: &UPoly, a: BigRational, b: BigRational, out: &mut Vec<RootInterval>) {
    let count = s.count_roots_open(&a, &b);
    if count == 0 {
        return;
    }
    let m = midpoint(&a, &b);
    if count == 1 {
        let candidate = simplest_in(&a, &b);
        if candidate > a && candidate < b && s.eval(&candidate).is_zero() {
            out.push(RootInterval::Exact(candidate));
            return;
        }
        if !s.eval(&a).is_zero() && !s.eval(&b).is_zero() {
            out.push(RootInterval::Open { lo: a, hi: b });
            return;
        }
        if s.eval(&m).is_zero() {
            out.push(RootInterval::Exact(m));
        } else if s.count_roots_open(&a, &m) == 1 {
            isolate_open(s, a, m, out);
        } else {
            isolate_open(s, m, b, out);
        }
        return;
    }
    isolate_open(s, a, m.clone(), out);
    if s.eval(&m).is_zero() {
        out.push(RootInterval::Exact(m.clone()));
    }
    isolate_open(s, m, b, out);
}

/// One real root: either a rational point or an open interval whose
/// endpoints carry opposite signs of the square-free polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootInterval {
    Exact(BigRational),
    Open { lo: BigRational, hi: BigRational },
}

impl RootInterval {
    pub fn lo(&self) -> &BigRational {
        match self {
            RootInterval::Exact(q) => q,
            RootInterval::Open { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &BigRational {
        match self {
            RootInterval::Exact(q) => q,
            RootInterval::Open { hi, .. } => hi,
        }
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }

    pub fn midpoint(&self) -> BigRational {
        midpoint(self.lo(), self.hi())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RootInterval::Exact(_))
    }

    /// Bisects against the square-free `s` until the width is at most `width`.
    pub fn refine(&self, s: &UPoly, width: &BigRational) -> RootInterval {
        let RootInterval::Open { lo, hi } = self else {
            return self.clone();
        };
        let (mut a, mut b) = (lo.clone(), hi.clone());
        let sa = s.sign_at(&a);
        while &(&b - &a) > width {
            let q = simplest_in(&a, &b);
            if q > a && q < b && s.eval(&q).is_zero() {
                return RootInterval::Exact(q);
            }
            let m = midpoint(&a, &b);
            match s.sign_at(&m) {
                Ordering::Equal => return RootInterval::Exact(m),
                o if o == sa => a = m,
                _ => b = m,
            }
        }
        RootInterval::Open { lo: a, hi: b }
    }

    /// One bisection step (or an exact hit).
    pub fn bisect(&self, s: &UPoly) -> RootInterval {
        match self {
            RootInterval::Exact(_) => self.clone(),
            RootInterval::Open { lo, hi } => self.refine(s, &((hi - lo) / int(2))),
        }
    }
}

impl fmt::Display for RootInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootInterval::Exact(q) => write!(f, "{}", format_rational(q)),
            RootInterval::Open { lo, hi } => write!(f, "({}, {})", format_rational(lo), format_rational(hi)),
        }
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl serde::Serialize for UPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        parts.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for UPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<UPoly, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        let coeffs = parts
            .iter()
            .map(|p| crate::rational::parse_rational(p).ok_or_else(|| serde::de::Error::custom(format!("bad coefficient `{p}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(UPoly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn roots_from(rs: &[(i64, i64)]) -> UPoly {
        rs.iter()
            .fold(UPoly::one(), |acc, &(n, d)| acc.mul(&UPoly::linear_root(&rat(n, d))))
    }

    #[test]
    fn division_and_gcd() {
        let p = UPoly::from_ints(&[-1, 0, 1]);
        let (q, r) = p.div_rem(&UPoly::from_ints(&[-1, 1]));
        assert_eq!(q, UPoly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        let g = p.gcd(&UPoly::from_ints(&[1, 2, 1]));
        assert_eq!(g, UPoly::from_ints(&[1, 1]));
    }

    #[test]
    fn extended_gcd_identity() {
        let a = UPoly::from_ints(&[0, 1]);
        let b = UPoly::from_ints(&[-1, 1]);
        let (g, s, t) = a.extended_gcd(&b);
        assert_eq!(g, UPoly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), UPoly::one());
    }

    #[test]
    fn squarefree_collapses_multiplicity() {
        let p = roots_from(&[(0, 1), (1, 1), (1, 1)]);
        assert_eq!(p.squarefree(), roots_from(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn sturm_counts_match_known_roots() {
        let p = roots_from(&[(-3, 2), (1, 3), (1, 3), (2, 1)]);
        assert_eq!(p.count_roots_closed(&int(-2), &int(2)), 3);
        assert_eq!(p.count_roots_open(&int(-2), &int(2)), 2);
        assert_eq!(p.count_roots_closed(&int(0), &int(1)), 1);
        assert_eq!(UPoly::from_ints(&[1, 0, 1]).count_roots_closed(&int(-10), &int(10)), 0);
    }

    #[test]
    fn isolation_finds_rational_and_irrational_roots() {
        let p = UPoly::from_ints(&[-2, 0, 1]);
        let roots = p.isolate(&int(-2), &int(2));
        assert_eq!(roots.len(), 2);
        for r in &roots {
            let RootInterval::Open { lo, hi } = r.refine(&p, &rat(1, 1000)) else { panic!() };
            assert!((&hi - &lo) <= rat(1, 1000));
            assert!(p.eval(&lo) * p.eval(&hi) < BigRational::zero());
        }
        let q = roots_from(&[(1, 3), (-1, 1), (2, 1)]);
        let roots = q.isolate(&int(-1), &int(2));
        let exact: Vec<_> = roots.iter().map(|r| r.refine(&q.squarefree(), &rat(1, 1 << 20))).collect();
        assert_eq!(
            exact,
            vec![RootInterval::Exact(int(-1)), RootInterval::Exact(rat(1, 3)), RootInterval::Exact(int(2))]
        );
    }
}

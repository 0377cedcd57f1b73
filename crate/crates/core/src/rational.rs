//! Exact rational helpers shared by the term language and the certifiers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i32) -> BigRational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

pub fn midpoint(a: &BigRational, b: &BigRational) -> BigRational {
    (a + b) / int(2)
}

/// Formats `p` or `p/q`, the same spelling the term grammar accepts.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p`, `p/q` or a plain decimal such as `-0.25`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return None;
        }
        let digits = format!("{whole_digits}{frac}");
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(n, d);
        return Some(if negative { -q } else { q });
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Tightest pair of doubles `(lo, hi)` with `lo <= q <= hi`.
pub fn f64_bounds(q: &BigRational) -> (f64, f64) {
    let approx = q.to_f64().unwrap_or(f64::NAN);
    if !approx.is_finite() {
        return if q.is_negative() {
            (f64::NEG_INFINITY, approx.max(f64::MIN))
        } else {
            (approx.min(f64::MAX), f64::INFINITY)
        };
    }
    let mut lo = approx;
    let mut hi = approx;
    loop {
        match from_f64(lo) {
            Some(r) if &r > q => lo = lo.next_down(),
            _ => break,
        }
    }
    loop {
        match from_f64(hi) {
            Some(r) if &r < q => hi = hi.next_up(),
            _ => break,
        }
    }
    (lo, hi)
}

/// The rational with the smallest denominator (then smallest magnitude) in `[lo, hi]`.
pub fn simplest_in(lo: &BigRational, hi: &BigRational) -> BigRational {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_in(&-hi, &-lo);
    }
    // 0 < lo <= hi: continued-fraction descent, accumulating convergents.
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let mut terms: Vec<BigInt> = Vec::new();
    loop {
        let fl = a.floor();
        if fl == a {
            terms.push(fl.to_integer());
            break;
        }
        if &fl + BigRational::one() <= b {
            terms.push(fl.to_integer() + BigInt::one());
            break;
        }
        terms.push(fl.to_integer());
        let next_a = (&b - &fl).recip();
        let next_b = (&a - &fl).recip();
        a = next_a;
        b = next_b;
    }
    let mut value = BigRational::from_integer(terms.pop().expect("nonempty"));
    while let Some(t) = terms.pop() {
        value = BigRational::from_integer(t) + value.recip();
    }
    value
}

/// `lcm` of the denominators, handy for clearing rational coefficients.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn abs(q: &BigRational) -> BigRational {
    q.abs()
}

/// Serde adapter writing rationals as `p` or `p/q` strings.
pub mod as_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn simplest_rational_finds_small_denominators() {
        assert_eq!(simplest_in(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_in(&rat(-2, 1), &rat(5, 1)), int(0));
        assert_eq!(simplest_in(&rat(15, 16), &rat(5, 4)), int(1));
        assert_eq!(simplest_in(&rat(-7, 10), &rat(-6, 10)), rat(-2, 3));
        assert_eq!(simplest_in(&rat(1, 2), &rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn f64_bounds_bracket_the_value() {
        for q in [rat(1, 3), rat(-2, 7), int(0), rat(1, 1 << 20), rat(123456789, 1000)] {
            let (lo, hi) = f64_bounds(&q);
            assert!(from_f64(lo).unwrap() <= q && q <= from_f64(hi).unwrap());
            assert!(hi - lo <= 2.0 * f64::EPSILON * q.to_f64().unwrap().abs().max(1e-300));
        }
        assert_eq!(f64_bounds(&rat(1, 2)), (0.5, 0.5));
    }
}

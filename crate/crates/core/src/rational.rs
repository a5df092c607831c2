//! Exact rationals and their textual `p/q` encoding.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Reduced `p/q` with positive denominator, or just `p` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p` or `p/q`.
///
/// With `strict` set, anything that [`format_rational`] would not have
/// produced (non-reduced fractions, `q = 1`, signs on the denominator,
/// leading `+`) is rejected. Otherwise the value is normalized silently.
pub fn parse_rational(s: &str, strict: bool) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let parse = |t: &str| -> Result<BigInt> {
        if t.is_empty() || (strict && t.starts_with('+')) {
            return invalid(format!("malformed rational {s:?}"));
        }
        t.parse::<BigInt>()
            .or_else(|_| invalid(format!("malformed rational {s:?}")))
    };
    let n = parse(num)?;
    let d = match den {
        Some(d) => parse(d)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return invalid(format!("zero denominator in {s:?}"));
    }
    if strict && den.is_some() && (d.is_negative() || d.is_one() || !n.gcd(&d).is_one()) {
        return invalid(format!("rational {s:?} is not in reduced p/q form"));
    }
    Ok(Rational::new(n, d))
}

pub fn floor_to_i64(x: &Rational) -> i64 {
    x.floor()
        .to_integer()
        .to_i64()
        .expect("lattice coordinate out of i64 range")
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

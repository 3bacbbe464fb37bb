//! Exact rational helpers and polynomial weight tallies.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Renders as `p/q` (or `p` when the denominator is one).
pub fn fmt_ratio(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.171571875` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse {s:?} as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// Exact rational closest in spirit to a float: the shortest decimal that
/// round-trips to `x`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("{x} is not finite")));
    }
    parse_rational(&format!("{x:e}"))
}

pub fn abs(x: &BigRational) -> BigRational {
    x.abs()
}

/// A weight `(1/2)^half · a^a · s^s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub half: u32,
    pub a: u32,
    pub s: u32,
}

impl Monomial {
    pub fn times(self, o: Monomial) -> Monomial {
        Monomial { half: self.half + o.half, a: self.a + o.a, s: self.s + o.s }
    }

    pub fn eval(self, a: &BigRational, s: &BigRational) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        num_traits::pow(half, self.half as usize)
            * num_traits::pow(a.clone(), self.a as usize)
            * num_traits::pow(s.clone(), self.s as usize)
    }
}

/// A polynomial in `(1/2, a, s)` with non-negative integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactSum {
    terms: BTreeMap<Monomial, u64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, m: Monomial) {
        *self.terms.entry(m).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for (m, c) in &other.terms {
            *self.terms.entry(*m).or_insert(0) += c;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, a: &BigRational, s: &BigRational) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            total += m.eval(a, s) * BigRational::from_integer(BigInt::from(*c));
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/10").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("0.171571875").unwrap(), rat(54903, 320000));
        assert_eq!(parse_rational("2.5e-2").unwrap(), rat(1, 40));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn float_conversion_is_shortest_decimal() {
        assert_eq!(rational_from_f64(0.05).unwrap(), rat(1, 20));
        assert_eq!(rational_from_f64(0.2).unwrap(), rat(1, 5));
    }

    #[test]
    fn monomial_sum() {
        let mut sum = ExactSum::new();
        sum.add(Monomial { half: 1, a: 0, s: 0 });
        sum.add(Monomial { half: 0, a: 1, s: 1 });
        let v = sum.eval(&rat(1, 3), &rat(1, 4));
        assert_eq!(v, rat(1, 2) + rat(1, 12));
    }
}

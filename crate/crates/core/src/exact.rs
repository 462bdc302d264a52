//! Exact arithmetic helpers.
//!
//! Every value of a measure `mu_a` is a dyadic rational, so the measure
//! module stores coefficients as [`Dyadic`] (an integer over a power of two),
//! which adds without gcd reductions. Moments and jet coefficients involve
//! factorials and use the general [`Rational`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `mantissa / 2^exp`, kept in lowest terms (mantissa odd or exp = 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exp: u64) -> Self {
        let mut d = Dyadic { mantissa, exp };
        d.normalize();
        d
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { mantissa: BigInt::from(v), exp: 0 }
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Dyadic { mantissa: BigInt::one() << (k as usize), exp: 0 }
        } else {
            Dyadic { mantissa: BigInt::one(), exp: k.unsigned_abs() }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return;
        }
        if self.exp == 0 {
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.mantissa >>= tz as usize;
            self.exp -= tz;
        }
    }

    /// Multiply by `2^k` (k may be negative).
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.mantissa.is_zero() {
            return Dyadic::zero();
        }
        if k >= 0 {
            let k = k as u64;
            if k <= self.exp {
                Dyadic { mantissa: self.mantissa.clone(), exp: self.exp - k }
            } else {
                Dyadic { mantissa: &self.mantissa << ((k - self.exp) as usize), exp: 0 }
            }
        } else {
            Dyadic::new(self.mantissa.clone(), self.exp + k.unsigned_abs())
        }
    }

    pub fn half(&self) -> Self {
        self.scale_pow2(-1)
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << (self.exp as usize))
    }

    /// Nearest-ish `f64`; relative error below `2^-60`, underflows to 0 gracefully.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits();
        let (m, shift) = if bits > 64 {
            let s = bits - 64;
            ((&self.mantissa >> (s as usize)).to_f64().unwrap_or(0.0), s as i64)
        } else {
            (self.mantissa.to_f64().unwrap_or(0.0), 0)
        };
        let e = shift - self.exp as i64;
        let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        libm::scalbn(m, e)
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }
    fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: 0 }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let lhs_m = &self.mantissa << ((exp - self.exp) as usize);
        let rhs_m = &rhs.mantissa << ((exp - rhs.exp) as usize);
        Dyadic::new(lhs_m + rhs_m, exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exp: self.exp }
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exp + rhs.exp)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self - other;
        match diff.mantissa.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.to_rational()))
    }
}

/// `"num/den"` in lowest terms, or `"num"` for integers.
pub fn format_rational(q: &Rational) -> String {
    // BigRational keeps itself reduced with a positive denominator.
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("invalid integer {t:?} in {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc = acc.div_floor(&BigInt::from(i + 1));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn dyadic_normalizes() {
        let d = Dyadic::new(BigInt::from(12), 4);
        assert_eq!(d.mantissa(), &BigInt::from(3));
        assert_eq!(d.exp(), 2);
        assert_eq!(d.to_rational(), q(3, 4));
    }

    #[test]
    fn dyadic_arithmetic_matches_rational() {
        let a = Dyadic::new(BigInt::from(5), 3);
        let b = Dyadic::new(BigInt::from(-7), 1);
        assert_eq!((&a + &b).to_rational(), q(5, 8) + q(-7, 2));
        assert_eq!((&a * &b).to_rational(), q(-35, 16));
        assert_eq!(a.half().to_rational(), q(5, 16));
        assert_eq!(Dyadic::pow2(-3).to_rational(), q(1, 8));
        assert_eq!(Dyadic::pow2(4).to_rational(), q(16, 1));
        assert!(b < a);
    }

    #[test]
    fn dyadic_to_f64_handles_tiny_values() {
        assert_eq!(Dyadic::pow2(-3).to_f64(), 0.125);
        assert_eq!(Dyadic::pow2(-2000).to_f64(), 0.0);
        let big = Dyadic::new((BigInt::one() << 200usize) + 1, 201);
        assert!((big.to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(format_rational(&q(2, 8)), "1/4");
        assert_eq!(format_rational(&q(6, 2)), "3");
        assert_eq!(format_rational(&q(-3, 16)), "-3/16");
        assert_eq!(parse_rational(" 3/12 ").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-5").unwrap(), q(-5, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }
}

//! Dyadic rationals `m * 2^e` with exact ring operations and directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Rounding direction for inexact results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// `mant * 2^exp`, normalized so that `mant` is odd (or the value is zero with `exp == 0`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn floor_shr(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    if m.sign() != Sign::Minus {
        m >> s
    } else {
        let pos: BigInt = -m - 1;
        -(pos >> s) - 1
    }
}

fn ceil_shr(m: &BigInt, s: u64) -> BigInt {
    -floor_shr(&-m, s)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Dyadic {
        Dyadic::from_int(1)
    }

    pub fn from_int(v: i64) -> Dyadic {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: &BigInt) -> Dyadic {
        Dyadic::new(v.clone(), 0)
    }

    pub fn from_biguint(v: &BigUint) -> Dyadic {
        Dyadic::new(BigInt::from(v.clone()), 0)
    }

    /// `2^e`
    pub fn pow2(e: i64) -> Dyadic {
        Dyadic {
            mant: BigInt::one(),
            exp: e,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    pub fn is_positive(&self) -> bool {
        self.mant.sign() == Sign::Plus
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)` for nonzero x.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.bits() as i64 - 1)
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let m = match dir {
            Round::Down => floor_shr(&self.mant, s),
            Round::Up => ceil_shr(&self.mant, s),
        };
        Dyadic::new(m, self.exp + s as i64)
    }

    /// `self / other` rounded to `prec` bits in direction `dir`. Panics on division by zero.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the integer quotient carries at least prec + 2 bits.
        let shift = (prec as i64 + 2 + other.bits() as i64 - self.bits() as i64).max(0) as u64;
        let num = &self.mant << shift;
        let (q, r) = num.div_mod_floor(&other.mant);
        let q = if r.is_zero() || dir == Round::Down {
            q
        } else {
            q + 1
        };
        Dyadic::new(q, self.exp - other.exp - shift as i64).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            floor_shr(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            ceil_shr(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    /// Exact conversion from a rational whose reduced denominator is a power of two.
    pub fn from_rational_exact(r: &BigRational) -> Option<Dyadic> {
        let den = r.denom();
        if den.sign() != Sign::Plus {
            return None;
        }
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
    }

    /// Rational `r` rounded to `prec` bits in direction `dir`.
    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Dyadic {
        if let Some(d) = Dyadic::from_rational_exact(r) {
            return d.round(prec, dir);
        }
        Dyadic::from_bigint(r.numer()).div(&Dyadic::from_bigint(r.denom()), prec, dir)
    }

    /// Exact decimal expansion (dyadic rationals always have one).
    pub fn to_exact_decimal(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << (self.exp as u64)).to_string();
        }
        let e = (-self.exp) as u32;
        let scaled = self.mant.abs() * BigInt::from(5u32).pow(e);
        let mut digits = scaled.to_string();
        let e = e as usize;
        if digits.len() <= e {
            digits = "0".repeat(e + 1 - digits.len()) + &digits;
        }
        let split = digits.len() - e;
        let (int_part, frac_part) = digits.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Parse an exact decimal; fails unless the value is dyadic.
    pub fn parse_exact_decimal(s: &str) -> Result<Dyadic> {
        let r = parse_decimal_rational(s)?;
        Dyadic::from_rational_exact(&r)
            .ok_or_else(|| Error::Format(format!("decimal {s:?} is not a dyadic rational")))
    }

    /// Decimal string with `digits` fractional digits, rounded in direction `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = Dyadic::from_bigint(&scale).mul(self);
        let v = match dir {
            Round::Down => scaled.floor(),
            Round::Up => scaled.ceil(),
        };
        let neg = v.is_negative();
        let mut s = v.abs().to_string();
        let d = digits as usize;
        if d == 0 {
            return if neg { format!("-{s}") } else { s };
        }
        if s.len() <= d {
            s = "0".repeat(d + 1 - s.len()) + &s;
        }
        let split = s.len() - d;
        format!("{}{}.{}", if neg { "-" } else { "" }, &s[..split], &s[split..])
    }

    /// Nearest `f64`, for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(60, Round::Down);
        let m: f64 = r.mant.to_string().parse().unwrap_or(f64::NAN);
        m * (2f64).powi(r.exp.clamp(-2000, 2000) as i32)
    }
}

/// Parse a plain decimal literal (optional sign, digits, optional fraction) or `p/q` into an exact rational.
pub fn parse_decimal_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Format(format!("not a decimal or rational literal: {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub(other).mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalizes_trailing_zeros() {
        assert_eq!(d(8, 0), d(1, 3));
        assert_eq!(d(0, 7), Dyadic::zero());
    }

    #[test]
    fn shifts_round_toward_the_requested_side() {
        assert_eq!(floor_shr(&BigInt::from(-5), 1), BigInt::from(-3));
        assert_eq!(ceil_shr(&BigInt::from(-5), 1), BigInt::from(-2));
        assert_eq!(floor_shr(&BigInt::from(5), 1), BigInt::from(2));
        assert_eq!(ceil_shr(&BigInt::from(5), 1), BigInt::from(3));
    }

    #[test]
    fn division_brackets_one_third() {
        let lo = Dyadic::one().div(&Dyadic::from_int(3), 64, Round::Down);
        let hi = Dyadic::one().div(&Dyadic::from_int(3), 64, Round::Up);
        assert!(lo < hi);
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert!(hi.sub(&lo) <= Dyadic::pow2(-64));
    }

    #[test]
    fn floor_and_ceil_of_negative_values() {
        assert_eq!(d(-3, -1).floor(), BigInt::from(-2));
        assert_eq!(d(-3, -1).ceil(), BigInt::from(-1));
        assert_eq!(d(7, -1).floor(), BigInt::from(3));
    }

    #[test]
    fn exact_decimal_round_trip() {
        for v in [d(1, -1), d(-3, -4), d(12345, -20), d(5, 10), Dyadic::zero()] {
            let s = v.to_exact_decimal();
            assert_eq!(Dyadic::parse_exact_decimal(&s).unwrap(), v, "{s}");
        }
        assert_eq!(d(1, -1).to_exact_decimal(), "0.5");
        assert_eq!(d(-3, -4).to_exact_decimal(), "-0.1875");
        assert!(Dyadic::parse_exact_decimal("0.1").is_err());
    }

    #[test]
    fn parses_decimal_and_fraction_literals() {
        let r = parse_decimal_rational("2.5").unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(5), BigInt::from(2)));
        assert_eq!(parse_decimal_rational("7/10").unwrap(), BigRational::new(BigInt::from(7), BigInt::from(10)));
        assert_eq!(parse_decimal_rational("-.25").unwrap(), BigRational::new(BigInt::from(-1), BigInt::from(4)));
        assert!(parse_decimal_rational("abc").is_err());
        assert!(parse_decimal_rational("1/0").is_err());
    }

    #[test]
    fn directed_decimal_formatting() {
        let third_lo = Dyadic::one().div(&Dyadic::from_int(3), 80, Round::Down);
        assert_eq!(third_lo.to_decimal(5, Round::Down), "0.33333");
        assert_eq!(third_lo.to_decimal(5, Round::Up), "0.33334");
        assert_eq!(d(-1, -1).to_decimal(2, Round::Down), "-0.50");
    }
}

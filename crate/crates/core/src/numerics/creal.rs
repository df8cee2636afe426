//! Outward-rounded interval arithmetic over dyadic endpoints.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use super::dyadic::{Dyadic, Round};

/// A certified real: the true value lies in `[lo, hi]`.
///
/// Endpoints carry at most `precision_bits` significant bits; every operation
/// rounds the lower endpoint down and the upper endpoint up.
#[derive(Clone, PartialEq, Eq)]
pub struct CReal {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
}

impl CReal {
    pub fn from_bounds(lo: Dyadic, hi: Dyadic, precision_bits: u32) -> CReal {
        assert!(lo <= hi, "interval with lo > hi: {lo:?} > {hi:?}");
        CReal {
            lo: lo.round(precision_bits, Round::Down),
            hi: hi.round(precision_bits, Round::Up),
            precision_bits,
        }
    }

    pub fn exact(v: Dyadic, precision_bits: u32) -> CReal {
        CReal::from_bounds(v.clone(), v, precision_bits)
    }

    pub fn zero(precision_bits: u32) -> CReal {
        CReal::exact(Dyadic::zero(), precision_bits)
    }

    pub fn one(precision_bits: u32) -> CReal {
        CReal::exact(Dyadic::one(), precision_bits)
    }

    pub fn from_int(v: i64, precision_bits: u32) -> CReal {
        CReal::exact(Dyadic::from_int(v), precision_bits)
    }

    pub fn from_bigint(v: &BigInt, precision_bits: u32) -> CReal {
        CReal::exact(Dyadic::from_bigint(v), precision_bits)
    }

    pub fn from_biguint(v: &BigUint, precision_bits: u32) -> CReal {
        CReal::exact(Dyadic::from_biguint(v), precision_bits)
    }

    pub fn from_rational(r: &BigRational, precision_bits: u32) -> CReal {
        CReal {
            lo: Dyadic::from_rational(r, precision_bits, Round::Down),
            hi: Dyadic::from_rational(r, precision_bits, Round::Up),
            precision_bits,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Same enclosure, endpoints re-rounded (outward) to a new working precision.
    pub fn with_precision(&self, precision_bits: u32) -> CReal {
        CReal::from_bounds(self.lo.clone(), self.hi.clone(), precision_bits)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    /// `self` lies within `other`.
    pub fn subset_of(&self, other: &CReal) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(&self, other: &CReal) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &CReal) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &CReal) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn hull(&self, other: &CReal) -> CReal {
        CReal {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            precision_bits: self.precision_bits.max(other.precision_bits),
        }
    }

    /// Intersection; `None` when disjoint.
    pub fn intersect(&self, other: &CReal) -> Option<CReal> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then(|| CReal {
            lo,
            hi,
            precision_bits: self.precision_bits.max(other.precision_bits),
        })
    }

    fn prec_with(&self, other: &CReal) -> u32 {
        self.precision_bits.max(other.precision_bits)
    }

    pub fn add(&self, other: &CReal) -> CReal {
        let p = self.prec_with(other);
        CReal {
            lo: self.lo.add(&other.lo).round(p, Round::Down),
            hi: self.hi.add(&other.hi).round(p, Round::Up),
            precision_bits: p,
        }
    }

    pub fn sub(&self, other: &CReal) -> CReal {
        let p = self.prec_with(other);
        CReal {
            lo: self.lo.sub(&other.hi).round(p, Round::Down),
            hi: self.hi.sub(&other.lo).round(p, Round::Up),
            precision_bits: p,
        }
    }

    pub fn neg(&self) -> CReal {
        CReal {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn mul(&self, other: &CReal) -> CReal {
        let p = self.prec_with(other);
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().unwrap().round(p, Round::Down);
        let hi = products.iter().max().unwrap().round(p, Round::Up);
        CReal {
            lo,
            hi,
            precision_bits: p,
        }
    }

    pub fn sqr(&self) -> CReal {
        let p = self.precision_bits;
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        let (lo, hi) = if self.lo.is_negative() && !self.hi.is_negative() {
            (Dyadic::zero(), a.max(b))
        } else {
            (a.clone().min(b.clone()), a.max(b))
        };
        CReal {
            lo: lo.round(p, Round::Down),
            hi: hi.round(p, Round::Up),
            precision_bits: p,
        }
    }

    /// `self^n` by repeated squaring.
    pub fn powi(&self, mut n: u64) -> CReal {
        let mut result = CReal::one(self.precision_bits);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        result
    }

    /// Division; `None` if the divisor's enclosure contains zero.
    pub fn checked_div(&self, other: &CReal) -> Option<CReal> {
        if !other.lo.is_positive() && !other.hi.is_negative() {
            return None;
        }
        let p = self.prec_with(other);
        let cands_lo = [
            self.lo.div(&other.lo, p, Round::Down),
            self.lo.div(&other.hi, p, Round::Down),
            self.hi.div(&other.lo, p, Round::Down),
            self.hi.div(&other.hi, p, Round::Down),
        ];
        let cands_hi = [
            self.lo.div(&other.lo, p, Round::Up),
            self.lo.div(&other.hi, p, Round::Up),
            self.hi.div(&other.lo, p, Round::Up),
            self.hi.div(&other.hi, p, Round::Up),
        ];
        Some(CReal {
            lo: cands_lo.into_iter().min().unwrap(),
            hi: cands_hi.into_iter().max().unwrap(),
            precision_bits: p,
        })
    }

    pub fn recip(&self) -> CReal {
        CReal::one(self.precision_bits) / self
    }

    /// Multiply by `2^k` (exact).
    pub fn scale_pow2(&self, k: i64) -> CReal {
        CReal {
            lo: self.lo.shl(k),
            hi: self.hi.shl(k),
            precision_bits: self.precision_bits,
        }
    }

    /// Symmetric error term `[-r, r]` added to `self`.
    pub fn widen(&self, r: &Dyadic) -> CReal {
        let r = r.abs();
        CReal {
            lo: self.lo.sub(&r).round(self.precision_bits, Round::Down),
            hi: self.hi.add(&r).round(self.precision_bits, Round::Up),
            precision_bits: self.precision_bits,
        }
    }

    /// Largest absolute value over the enclosure.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn exp(&self) -> CReal {
        let p = self.precision_bits;
        let lo = exp_point(&self.lo, p).lo;
        let hi = exp_point(&self.hi, p).hi;
        CReal::from_bounds(lo, hi, p)
    }

    /// Natural logarithm. Panics unless the enclosure is strictly positive.
    pub fn ln(&self) -> CReal {
        assert!(self.certainly_positive(), "ln of a non-positive enclosure");
        let p = self.precision_bits;
        let lo = ln_point(&self.lo, p).lo;
        let hi = ln_point(&self.hi, p).hi;
        CReal::from_bounds(lo, hi, p)
    }

    /// Square root. Panics if the enclosure has negative points.
    pub fn sqrt(&self) -> CReal {
        assert!(self.certainly_nonnegative(), "sqrt of a negative enclosure");
        let p = self.precision_bits;
        CReal::from_bounds(sqrt_point(&self.lo, p, Round::Down), sqrt_point(&self.hi, p, Round::Up), p)
    }

    /// `self^(1/n)` for a positive enclosure.
    pub fn root(&self, n: u64) -> CReal {
        assert!(n >= 1);
        if n == 1 {
            return self.clone();
        }
        let p = self.precision_bits;
        let guard = self.with_precision(p + 16);
        let r = guard.ln().div_int(n).exp();
        r.with_precision(p)
    }

    pub fn div_int(&self, n: u64) -> CReal {
        self / &CReal::from_int(n as i64, self.precision_bits)
    }

    /// Short directed-decimal rendering `[lo, hi]`.
    pub fn to_decimal_interval(&self, digits: u32) -> (String, String) {
        (self.lo.to_decimal(digits, Round::Down), self.hi.to_decimal(digits, Round::Up))
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }
}

/// Enclosure of `exp(x)` for a dyadic point.
fn exp_point(x: &Dyadic, prec: u32) -> CReal {
    if x.is_zero() {
        return CReal::one(prec);
    }
    const REDUCE: i64 = 12;
    let mag = x.magnitude().unwrap();
    let s = (mag + 1 + REDUCE).max(0);
    let wp = prec + s as u32 + 24;
    let y = CReal::exact(x.shl(-s), wp);
    let mut sum = CReal::one(wp);
    let mut term = CReal::one(wp);
    let eps = Dyadic::pow2(-(wp as i64) - 8);
    let mut k = 1i64;
    loop {
        term = term.mul(&y).div_int(k as u64);
        sum = sum.add(&term);
        if term.mag() < eps {
            break;
        }
        k += 1;
    }
    // |y| < 2^-12, so the remaining terms sum to less than |last term|.
    let mut r = sum.widen(&term.mag());
    for _ in 0..s {
        r = r.sqr();
    }
    r.with_precision(prec)
}

fn atanh_series(z: &CReal, wp: u32) -> CReal {
    // Requires |z| <= 1/3.
    let z2 = z.sqr();
    let mut pw = z.clone();
    let mut sum = CReal::zero(wp);
    let eps = Dyadic::pow2(-(wp as i64) - 8);
    let mut k = 0u64;
    loop {
        sum = sum.add(&pw.div_int(2 * k + 1));
        pw = pw.mul(&z2);
        k += 1;
        if pw.mag() < eps {
            break;
        }
    }
    // Remainder <= |pw| / (1 - z^2) <= 2 |pw| for |z| <= 1/3.
    sum.widen(&pw.mag().shl(1))
}

fn ln2(wp: u32) -> CReal {
    let third = CReal::one(wp) / &CReal::from_int(3, wp);
    atanh_series(&third, wp).scale_pow2(1)
}

/// Enclosure of `ln(x)` for a positive dyadic point.
fn ln_point(x: &Dyadic, prec: u32) -> CReal {
    assert!(x.is_positive());
    if *x == Dyadic::one() {
        return CReal::zero(prec);
    }
    let mut t = x.magnitude().unwrap();
    let mut f = x.shl(-t);
    // f in [1, 2); move to (2/3, 4/3].
    if f.mul(&Dyadic::from_int(3)) > Dyadic::from_int(4) {
        f = f.shl(-1);
        t += 1;
    }
    let wp = prec + 64 - t.unsigned_abs().leading_zeros() + 16;
    let fr = CReal::exact(f, wp);
    let one = CReal::one(wp);
    let z = &(&fr - &one) / &(&fr + &one);
    let mut r = atanh_series(&z, wp).scale_pow2(1);
    if t != 0 {
        r = r.add(&ln2(wp).mul(&CReal::from_int(t, wp)));
    }
    r.with_precision(prec)
}

fn sqrt_point(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    if x.is_zero() {
        return Dyadic::zero();
    }
    let target_bits = 2 * prec as i64 + 4;
    let mut shift = (target_bits - x.bits() as i64).max(0);
    if (x.exponent() - shift) % 2 != 0 {
        shift += 1;
    }
    let m = x.mantissa() << (shift as u64);
    let e = (x.exponent() - shift) / 2;
    let s = m.sqrt();
    let exact = &s * &s == m;
    let s = if dir == Round::Up && !exact {
        s + BigInt::one()
    } else {
        s
    };
    Dyadic::new(s, e).round(prec, dir)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:expr) => {
        impl $tr<&CReal> for &CReal {
            type Output = CReal;
            fn $method(self, rhs: &CReal) -> CReal {
                $imp(self, rhs)
            }
        }
        impl $tr<CReal> for CReal {
            type Output = CReal;
            fn $method(self, rhs: CReal) -> CReal {
                $imp(&self, &rhs)
            }
        }
        impl $tr<&CReal> for CReal {
            type Output = CReal;
            fn $method(self, rhs: &CReal) -> CReal {
                $imp(&self, rhs)
            }
        }
        impl $tr<CReal> for &CReal {
            type Output = CReal;
            fn $method(self, rhs: CReal) -> CReal {
                $imp(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &CReal, b: &CReal| CReal::add(a, b));
forward_binop!(Sub, sub, |a: &CReal, b: &CReal| CReal::sub(a, b));
forward_binop!(Mul, mul, |a: &CReal, b: &CReal| CReal::mul(a, b));
forward_binop!(Div, div, |a: &CReal, b: &CReal| a
    .checked_div(b)
    .expect("division by an enclosure containing zero"));

impl Neg for &CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        CReal::neg(self)
    }
}

impl Neg for CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        CReal::neg(&self)
    }
}

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_interval(24);
        write!(f, "[{lo}, {hi}]@{}", self.precision_bits)
    }
}

impl fmt::Display for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_interval(20);
        write!(f, "[{lo}, {hi}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn arithmetic_encloses_rational_results() {
        let third = CReal::from_rational(&rat(1, 3), 128);
        let sum = &third + &third + &third;
        assert!(sum.contains(&Dyadic::one()));
        let prod = &third * &CReal::from_int(3, 128);
        assert!(prod.contains(&Dyadic::one()));
        let q = CReal::one(128) / &third;
        assert!(q.contains(&Dyadic::from_int(3)));
    }

    #[test]
    fn exp_of_zero_and_one() {
        assert_eq!(CReal::zero(128).exp(), CReal::one(128));
        let e = CReal::one(200).exp();
        // e = 2.71828182845904523536028747135266249775724709369995...
        let lo = parse("2.718281828459045235360287471352662497757");
        let hi = parse("2.718281828459045235360287471352662497758");
        assert!(lo <= *e.lo() && *e.hi() <= hi, "{e:?}");
    }

    fn parse(s: &str) -> Dyadic {
        let r = super::super::dyadic::parse_decimal_rational(s).unwrap();
        Dyadic::from_rational(&r, 400, Round::Down)
    }

    #[test]
    fn ln_matches_known_constants() {
        let l2 = CReal::from_int(2, 200).ln();
        // ln 2 = 0.693147180559945309417232121458176568075500134360255...
        let lo = parse("0.6931471805599453094172321214581765680754");
        let hi = parse("0.6931471805599453094172321214581765680756");
        assert!(lo <= *l2.lo() && *l2.hi() <= hi, "{l2:?}");
        assert_eq!(CReal::one(64).ln(), CReal::zero(64));
        let small = CReal::from_rational(&rat(1, 1000), 200).ln();
        assert!(small.hi().is_negative());
    }

    #[test]
    fn exp_ln_round_trip_narrows_with_precision() {
        let x = CReal::from_rational(&rat(7, 10), 128);
        let y = x.exp().ln();
        assert!(y.contains_rational(&rat(7, 10)));
        let x2 = CReal::from_rational(&rat(7, 10), 256);
        let y2 = x2.exp().ln();
        assert!(y2.width() < y.width());
    }

    #[test]
    fn sqrt_of_two_squared_straddles_two() {
        let s = CReal::from_int(2, 128).sqrt();
        let sq = s.sqr();
        assert!(sq.contains(&Dyadic::from_int(2)));
        assert!(!sq.is_exact());
        assert_eq!(CReal::from_int(9, 64).sqrt(), CReal::from_int(3, 64));
    }

    #[test]
    fn sqr_of_straddling_interval_starts_at_zero() {
        let x = CReal::from_bounds(Dyadic::from_int(-1), Dyadic::from_int(2), 64);
        let s = x.sqr();
        assert_eq!(*s.lo(), Dyadic::zero());
        assert_eq!(*s.hi(), Dyadic::from_int(4));
    }

    #[test]
    fn roots_and_powers() {
        let eight = CReal::from_int(8, 128);
        let two = eight.root(3);
        assert!(two.contains(&Dyadic::from_int(2)));
        assert_eq!(CReal::from_int(3, 64).powi(5), CReal::from_int(243, 64));
    }
}

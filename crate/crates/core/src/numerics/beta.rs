use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use serde::{Deserialize, Serialize};

use super::creal::CReal;
use super::dyadic::parse_decimal_rational;
use crate::error::{Error, Result};

/// How a base β > 1 is given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BetaDescriptor {
    /// `p/q`, written as a fraction string.
    Rational(String),
    /// `e^(p/q)`; the exponent is written as a fraction or decimal string.
    ExpRational(String),
    /// A decimal literal read as an exact rational.
    Decimal(String),
}

/// A validated base β, certified to exceed 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaValue {
    descriptor: BetaDescriptor,
    kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Rational(BigRational),
    Exp(BigRational),
}

impl BetaValue {
    pub fn from_descriptor(descriptor: BetaDescriptor) -> Result<BetaValue> {
        let kind = match &descriptor {
            BetaDescriptor::Rational(s) | BetaDescriptor::Decimal(s) => {
                let r = parse_decimal_rational(s)?;
                if r <= BigRational::one() {
                    return Err(Error::NotGreaterThanOne(s.clone()));
                }
                Kind::Rational(r)
            }
            BetaDescriptor::ExpRational(s) => {
                let q = parse_decimal_rational(s)?;
                if !q.is_positive() {
                    return Err(Error::NotGreaterThanOne(format!("exp({s})")));
                }
                Kind::Exp(q)
            }
        };
        Ok(BetaValue { descriptor, kind })
    }

    pub fn rational(p: i64, q: i64) -> Result<BetaValue> {
        BetaValue::from_descriptor(BetaDescriptor::Rational(format!("{p}/{q}")))
    }

    pub fn integer(n: u64) -> Result<BetaValue> {
        BetaValue::from_descriptor(BetaDescriptor::Rational(n.to_string()))
    }

    /// `e^(p/q)`
    pub fn exp_of_rational(p: i64, q: i64) -> Result<BetaValue> {
        BetaValue::from_descriptor(BetaDescriptor::ExpRational(format!("{p}/{q}")))
    }

    pub fn decimal(s: &str) -> Result<BetaValue> {
        BetaValue::from_descriptor(BetaDescriptor::Decimal(s.to_string()))
    }

    pub fn descriptor(&self) -> &BetaDescriptor {
        &self.descriptor
    }

    /// The exact value when β is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.kind {
            Kind::Rational(r) => Some(r),
            Kind::Exp(_) => None,
        }
    }

    /// The exact value when β is an integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    /// Enclosure of β at `precision_bits`.
    pub fn eval(&self, precision_bits: u32) -> CReal {
        match &self.kind {
            Kind::Rational(r) => CReal::from_rational(r, precision_bits),
            Kind::Exp(q) => {
                let guard = precision_bits + 16;
                CReal::from_rational(q, guard).exp().with_precision(precision_bits)
            }
        }
    }
}

/// Certified enclosure of β; rejects precisions below 32 bits.
pub fn eval_beta(b: &BetaValue, precision_bits: u32) -> Result<CReal> {
    if precision_bits < 32 {
        return Err(Error::InvalidArgument(format!(
            "precision must be at least 32 bits (got {precision_bits})"
        )));
    }
    let v = b.eval(precision_bits);
    if v.lo() <= &super::dyadic::Dyadic::one() {
        // Descriptors are validated exactly; this only fires when the enclosure still touches 1.
        return Err(Error::NotGreaterThanOne(b.to_string()));
    }
    Ok(v)
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.descriptor {
            BetaDescriptor::Rational(s) | BetaDescriptor::Decimal(s) => write!(f, "{s}"),
            BetaDescriptor::ExpRational(s) => write!(f, "exp({s})"),
        }
    }
}

/// Parses `2`, `5/2`, `2.5`, `exp(7/10)`, `e^0.7`.
impl FromStr for BetaValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<BetaValue> {
        let t = s.trim();
        if let Some(inner) = t
            .strip_prefix("exp(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("e^"))
        {
            return BetaValue::from_descriptor(BetaDescriptor::ExpRational(inner.trim().to_string()));
        }
        if t.contains('/') {
            BetaValue::from_descriptor(BetaDescriptor::Rational(t.to_string()))
        } else {
            BetaValue::from_descriptor(BetaDescriptor::Decimal(t.to_string()))
        }
    }
}

/// An entropy target h: a decimal/rational literal or the exact token `ln<k>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntropyTarget {
    LnOf(u64),
    Value(BigRational),
}

impl FromStr for EntropyTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<EntropyTarget> {
        let t = s.trim();
        if let Some(k) = t.strip_prefix("ln") {
            let k: u64 = k
                .parse()
                .map_err(|_| Error::Format(format!("bad entropy token {s:?}")))?;
            if k < 2 {
                return Err(Error::InvalidArgument("entropy must be positive".into()));
            }
            return Ok(EntropyTarget::LnOf(k));
        }
        let r = parse_decimal_rational(t)?;
        if !r.is_positive() {
            return Err(Error::InvalidArgument("entropy must be positive".into()));
        }
        Ok(EntropyTarget::Value(r))
    }
}

impl EntropyTarget {
    /// β = e^{h p}; exact integer powers for `ln<k>` tokens.
    pub fn beta_for_period(&self, period: u32) -> Result<BetaValue> {
        if period == 0 {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        match self {
            EntropyTarget::LnOf(k) => {
                let v = BigInt::from(*k).pow(period);
                BetaValue::from_descriptor(BetaDescriptor::Rational(v.to_string()))
            }
            EntropyTarget::Value(h) => {
                let e = h * BigRational::from_integer(BigInt::from(period));
                BetaValue::from_descriptor(BetaDescriptor::ExpRational(format!("{}/{}", e.numer(), e.denom())))
            }
        }
    }
}

impl fmt::Display for EntropyTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyTarget::LnOf(k) => write!(f, "ln{k}"),
            EntropyTarget::Value(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            EntropyTarget::Value(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Dyadic;

    #[test]
    fn exact_rational_two_is_exact() {
        let b = BetaValue::rational(2, 1).unwrap();
        let v = eval_beta(&b, 64).unwrap();
        assert!(v.is_exact());
        assert_eq!(*v.lo(), Dyadic::from_int(2));
    }

    #[test]
    fn rejects_beta_at_or_below_one() {
        assert!(matches!(BetaValue::exp_of_rational(0, 1), Err(Error::NotGreaterThanOne(_))));
        assert!(matches!(BetaValue::rational(1, 1), Err(Error::NotGreaterThanOne(_))));
        assert!(matches!(BetaValue::decimal("0.5"), Err(Error::NotGreaterThanOne(_))));
        assert!(matches!("exp(-1)".parse::<BetaValue>(), Err(Error::NotGreaterThanOne(_))));
    }

    #[test]
    fn rejects_low_precision() {
        let b = BetaValue::integer(2).unwrap();
        assert!(eval_beta(&b, 16).is_err());
    }

    #[test]
    fn parses_descriptor_strings() {
        let b: BetaValue = "exp(7/10)".parse().unwrap();
        assert_eq!(b.descriptor(), &BetaDescriptor::ExpRational("7/10".into()));
        let b: BetaValue = "e^0.7".parse().unwrap();
        assert_eq!(b.descriptor(), &BetaDescriptor::ExpRational("0.7".into()));
        let b: BetaValue = "5/2".parse().unwrap();
        assert_eq!(b.as_rational().unwrap(), &BigRational::new(5.into(), 2.into()));
        let b: BetaValue = "3".parse().unwrap();
        assert_eq!(b.as_integer(), Some(BigInt::from(3)));
    }

    #[test]
    fn entropy_tokens_give_exact_powers() {
        let h: EntropyTarget = "ln2".parse().unwrap();
        assert_eq!(h.beta_for_period(1).unwrap().as_integer(), Some(BigInt::from(2)));
        assert_eq!(h.beta_for_period(3).unwrap().as_integer(), Some(BigInt::from(8)));
        let h: EntropyTarget = "0.35".parse().unwrap();
        let b = h.beta_for_period(2).unwrap();
        assert_eq!(b.descriptor(), &BetaDescriptor::ExpRational("7/10".into()));
        assert!("0".parse::<EntropyTarget>().is_err());
        assert!("ln1".parse::<EntropyTarget>().is_err());
    }
}

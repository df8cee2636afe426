//! Certified real arithmetic: dyadic intervals, floors, and closed-form geometric tails.

mod beta;
mod creal;
mod dyadic;

pub use beta::{eval_beta, BetaDescriptor, BetaValue, EntropyTarget};
pub use creal::CReal;
pub use dyadic::{parse_decimal_rational, Dyadic, Round};

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Bounded precision escalation: start, then double until `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start_bits: 256,
            max_bits: 4096,
        }
    }
}

impl PrecisionPolicy {
    pub fn starting_at(start_bits: u32) -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits,
            max_bits: PrecisionPolicy::default().max_bits.max(start_bits),
        }
    }

    pub fn fixed(bits: u32) -> PrecisionPolicy {
        PrecisionPolicy {
            start_bits: bits,
            max_bits: bits,
        }
    }

    /// The precisions tried, in order.
    pub fn steps(&self) -> Vec<u32> {
        let mut out = vec![self.start_bits];
        let mut p = self.start_bits;
        while p < self.max_bits {
            p = (p * 2).min(self.max_bits);
            out.push(p);
        }
        out
    }
}

/// Errors worth retrying at a higher precision.
pub(crate) fn is_precision_failure(e: &Error) -> bool {
    matches!(e, Error::FloorUndecidable { .. } | Error::PrecisionExhausted(_))
}

/// `floor(x)` when the enclosure pins it down.
pub fn certified_floor(x: &CReal) -> Result<BigInt> {
    if x.lo().is_negative() {
        return Err(Error::InvalidArgument(format!("floor of a possibly negative value {x:?}")));
    }
    let lo = x.lo().floor();
    let hi = x.hi().floor();
    if lo == hi {
        Ok(lo)
    } else {
        let (lo, hi) = x.to_decimal_interval(30);
        Err(Error::FloorUndecidable {
            lo,
            hi,
            precision_bits: x.precision_bits(),
        })
    }
}

/// Recompute `x` at each precision of `policy` until its floor is certified.
pub fn certified_floor_with<F>(policy: &PrecisionPolicy, mut x: F) -> Result<BigInt>
where
    F: FnMut(u32) -> CReal,
{
    let mut last = None;
    for bits in policy.steps() {
        match certified_floor(&x(bits)) {
            Ok(v) => return Ok(v),
            Err(e @ Error::FloorUndecidable { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("policy has at least one step"))
}

/// Weight `w(n)` in a tail sum `sum w(n) r^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailWeight {
    One,
    N,
    NSquared,
}

/// Enclosure of `sum_{n >= first} w(n) ratio^n` via closed forms.
pub fn geometric_tail(ratio: &CReal, first_exponent: u64, weight: TailWeight) -> Result<CReal> {
    let p = ratio.precision_bits();
    let one = CReal::one(p);
    if !ratio.certainly_lt(&one) || ratio.lo().is_negative() {
        return Err(Error::DivergentTail);
    }
    let q = one.sub(ratio);
    let lead = ratio.powi(first_exponent);
    let n0 = CReal::from_int(first_exponent as i64, p);
    let body = match weight {
        TailWeight::One => &one / &q,
        // sum_{j>=0} (n0 + j) r^j = n0/(1-r) + r/(1-r)^2
        TailWeight::N => &(&n0 / &q) + &(ratio / &q.sqr()),
        // sum_{j>=0} (n0 + j)^2 r^j = n0^2/(1-r) + 2 n0 r/(1-r)^2 + r(1+r)/(1-r)^3
        TailWeight::NSquared => {
            let t0 = &n0.sqr() / &q;
            let t1 = &(&n0.scale_pow2(1) * ratio) / &q.sqr();
            let t2 = &(ratio * &(&one + ratio)) / &q.powi(3);
            &(&t0 + &t1) + &t2
        }
    };
    Ok(&lead * &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn policy_doubles_to_the_ceiling() {
        assert_eq!(PrecisionPolicy::default().steps(), vec![256, 512, 1024, 2048, 4096]);
        assert_eq!(PrecisionPolicy::fixed(128).steps(), vec![128]);
    }

    #[test]
    fn floor_of_exact_values() {
        assert_eq!(certified_floor(&CReal::from_int(4, 64)).unwrap(), BigInt::from(4));
        assert_eq!(certified_floor(&CReal::zero(64)).unwrap(), BigInt::from(0));
        // 1 * 2^(4 - 2) computed through interval arithmetic stays exact.
        let x = CReal::one(256).mul(&CReal::from_int(2, 256).powi(2));
        assert_eq!(certified_floor(&x).unwrap(), BigInt::from(4));
    }

    #[test]
    fn floor_rejects_negative_input() {
        assert!(certified_floor(&CReal::from_int(-1, 64)).is_err());
    }

    #[test]
    fn sqrt_two_squared_is_undecidable_at_every_precision() {
        let policy = PrecisionPolicy::default();
        let mut seen = Vec::new();
        let r = certified_floor_with(&policy, |bits| {
            seen.push(bits);
            CReal::from_int(2, bits).sqrt().sqr()
        });
        assert!(matches!(r, Err(Error::FloorUndecidable { precision_bits: 4096, .. })), "{r:?}");
        assert_eq!(seen, vec![256, 512, 1024, 2048, 4096]);
    }

    #[test]
    fn escalation_stops_once_decided() {
        let mut seen = Vec::new();
        let r = certified_floor_with(&PrecisionPolicy::default(), |bits| {
            seen.push(bits);
            // Wide below 512 bits, pinned above.
            if bits < 512 {
                CReal::from_bounds(Dyadic::from_int(2), Dyadic::from_int(3), bits)
            } else {
                CReal::from_rational(&rat(5, 2), bits)
            }
        });
        assert_eq!(r.unwrap(), BigInt::from(2));
        assert_eq!(seen, vec![256, 512]);
    }

    #[test]
    fn geometric_tail_closed_forms() {
        let half = CReal::from_rational(&rat(1, 2), 128);
        let t = geometric_tail(&half, 2, TailWeight::One).unwrap();
        assert!(t.is_exact());
        assert_eq!(*t.lo(), Dyadic::pow2(-1));

        // 1/(β(β-1)) at β = 2
        let beta = CReal::from_int(2, 128);
        let paper_form = CReal::one(128) / &(&beta * &(&beta - &CReal::one(128)));
        assert_eq!(t, paper_form);

        let third = CReal::from_rational(&rat(1, 3), 128);
        let t = geometric_tail(&third, 1, TailWeight::N).unwrap();
        assert!(t.contains_rational(&rat(3, 4)));
        assert!(t.width() < Dyadic::pow2(-100));
    }

    #[test]
    fn geometric_tail_matches_brute_force_sums() {
        // Oracle: direct summation of 400 terms in exact rationals plus a crude remainder.
        for (p, q) in [(1i64, 3i64), (2, 5), (7, 10)] {
            for (w, first) in [(TailWeight::One, 1u64), (TailWeight::N, 3), (TailWeight::NSquared, 2)] {
                let r = rat(p, q);
                let mut s = BigRational::from_integer(0.into());
                let mut pw = num_traits::Pow::pow(&r, first as u32);
                for n in first..first + 400 {
                    let nn = BigRational::from_integer(BigInt::from(n));
                    let wt = match w {
                        TailWeight::One => BigRational::from_integer(1.into()),
                        TailWeight::N => nn.clone(),
                        TailWeight::NSquared => &nn * &nn,
                    };
                    s += &wt * &pw;
                    pw *= &r;
                }
                let t = geometric_tail(&CReal::from_rational(&r, 192), first, w).unwrap();
                assert!(t.lo().to_rational() <= s.clone() + BigRational::new(1.into(), BigInt::from(10).pow(30u32)));
                assert!(s <= t.hi().to_rational());
            }
        }
    }

    #[test]
    fn geometric_tail_rejects_ratio_at_one() {
        let one = CReal::one(64);
        assert_eq!(geometric_tail(&one, 1, TailWeight::One), Err(Error::DivergentTail));
        let straddle = CReal::from_bounds(Dyadic::pow2(-1), Dyadic::from_int(1), 64);
        assert_eq!(geometric_tail(&straddle, 1, TailWeight::N), Err(Error::DivergentTail));
    }
}

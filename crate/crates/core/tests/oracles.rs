//! Cross-checks against oracles written here from scratch in exact rational arithmetic.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use markovforge::numerics::{BetaValue, CReal};
use markovforge::spectrum::beta_expansion;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Rational bounds on e^x for 0 <= x <= 1: Taylor sum to `terms`, plus the tail bound
/// 2 x^{terms} / terms!.
fn exp_bounds(x: &BigRational, terms: u32) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for k in 0..terms {
        sum += &term;
        term = term * x / BigRational::from_integer(BigInt::from(k + 1));
    }
    let hi = &sum + &term * rat(2, 1);
    (sum, hi)
}

/// Round outward to a multiple of 10^-digits so rationals stay small.
fn trim(lo: &BigRational, hi: &BigRational, digits: u32) -> (BigRational, BigRational) {
    let scale = BigRational::from_integer(BigInt::from(10).pow(digits));
    ((lo * &scale).floor() / &scale, (hi * &scale).ceil() / &scale)
}

#[test]
fn exp_seven_tenths_matches_taylor_oracle() {
    let (lo, hi) = exp_bounds(&rat(7, 10), 80);
    assert!(&hi - &lo < rat(1, 1) / BigRational::from_integer(BigInt::from(10).pow(100)));
    let beta = BetaValue::exp_of_rational(7, 10).unwrap();
    for bits in [64u32, 256, 1024] {
        let v = beta.eval(bits);
        // Both are enclosures of the same number: they must intersect, and at high
        // precision the library's must sit inside a slightly widened oracle interval.
        assert!(v.lo().to_rational() <= hi && lo <= v.hi().to_rational(), "bits {bits}");
        if bits >= 256 {
            let slack = rat(1, 1) / BigRational::from_integer(BigInt::from(10).pow(70));
            assert!(v.lo().to_rational() >= &lo - &slack);
            assert!(v.hi().to_rational() <= &hi + &slack);
        }
    }
}

/// Greedy digits of x in base β computed on rational intervals; `None` once a floor is
/// ambiguous.
fn oracle_digits(x: &BigRational, beta: (&BigRational, &BigRational), n: usize) -> Option<Vec<BigInt>> {
    let (mut lo, mut hi) = (x.clone(), x.clone());
    let mut out = Vec::new();
    for _ in 0..n {
        let (tl, th) = (beta.0 * &lo, beta.1 * &hi);
        let d = tl.floor().to_integer();
        if th.floor().to_integer() != d {
            return None;
        }
        let di = BigRational::from_integer(d.clone());
        let (l, h) = trim(&(tl - &di), &(th - &di), 120);
        lo = l;
        hi = h;
        out.push(d);
    }
    Some(out)
}

#[test]
fn greedy_digits_of_one_third_in_base_e_seven_tenths() {
    let (blo, bhi) = exp_bounds(&rat(7, 10), 120);
    let (blo, bhi) = trim(&blo, &bhi, 150);
    let expected = oracle_digits(&rat(1, 3), (&blo, &bhi), 20).expect("oracle decides 20 digits");

    let beta = BetaValue::exp_of_rational(7, 10).unwrap();
    let x = CReal::from_rational(&rat(1, 3), 256);
    let got = beta_expansion(&x, &beta, 20).unwrap();
    let got: Vec<BigInt> = got.digits.iter().map(|d| BigInt::from(d.clone())).collect();
    assert_eq!(got, expected);

    // Reassemble: sum d(n) β^-n must be within β^-20 of 1/3.
    let mid = (&blo + &bhi) / rat(2, 1);
    let mut acc = BigRational::zero();
    let mut pw = BigRational::one();
    for d in &expected {
        pw /= &mid;
        acc += BigRational::from_integer(d.clone()) * &pw;
    }
    let err = (rat(1, 3) - acc).abs();
    assert!(err <= pw * rat(11, 10), "{}", err.to_f64().unwrap());
}

#[test]
fn greedy_digits_stay_below_base() {
    let beta = BetaValue::rational(5, 2).unwrap();
    let x = CReal::from_rational(&rat(7, 9), 256);
    let e = beta_expansion(&x, &beta, 40).unwrap();
    assert!(e.digits.iter().all(|d| d <= &BigUint::from(2u32)));
}

mod props {
    use super::*;
    use markovforge::graph::{realize, realized_vertex_count};
    use markovforge::numerics::{geometric_tail, TailWeight};
    use markovforge::oracle::{enumerate_counts, graph_counts, renewal_convolve};
    use markovforge::spectrum::{GrowthModel, LoopSpectrum};
    use proptest::prelude::*;

    fn small_rat() -> impl Strategy<Value = BigRational> {
        (-1000i64..1000, 1i64..200).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_operations_enclose_exact_results(a in small_rat(), b in small_rat(), bits in 32u32..200) {
            let x = CReal::from_rational(&a, bits);
            let y = CReal::from_rational(&b, bits);
            prop_assert!((&x + &y).contains_rational(&(&a + &b)));
            prop_assert!((&x - &y).contains_rational(&(&a - &b)));
            prop_assert!((&x * &y).contains_rational(&(&a * &b)));
            if !b.is_zero() {
                prop_assert!((&x / &y).contains_rational(&(&a / &b)));
            }
            prop_assert!(x.powi(3).contains_rational(&(&a * &a * &a)));
        }

        #[test]
        fn exp_ln_round_trip_encloses_input(p in 1i64..5000, q in 1i64..1000) {
            let a = rat(p, q);
            let x = CReal::from_rational(&a, 128);
            prop_assert!(x.ln().exp().contains_rational(&a));
            prop_assert!(x.sqrt().sqr().contains_rational(&a));
        }

        #[test]
        fn exp_brackets_taylor_oracle(p in 0i64..100) {
            let a = rat(p, 100);
            let (lo, hi) = exp_bounds(&a, 60);
            let v = CReal::from_rational(&a, 160).exp();
            prop_assert!(v.lo().to_rational() <= hi && lo <= v.hi().to_rational());
        }

        #[test]
        fn geometric_tail_dominates_partial_sums(p in 0i64..95, first in 1u64..20, w in 0usize..3) {
            let r = rat(p, 100);
            let weight = [TailWeight::One, TailWeight::N, TailWeight::NSquared][w];
            let t = geometric_tail(&CReal::from_rational(&r, 128), first, weight).unwrap();
            let mut s = BigRational::zero();
            let mut pw = num_traits::Pow::pow(&r, first as u32);
            for n in first..first + 200 {
                let nn = BigRational::from_integer(BigInt::from(n));
                let wt = match weight {
                    TailWeight::One => BigRational::one(),
                    TailWeight::N => nn.clone(),
                    TailWeight::NSquared => &nn * &nn,
                };
                s += wt * &pw;
                pw *= &r;
                prop_assert!(s <= t.hi().to_rational());
            }
        }

        #[test]
        fn counts_agree_on_random_loop_systems(a in proptest::collection::vec(0u64..3, 1..7)) {
            let mut a = a;
            a[0] = a[0].min(1);
            let s = LoopSpectrum::from_u64s(&a, GrowthModel::Finite).unwrap();
            let g = realize(&s, a.len()).unwrap();
            prop_assert_eq!(BigUint::from(g.vertex_count()), realized_vertex_count(&s, a.len()));
            let depth = 10;
            let dp = graph_counts(&g, depth);
            let expect_f: Vec<BigUint> = (1..=depth).map(|n| BigUint::from(*a.get(n - 1).unwrap_or(&0))).collect();
            prop_assert_eq!(&dp.f, &expect_f);
            prop_assert_eq!(&dp.p, &renewal_convolve(&dp.f, depth));
            let e = enumerate_counts(&g, depth, 1_000_000).unwrap();
            prop_assert_eq!(e.p, dp.p);
            prop_assert_eq!(e.f, dp.f);
        }
    }
}

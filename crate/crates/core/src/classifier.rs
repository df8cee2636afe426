//! Transient / null recurrent / positive recurrent classification of loop graphs.
//!
//! Everything is decided from `F(x) = Σ a(n) x^n` near the radius `L` of that series:
//! `F(L) < 1` means transient with `R = L`; `F(L) = 1` with a finite mean return
//! `Σ n a(n) L^n` means positive recurrent with `R = L`; `F(L) > 1` puts the root of
//! `F(R) = 1` strictly inside `(0, L)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{CReal, Dyadic};
use crate::oracle::PathCountTable;
use crate::spectrum::{spectrum_tail_bounds, GrowthModel, LoopSpectrum, SumWeight};

/// Digits used when reports are rendered as JSON.
pub const REPORT_DIGITS: u32 = 40;

/// Radius of convergence of `Σ a(n) z^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusL {
    Certified(CReal),
    /// Only finitely many loops.
    Infinite,
    /// Cauchy-Hadamard estimate from the available terms; not certified.
    Estimate(f64),
}

impl RadiusL {
    pub fn certified(&self) -> Option<&CReal> {
        match self {
            RadiusL::Certified(l) => Some(l),
            _ => None,
        }
    }
}

pub fn radius_l(s: &LoopSpectrum) -> RadiusL {
    match s.model() {
        GrowthModel::Constructed { meta, .. } => RadiusL::Certified(meta.radius.clone()),
        GrowthModel::Finite => RadiusL::Infinite,
        GrowthModel::Unknown => RadiusL::Estimate(cauchy_hadamard(s.counts())),
    }
}

/// `radius_l` restricted to certified answers.
pub fn certified_radius_l(s: &LoopSpectrum) -> Result<RadiusL> {
    match radius_l(s) {
        RadiusL::Estimate(_) => Err(Error::NoGrowthModel),
        r => Ok(r),
    }
}

/// `1 / max a(n)^{1/n}` over the upper half of the available terms.
fn cauchy_hadamard(a: &[BigUint]) -> f64 {
    let n_max = a.len();
    let mut best = f64::NEG_INFINITY;
    for n in (n_max / 2).max(1)..=n_max {
        let v = &a[n - 1];
        if v.is_zero() {
            continue;
        }
        let bits = v.bits();
        // ln v without overflowing f64 for huge counts
        let ln = if bits > 1000 {
            let shift = bits - 64;
            ((v >> shift).to_f64().unwrap()).ln() + shift as f64 * std::f64::consts::LN_2
        } else {
            v.to_f64().unwrap().ln()
        };
        best = best.max(ln / n as f64);
    }
    if best == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (-best).exp()
    }
}

/// Enclosure of `F(x) = Σ_{n>=1} a(n) x^n`, truncated sum plus the model's tail.
pub fn f_eval(s: &LoopSpectrum, x: &CReal) -> Result<CReal> {
    if !x.certainly_nonnegative() {
        return Err(Error::InvalidArgument(format!("F evaluated at a negative point {x:?}")));
    }
    let head = s.partial_sum(x);
    let full = &head + &s.series_tail(x)?;
    if let Some(meta) = s.meta() {
        // The tail at the radius is only valid for the radius itself; F is increasing,
        // so a wide x reaching L is covered by [F(x.lo), F(L)].
        if x.overlaps(&meta.radius) && !x.subset_of(&meta.radius) {
            let lo_pt = CReal::exact(x.lo().clone(), x.precision_bits());
            if lo_pt.certainly_lt(&meta.radius) {
                return Ok(full.hull(&f_eval(s, &lo_pt)?));
            }
        }
    }
    Ok(full)
}

/// Enclosure of `Σ n a(n) x^n` for `0 <= x <= L`.
pub fn mean_return(s: &LoopSpectrum, x: &CReal) -> Result<CReal> {
    let p = x.precision_bits();
    let head = s.weighted_partial_sum(x);
    match s.model() {
        GrowthModel::Finite => Ok(head),
        GrowthModel::Unknown => Err(Error::TailUnavailable),
        GrowthModel::Constructed { .. } => {
            let tail = spectrum_tail_bounds(s, s.max_n() + 1, SumWeight::N)?;
            Ok(&head + &CReal::from_bounds(Dyadic::zero(), tail.hi().clone(), p))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Transient => "Transient",
            Verdict::NullRecurrent => "NullRecurrent",
            Verdict::PositiveRecurrent => "PositiveRecurrent",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

/// The verdict together with the values certifying it.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub radius_l: RadiusL,
    /// Radius of `Σ p(n) z^n`.
    pub radius_r: Option<CReal>,
    pub f_at_l: Option<CReal>,
    pub f_at_r: Option<CReal>,
    /// `Σ n a(n) x^n` at `x = R`.
    pub mean_return_bound: Option<CReal>,
    /// `-ln R`
    pub entropy: Option<CReal>,
    pub has_mme: Option<bool>,
    /// `p(N) R^N`, an uncertified estimate of `lim p(n) R^n`.
    pub lambda_estimate: Option<CReal>,
    pub period: Option<u64>,
    pub period_lift: usize,
    pub precision_bits: u32,
}

impl ClassificationReport {
    /// The same graph lifted to period `p`: every loop length is multiplied by `p`.
    pub fn lifted(&self, p: usize) -> ClassificationReport {
        assert!(p >= 1);
        if p == 1 {
            return self.clone();
        }
        let pc = |x: &CReal| CReal::from_int(p as i64, x.precision_bits());
        ClassificationReport {
            verdict: self.verdict,
            radius_l: match &self.radius_l {
                RadiusL::Certified(l) => RadiusL::Certified(l.root(p as u64)),
                RadiusL::Infinite => RadiusL::Infinite,
                RadiusL::Estimate(v) => RadiusL::Estimate(v.powf(1.0 / p as f64)),
            },
            radius_r: self.radius_r.as_ref().map(|r| r.root(p as u64)),
            f_at_l: self.f_at_l.clone(),
            f_at_r: self.f_at_r.clone(),
            mean_return_bound: self.mean_return_bound.as_ref().map(|m| m * &pc(m)),
            entropy: self.entropy.as_ref().map(|h| h.div_int(p as u64)),
            has_mme: self.has_mme,
            lambda_estimate: self.lambda_estimate.clone(),
            period: self.period.map(|d| d * p as u64),
            period_lift: self.period_lift * p,
            precision_bits: self.precision_bits,
        }
    }

    /// Entropy in bits.
    pub fn entropy_bits(&self) -> Option<CReal> {
        let h = self.entropy.as_ref()?;
        Some(h / &CReal::from_int(2, h.precision_bits()).ln())
    }

    pub fn to_json(&self) -> Value {
        let iv = |x: &Option<CReal>| match x {
            Some(v) => interval_json(v),
            None => Value::Null,
        };
        let l = match &self.radius_l {
            RadiusL::Certified(l) => json!({ "certified": true, "value": interval_json(l) }),
            RadiusL::Infinite => json!({ "certified": true, "value": "infinity" }),
            RadiusL::Estimate(v) => json!({ "certified": false, "value": format!("{v:.12}") }),
        };
        json!({
            "verdict": self.verdict.as_str(),
            "L": l,
            "R": iv(&self.radius_r),
            "F_at_L": iv(&self.f_at_l),
            "F_at_R": iv(&self.f_at_r),
            "mean_return_bound": iv(&self.mean_return_bound),
            "entropy": iv(&self.entropy),
            "has_mme": self.has_mme,
            "lambda_estimate": iv(&self.lambda_estimate),
            "period": self.period,
            "period_lift": self.period_lift,
            "precision_bits": self.precision_bits,
        })
    }
}

pub fn interval_json(x: &CReal) -> Value {
    let (lo, hi) = x.to_decimal_interval(REPORT_DIGITS);
    json!({ "lo": lo, "hi": hi })
}

/// Find `R` with `F(R) = 1`, given `F(lo) < 1 < F(hi)`; stops at width `2^-(prec/2)`
/// or when no split point gives a decisive sign.
fn bisect_root(s: &LoopSpectrum, lo: Dyadic, hi: Dyadic, prec: u32) -> Result<CReal> {
    let one = CReal::one(prec);
    let target = Dyadic::pow2(-((prec / 2) as i64));
    let (mut lo, mut hi) = (lo, hi);
    let mut steps = 0;
    while hi.sub(&lo) > target && steps < 4 * prec {
        steps += 1;
        let width = hi.sub(&lo);
        let mut moved = false;
        // Midpoint first, then off-centre splits when F there still straddles 1.
        for (num, den) in [(1i64, 2i64), (1, 3), (2, 3), (1, 5), (4, 5)] {
            let off = width.mul(&Dyadic::from_int(num)).div(&Dyadic::from_int(den), prec, crate::numerics::Round::Down);
            let m = lo.add(&off).round(prec, crate::numerics::Round::Down);
            if m <= lo || m >= hi {
                continue;
            }
            let fm = f_eval(s, &CReal::exact(m.clone(), prec))?;
            if fm.certainly_lt(&one) {
                lo = m;
                moved = true;
                break;
            }
            if one.certainly_lt(&fm) {
                hi = m;
                moved = true;
                break;
            }
            if fm.is_exact() && fm == one {
                return Ok(CReal::exact(m, prec));
            }
        }
        if !moved {
            break;
        }
    }
    Ok(CReal::from_bounds(lo, hi, prec))
}

/// Radius `R` of `Σ p(n) z^n`.
pub fn radius_r(s: &LoopSpectrum, precision_bits: u32) -> Result<CReal> {
    let report = classify(s, precision_bits)?;
    report
        .radius_r
        .ok_or_else(|| Error::RootNotBracketed(format!("verdict {}", report.verdict.as_str())))
}

/// `-ln R`
pub fn entropy(s: &LoopSpectrum, precision_bits: u32) -> Result<CReal> {
    let r = radius_r(s, precision_bits)?;
    entropy_from_radius(&r)
}

fn entropy_from_radius(r: &CReal) -> Result<CReal> {
    if !r.certainly_positive() {
        return Err(Error::RootNotBracketed(format!("R = {r:?} not certified positive")));
    }
    Ok(r.ln().neg())
}

fn loop_gcd(s: &LoopSpectrum) -> Option<u64> {
    let d = s.support().fold(0u64, |acc, n| acc.gcd(&(n as u64)));
    (d > 0).then_some(d)
}

/// Classify the loop graph of `s`. For constructed spectra the working precision is the
/// precision the spectrum was built at; `precision_bits` applies to the other models.
pub fn classify(s: &LoopSpectrum, precision_bits: u32) -> Result<ClassificationReport> {
    let period = loop_gcd(s);
    match s.model() {
        GrowthModel::Constructed { meta, .. } => classify_constructed(s, meta.precision_bits, period),
        GrowthModel::Finite => classify_finite(s, precision_bits, period),
        GrowthModel::Unknown => Ok(ClassificationReport {
            verdict: Verdict::Indeterminate,
            radius_l: radius_l(s),
            radius_r: None,
            f_at_l: None,
            f_at_r: None,
            mean_return_bound: None,
            entropy: None,
            has_mme: None,
            lambda_estimate: None,
            period,
            period_lift: 1,
            precision_bits,
        }),
    }
}

fn has_mme(verdict: Verdict, entropy: &Option<CReal>) -> Option<bool> {
    let h = entropy.as_ref()?;
    (h.certainly_positive() && verdict != Verdict::Indeterminate).then_some(verdict == Verdict::PositiveRecurrent)
}

fn lambda_at_depth(s: &LoopSpectrum, r: &CReal, depth: usize) -> Option<CReal> {
    let counts = PathCountTable::from_spectrum(s, 1, depth).ok()?;
    lambda_estimate(&counts, r).ok().map(|e| e.last().clone())
}

fn classify_constructed(s: &LoopSpectrum, prec: u32, period: Option<u64>) -> Result<ClassificationReport> {
    let meta = s.meta().expect("constructed");
    let l = meta.radius.clone();
    let one = CReal::one(prec);
    let f_l = f_eval(s, &l)?;
    let mean_l = mean_return(s, &l)?;

    // Σ a(n) L^n is known exactly when the spectrum is the construction itself, possibly
    // with loops added or removed; used only when the enclosure alone cannot decide.
    let analytic = s.expected_radius_sum();
    let below = f_l.certainly_lt(&one) || analytic.as_ref().is_some_and(|a| a.certainly_lt(&one) && f_l.overlaps(a));
    let above = one.certainly_lt(&f_l) || analytic.as_ref().is_some_and(|a| one.certainly_lt(a) && f_l.overlaps(a));
    let at_one = !below && !above && s.deleted_loop().is_none() && s.added_loops().is_empty();

    let (verdict, r, f_r, mean_r) = if below {
        (Verdict::Transient, Some(l.clone()), Some(f_l.clone()), Some(mean_l.clone()))
    } else if at_one && mean_l.hi().is_positive() {
        (Verdict::PositiveRecurrent, Some(l.clone()), Some(f_l.clone()), Some(mean_l.clone()))
    } else if above {
        let r = bisect_root(s, Dyadic::zero(), l.lo().clone(), prec)?;
        let f_r = f_eval(s, &r)?;
        let mean_r = mean_return(s, &r)?;
        (Verdict::PositiveRecurrent, Some(r), Some(f_r), Some(mean_r))
    } else {
        (Verdict::Indeterminate, None, None, None)
    };
    let entropy = r.as_ref().map(entropy_from_radius).transpose()?;
    let lambda_estimate = r.as_ref().and_then(|r| lambda_at_depth(s, r, s.max_n()));
    Ok(ClassificationReport {
        has_mme: has_mme(verdict, &entropy),
        verdict,
        radius_l: RadiusL::Certified(l),
        radius_r: r,
        f_at_l: Some(f_l),
        f_at_r: f_r,
        mean_return_bound: mean_r,
        entropy,
        lambda_estimate,
        period,
        period_lift: 1,
        precision_bits: prec,
    })
}

/// Finitely many loops: a finite strongly connected graph, always positive recurrent.
fn classify_finite(s: &LoopSpectrum, prec: u32, period: Option<u64>) -> Result<ClassificationReport> {
    if period.is_none() {
        return Err(Error::EmptyLoopSet);
    }
    let one = CReal::one(prec);
    // F is a polynomial with F(0) = 0; double until F(hi) >= 1.
    let mut hi = Dyadic::one();
    loop {
        let f = f_eval(s, &CReal::exact(hi.clone(), prec))?;
        if !f.certainly_lt(&one) {
            break;
        }
        hi = hi.shl(1);
    }
    let f_hi = f_eval(s, &CReal::exact(hi.clone(), prec))?;
    let r = if f_hi == one {
        CReal::exact(hi, prec)
    } else {
        bisect_root(s, Dyadic::zero(), hi, prec)?
    };
    let f_r = f_eval(s, &r)?;
    let mean_r = mean_return(s, &r)?;
    let entropy = entropy_from_radius(&r)?;
    let verdict = Verdict::PositiveRecurrent;
    Ok(ClassificationReport {
        has_mme: has_mme(verdict, &Some(entropy.clone())),
        verdict,
        radius_l: RadiusL::Infinite,
        lambda_estimate: lambda_at_depth(s, &r, 64),
        radius_r: Some(r),
        f_at_l: None,
        f_at_r: Some(f_r),
        mean_return_bound: Some(mean_r),
        entropy: Some(entropy),
        period,
        period_lift: 1,
        precision_bits: prec,
    })
}

/// `p(n) R^n` over a trailing window; an uncertified look at `lim p(n) R^n`.
#[derive(Debug, Clone)]
pub struct LambdaEstimate {
    pub values: Vec<(usize, CReal)>,
}

impl LambdaEstimate {
    pub fn last(&self) -> &CReal {
        &self.values.last().expect("nonempty").1
    }

    /// Midpoints strictly decreasing across the window.
    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1].1.to_f64() < w[0].1.to_f64())
    }

    /// Ratio of the largest to the smallest midpoint in the window.
    pub fn spread(&self) -> f64 {
        let v: Vec<f64> = self.values.iter().map(|(_, x)| x.to_f64()).collect();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// `p(n) R^n` for `n` in the upper half of the table, along the period's residue class.
pub fn lambda_estimate(counts: &PathCountTable, r: &CReal) -> Result<LambdaEstimate> {
    lambda_window(counts, r, counts.depth() / 2)
}

pub fn lambda_window(counts: &PathCountTable, r: &CReal, from: usize) -> Result<LambdaEstimate> {
    let d = counts
        .period()
        .ok_or_else(|| Error::InsufficientData("no closed path of positive length".into()))?;
    let prec = r.precision_bits();
    let values: Vec<(usize, CReal)> = (from.max(1)..=counts.depth())
        .filter(|&n| (n as u64).is_multiple_of(d) && !counts.p[n].is_zero())
        .map(|n| (n, &CReal::from_biguint(&counts.p[n], prec) * &r.powi(n as u64)))
        .collect();
    if values.is_empty() {
        return Err(Error::InsufficientData(format!("no positive counts in {from}..={}", counts.depth())));
    }
    Ok(LambdaEstimate { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{BetaValue, PrecisionPolicy};
    use crate::spectrum::{build_spectrum, delete_loop};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn beta2(n: usize) -> LoopSpectrum {
        build_spectrum(&BetaValue::integer(2).unwrap(), n, &PrecisionPolicy::default()).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn beta_two_is_positive_recurrent() {
        let r = classify(&beta2(64), 256).unwrap();
        assert_eq!(r.verdict, Verdict::PositiveRecurrent);
        assert!(r.radius_r.as_ref().unwrap().contains_rational(&rat(1, 2)));
        assert!(r.f_at_l.as_ref().unwrap().contains_rational(&rat(1, 1)));
        let h = r.entropy.unwrap();
        assert!((h.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(r.has_mme, Some(true));
        assert_eq!(r.period, Some(1));
    }

    #[test]
    fn deleted_variant_is_transient() {
        let s = delete_loop(&beta2(64), None).unwrap();
        let r = classify(&s, 256).unwrap();
        assert_eq!(r.verdict, Verdict::Transient);
        assert!(r.f_at_l.as_ref().unwrap().contains_rational(&rat(15, 16)));
        assert_eq!(r.radius_r.as_ref(), r.radius_l.certified());
        assert_eq!(r.has_mme, Some(false));
    }

    #[test]
    fn f_at_zero_and_monotone() {
        let s = beta2(32);
        assert!(f_eval(&s, &CReal::zero(256)).unwrap().is_exact());
        let a = f_eval(&s, &CReal::from_rational(&rat(1, 4), 256)).unwrap();
        let b = f_eval(&s, &CReal::from_rational(&rat(3, 8), 256)).unwrap();
        assert!(a.certainly_lt(&b));
    }

    #[test]
    fn extra_short_loop_pulls_r_below_l() {
        let s = beta2(64).add_loop(2).unwrap();
        let r = classify(&s, 256).unwrap();
        assert_eq!(r.verdict, Verdict::PositiveRecurrent);
        let l = r.radius_l.certified().unwrap();
        let rr = r.radius_r.as_ref().unwrap();
        assert!(rr.certainly_lt(l));
        assert!(!r.f_at_l.as_ref().unwrap().certainly_lt(&CReal::one(256)));
        assert!(r.f_at_r.as_ref().unwrap().contains_rational(&rat(1, 1)));
        assert!(rr.width() < Dyadic::pow2(-60), "{rr:?} {:?}", r.f_at_r);
        assert_eq!(r.has_mme, Some(true));
    }

    #[test]
    fn single_self_loop() {
        let s = LoopSpectrum::from_u64s(&[1], GrowthModel::Finite).unwrap();
        let r = classify(&s, 128).unwrap();
        assert_eq!(r.verdict, Verdict::PositiveRecurrent);
        assert_eq!(r.radius_l, RadiusL::Infinite);
        let rr = r.radius_r.as_ref().unwrap();
        assert!(rr.is_exact() && rr.contains_rational(&rat(1, 1)));
        let h = r.entropy.as_ref().unwrap();
        assert!(h.is_exact() && h.lo().is_zero());
        assert!(r.mean_return_bound.as_ref().unwrap().contains_rational(&rat(1, 1)));
        assert_eq!(r.has_mme, None);
        assert!(r.lambda_estimate.as_ref().unwrap().contains_rational(&rat(1, 1)));
    }

    #[test]
    fn finite_golden_mean_graph() {
        // loops of length 1 and 2: F(x) = x + x^2, root (√5 - 1)/2
        let s = LoopSpectrum::from_u64s(&[1, 1], GrowthModel::Finite).unwrap();
        let r = classify(&s, 256).unwrap().radius_r.unwrap();
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        assert!((r.to_f64() - phi).abs() < 1e-15);
        assert!(r.width() <= Dyadic::pow2(-128));
    }

    #[test]
    fn unknown_model_is_indeterminate() {
        let s = LoopSpectrum::from_u64s(&[1; 40], GrowthModel::Unknown).unwrap();
        let r = classify(&s, 128).unwrap();
        assert_eq!(r.verdict, Verdict::Indeterminate);
        assert_eq!(r.radius_l, RadiusL::Estimate(1.0));
        assert!(certified_radius_l(&s).is_err());
        assert!(f_eval(&s, &CReal::from_rational(&rat(1, 2), 64)).is_err());
    }

    #[test]
    fn lifted_report_scales() {
        let r = classify(&beta2(32), 256).unwrap().lifted(3);
        assert_eq!(r.period, Some(3));
        let h = r.entropy.unwrap();
        assert!((h.to_f64() - std::f64::consts::LN_2 / 3.0).abs() < 1e-15);
        assert!((r.radius_r.unwrap().to_f64() - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn report_json_is_stable() {
        let s = beta2(16);
        let a = classify(&s, 256).unwrap().to_json().to_string();
        let b = classify(&s, 256).unwrap().to_json().to_string();
        assert_eq!(a, b);
        assert!(a.contains("\"verdict\":\"PositiveRecurrent\""));
    }
}

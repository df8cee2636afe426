//! The invariant suite behind `markovforge verify`.

use num_bigint::BigUint;
use num_traits::One;

use crate::classifier::{classify, Verdict};
use crate::error::Result;
use crate::graph::{largest_realizable, lift_period, loop_length_gcd, period, realize, MAX_VERTICES};
use crate::oracle::{enumerate_counts, graph_counts, period_from_counts, renewal_convolve, PathCountTable};
use crate::spectrum::{check_lemma_properties, LoopSpectrum};

/// Depth up to which explicit path enumeration is attempted.
pub const ENUMERATION_DEPTH: usize = 20;
pub const ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Truncation actually realized for the graph checks.
    pub depth_used: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Run every check on `s` viewed with loop lengths multiplied by `period_lift`. Graph
/// checks use the truncation `oracle_depth`, reduced until the realized graph fits.
pub fn verify(s: &LoopSpectrum, period_lift: usize, oracle_depth: usize, precision_bits: u32) -> Result<VerifyReport> {
    let mut c = Checks(Vec::new());
    let p = period_lift.max(1);

    if let Some(trace) = s.trace() {
        let lemma = check_lemma_properties(s)?;
        c.push("a(1) = 1", lemma.a1_is_one, format!("a(1) = {}", s.a(1)));
        let (lo, hi) = lemma.radius_sum.to_decimal_interval(40);
        c.push("sum a(n) L^n", lemma.radius_sum_matches, format!("[{lo}, {hi}]"));
        let bad: Vec<u64> = lemma.square_floor_lower.iter().filter(|x| !x.1).map(|x| x.0).collect();
        c.push("square lower bound", bad.is_empty(), format!("failing m: {bad:?}"));
        let bad: Vec<u64> = lemma.square_upper.iter().filter(|x| !x.1).map(|x| x.0).collect();
        c.push("square upper bound", bad.is_empty(), format!("failing m: {bad:?}"));
        c.push("non-square bound", lemma.nonsquare_bounded, "a(n) <= M off the squares");

        let mut expected = trace.recombine();
        if let Some(n0) = s.deleted_loop() {
            expected[n0 - 1] -= BigUint::one();
        }
        for &n in s.added_loops() {
            expected[n - 1] += BigUint::one();
        }
        c.push("digit trace", expected == s.counts(), "a(n) = b(n) + d'(n)");
    }

    let n = oracle_depth.min(s.max_n()).min(largest_realizable(s, p, MAX_VERTICES));
    let depth = n * p;
    if n >= 1 && !(s.a(1) > &BigUint::one()) {
        let g = lift_period(&realize(s, n)?, p)?;
        c.push("strongly connected", g.is_strongly_connected(), format!("{} vertices", g.vertex_count()));
        let dp = graph_counts(&g, depth);
        let spec = PathCountTable::from_spectrum(&realize_view(s, n), p, depth)?;
        c.push("first returns = spectrum", dp.f == spec.f, format!("n <= {depth}"));
        c.push(
            "paths = renewal",
            dp.p == renewal_convolve(&dp.f, depth),
            format!("n <= {depth}"),
        );
        if depth <= ENUMERATION_DEPTH {
            match enumerate_counts(&g, depth, ENUMERATION_CAP) {
                Ok(e) => c.push("enumeration = DP", e.p == dp.p && e.f == dp.f, format!("n <= {depth}")),
                Err(err) => c.push("enumeration = DP", true, format!("skipped: {err}")),
            }
        }
        let by_bfs = period(&g);
        let by_loops = loop_length_gcd(&g);
        match (by_bfs, by_loops) {
            (Ok(a), Ok(b)) => {
                let by_counts = period_from_counts(&dp.p);
                c.push(
                    "period",
                    a == b && by_counts == Some(a),
                    format!("bfs {a}, loop gcd {b}, counts {by_counts:?}"),
                );
            }
            (a, b) => c.push("period", false, format!("bfs {a:?}, loop gcd {b:?}")),
        }
    } else {
        c.push("graph realization", false, "nothing realizable within the vertex limit");
    }

    let report = classify(s, precision_bits)?;
    let one = crate::numerics::CReal::one(report.precision_bits);
    let consistent = match report.verdict {
        Verdict::Transient => {
            report.f_at_l.as_ref().is_some_and(|f| f.certainly_lt(&one))
                && report.radius_r.as_ref() == report.radius_l.certified()
                && report.has_mme != Some(true)
        }
        Verdict::PositiveRecurrent => {
            report.f_at_r.as_ref().is_some_and(|f| f.overlaps(&one))
                && report.mean_return_bound.is_some()
                && report.has_mme != Some(false)
        }
        Verdict::NullRecurrent => false,
        Verdict::Indeterminate => true,
    };
    c.push("classification certificate", consistent, report.verdict.as_str());
    if s.meta().is_some() {
        let expected = if s.deleted_loop().is_some() && s.added_loops().is_empty() {
            Verdict::Transient
        } else {
            Verdict::PositiveRecurrent
        };
        c.push(
            "expected verdict",
            report.verdict == expected,
            format!("got {}, expected {}", report.verdict.as_str(), expected.as_str()),
        );
    }
    if let Some(h) = &report.entropy {
        let minus_ln_r = report.radius_r.as_ref().map(|r| r.ln().neg());
        c.push(
            "entropy = -ln R",
            minus_ln_r.is_some_and(|m| m.overlaps(h)),
            format!("{h}"),
        );
    }

    Ok(VerifyReport {
        checks: c.0,
        depth_used: n,
    })
}

/// `s` truncated to its first `n` lengths, as a finite spectrum.
fn realize_view(s: &LoopSpectrum, n: usize) -> LoopSpectrum {
    LoopSpectrum::from_counts(s.counts()[..n].to_vec(), crate::spectrum::GrowthModel::Finite)
        .expect("n >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{BetaValue, PrecisionPolicy};
    use crate::spectrum::{build_spectrum, delete_loop, GrowthModel};

    #[test]
    fn beta_two_passes() {
        let s = build_spectrum(&BetaValue::integer(2).unwrap(), 64, &PrecisionPolicy::default()).unwrap();
        let r = verify(&s, 1, 12, 256).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.depth_used, 12);
        let t = delete_loop(&s, None).unwrap();
        let r = verify(&t, 2, 12, 256).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn large_base_shrinks_depth() {
        let s = build_spectrum(&BetaValue::integer(8).unwrap(), 64, &PrecisionPolicy::default()).unwrap();
        let r = verify(&s, 1, 12, 256).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.depth_used < 12);
    }

    #[test]
    fn finite_spectrum() {
        let s = LoopSpectrum::from_u64s(&[0, 1, 0, 2], GrowthModel::Finite).unwrap();
        let r = verify(&s, 1, 12, 128).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}

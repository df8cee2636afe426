//! Exact path counts: DP over explicit graphs, brute-force enumeration, and the
//! first-return renewal recurrence `p(n) = Σ f(k) p(n-k)`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::ExplicitGraph;
use crate::numerics::CReal;
use crate::spectrum::{GrowthModel, LoopSpectrum};

/// Where a count table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountSource {
    Enumeration,
    GraphDp,
    Renewal,
    Spectrum,
}

/// First-return counts `f(1..=N)` and path counts `p(0..=N)` at the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountTable {
    /// `f[n-1] = f(n)`
    pub f: Vec<BigUint>,
    /// `p[n] = p(n)`, with `p(0) = 1`
    pub p: Vec<BigUint>,
    pub source: CountSource,
}

impl PathCountTable {
    pub fn from_first_returns(f: Vec<BigUint>, source: CountSource) -> PathCountTable {
        let p = renewal_convolve(&f, f.len());
        PathCountTable { f, p, source }
    }

    /// Counts for the loop graph of `s`, lifted to period `period_lift`, to length `depth`.
    pub fn from_spectrum(s: &LoopSpectrum, period_lift: usize, depth: usize) -> Result<PathCountTable> {
        if period_lift == 0 {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        let finite = matches!(s.model(), GrowthModel::Finite);
        if !finite && depth / period_lift > s.max_n() {
            return Err(Error::InsufficientData(format!(
                "depth {depth} needs loops up to length {} but the spectrum stops at {}",
                depth / period_lift,
                s.max_n()
            )));
        }
        let f = (1..=depth)
            .map(|n| {
                if n % period_lift == 0 && n / period_lift <= s.max_n() {
                    s.a(n / period_lift).clone()
                } else {
                    BigUint::zero()
                }
            })
            .collect();
        Ok(PathCountTable::from_first_returns(f, CountSource::Spectrum))
    }

    pub fn depth(&self) -> usize {
        self.p.len() - 1
    }

    /// First `n` with `p(n) != Σ f(k) p(n-k)`, if any.
    pub fn renewal_violation(&self) -> Option<usize> {
        if !self.p[0].is_one() {
            return Some(0);
        }
        let expected = renewal_convolve(&self.f, self.depth());
        (1..=self.depth()).find(|&n| expected[n] != self.p[n])
    }

    /// gcd of `{n >= 1 : p(n) > 0}`, or `None` when no such `n` is in range.
    pub fn period(&self) -> Option<u64> {
        period_from_counts(&self.p)
    }

    /// CSV rows `n,f,p,growth_estimate`; the estimate is blank where `p(n) = 0` or `n = 0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,f,p,growth_estimate\n");
        for n in 0..=self.depth() {
            let f = if n == 0 { String::new() } else { self.f[n - 1].to_string() };
            let g = if n == 0 || self.p[n].is_zero() {
                String::new()
            } else {
                format!("{:.15}", log_over_n(&self.p[n], n, 96).to_f64())
            };
            writeln!(out, "{n},{f},{},{g}", self.p[n]).unwrap();
        }
        out
    }
}

/// `p(0..=n)` from first-return counts `f(1..)`; `f` may be shorter than `n` (missing terms are 0).
pub fn renewal_convolve(f: &[BigUint], n: usize) -> Vec<BigUint> {
    let mut p: Vec<BigUint> = Vec::with_capacity(n + 1);
    p.push(BigUint::one());
    for m in 1..=n {
        let mut acc = BigUint::zero();
        for k in 1..=m.min(f.len()) {
            if !f[k - 1].is_zero() && !p[m - k].is_zero() {
                acc += &f[k - 1] * &p[m - k];
            }
        }
        p.push(acc);
    }
    p
}

/// `p_uv(0..=n)` by propagating a count vector along the arrows.
pub fn count_paths(g: &ExplicitGraph, u: usize, v: usize, n: usize) -> Vec<BigUint> {
    let mut cur = vec![BigUint::zero(); g.vertex_count()];
    cur[u] = BigUint::one();
    let mut out = vec![cur[v].clone()];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); g.vertex_count()];
        for (x, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &w in g.successors(x) {
                next[w] += c;
            }
        }
        cur = next;
        out.push(cur[v].clone());
    }
    out
}

/// `f_uu(1..=n)`: paths from `u` back to `u` that avoid `u` in between.
/// Mass arriving at `u` is recorded and then absorbed.
pub fn count_first_returns(g: &ExplicitGraph, u: usize, n: usize) -> Vec<BigUint> {
    let mut cur = vec![BigUint::zero(); g.vertex_count()];
    cur[u] = BigUint::one();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); g.vertex_count()];
        for (x, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &w in g.successors(x) {
                next[w] += c;
            }
        }
        out.push(std::mem::take(&mut next[u]));
        cur = next;
    }
    out
}

/// Both tables for the root of `g`, computed by DP.
pub fn graph_counts(g: &ExplicitGraph, n: usize) -> PathCountTable {
    let root = g.root();
    PathCountTable {
        f: count_first_returns(g, root, n),
        p: count_paths(g, root, root, n),
        source: CountSource::GraphDp,
    }
}

/// Walk every path from the root of length `<= n` one at a time, tallying closed
/// paths and first returns. Gives up after `max_paths` partial paths.
pub fn enumerate_counts(g: &ExplicitGraph, n: usize, max_paths: u64) -> Result<PathCountTable> {
    let root = g.root();
    let mut p = vec![0u64; n + 1];
    let mut f = vec![0u64; n];
    let mut visited = 0u64;
    // (vertex, length, has returned to root already)
    let mut stack = vec![(root, 0usize, false)];
    while let Some((v, len, returned)) = stack.pop() {
        visited += 1;
        if visited > max_paths {
            return Err(Error::InsufficientData(format!(
                "more than {max_paths} paths of length <= {n}"
            )));
        }
        if v == root {
            p[len] += 1;
            if len > 0 && !returned {
                f[len - 1] += 1;
            }
        }
        if len == n {
            continue;
        }
        let returned = returned || (v == root && len > 0);
        for &w in g.successors(v).iter().rev() {
            stack.push((w, len + 1, returned));
        }
    }
    Ok(PathCountTable {
        f: f.into_iter().map(BigUint::from).collect(),
        p: p.into_iter().map(BigUint::from).collect(),
        source: CountSource::Enumeration,
    })
}

/// gcd of `{n >= 1 : p[n] > 0}`.
pub fn period_from_counts(p: &[BigUint]) -> Option<u64> {
    let d = p
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| !v.is_zero())
        .fold(0u64, |acc, (n, _)| acc.gcd(&(n as u64)));
    (d > 0).then_some(d)
}

fn log_over_n(v: &BigUint, n: usize, bits: u32) -> CReal {
    CReal::from_biguint(v, bits).ln().div_int(n as u64)
}

/// Estimates `(1/n) log p(n)` over the last `window` indices of the period's residue class.
#[derive(Debug, Clone)]
pub struct GrowthEstimate {
    pub period: u64,
    pub points: Vec<(usize, CReal)>,
}

impl GrowthEstimate {
    pub fn last(&self) -> &CReal {
        &self.points.last().expect("nonempty by construction").1
    }
}

pub fn growth_rate(p: &[BigUint], window: usize) -> Result<GrowthEstimate> {
    let period = period_from_counts(p).ok_or_else(|| Error::InsufficientData("no closed path of positive length".into()))?;
    let idx: Vec<usize> = (1..p.len())
        .filter(|&n| (n as u64).is_multiple_of(period) && !p[n].is_zero())
        .collect();
    if window == 0 || idx.len() < window {
        return Err(Error::InsufficientData(format!(
            "{} usable counts, window {window}",
            idx.len()
        )));
    }
    let points = idx[idx.len() - window..]
        .iter()
        .map(|&n| (n, log_over_n(&p[n], n, 128)))
        .collect();
    Ok(GrowthEstimate { period, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{lift_period, realize};
    use crate::numerics::{BetaValue, PrecisionPolicy};
    use crate::spectrum::{build_spectrum, delete_loop};

    fn nums(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn beta2(n: usize) -> LoopSpectrum {
        build_spectrum(&BetaValue::integer(2).unwrap(), n, &PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn renewal_small_cases() {
        assert_eq!(renewal_convolve(&nums(&[1]), 5), nums(&[1; 6]));
        assert_eq!(renewal_convolve(&nums(&[1, 0, 0, 4]), 6), nums(&[1, 1, 1, 1, 5, 9, 13]));
        assert_eq!(renewal_convolve(&nums(&[0, 1]), 6), nums(&[1, 0, 1, 0, 1, 0, 1]));
    }

    #[test]
    fn beta_two_graph_counts() {
        let g = realize(&beta2(16), 16).unwrap();
        let t = graph_counts(&g, 12);
        assert_eq!(t.p[..7], nums(&[1, 1, 1, 1, 5, 9, 13])[..]);
        assert_eq!(t.f, nums(&[1, 0, 0, 4, 0, 0, 0, 0, 64, 0, 0, 0]));
        assert_eq!(t.renewal_violation(), None);
    }

    #[test]
    fn empty_path_convention() {
        let g = realize(&beta2(16), 4).unwrap();
        let root = g.root();
        let other = (root + 1) % g.vertex_count();
        assert_eq!(count_paths(&g, root, root, 0), nums(&[1]));
        assert_eq!(count_paths(&g, root, other, 0), nums(&[0]));
    }

    #[test]
    fn lifted_first_returns_live_on_multiples() {
        let g = lift_period(&realize(&beta2(16), 4).unwrap(), 3).unwrap();
        let f = count_first_returns(&g, g.root(), 12);
        assert_eq!(f, nums(&[0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 4]));
    }

    #[test]
    fn deleted_variant_has_three_four_loops() {
        let s = delete_loop(&beta2(16), None).unwrap();
        let g = realize(&s, 8).unwrap();
        assert_eq!(count_first_returns(&g, g.root(), 8)[3], BigUint::from(3u32));
    }

    #[test]
    fn enumeration_agrees_with_dp() {
        let g = realize(&beta2(16), 12).unwrap();
        let e = enumerate_counts(&g, 12, 1_000_000).unwrap();
        let d = graph_counts(&g, 12);
        assert_eq!(e.p, d.p);
        assert_eq!(e.f, d.f);
        assert!(enumerate_counts(&g, 12, 10).is_err());
    }

    #[test]
    fn growth_of_single_self_loop_is_zero() {
        let s = LoopSpectrum::from_u64s(&[1], GrowthModel::Finite).unwrap();
        let t = PathCountTable::from_first_returns(nums(&[1, 0, 0, 0, 0]), CountSource::Renewal);
        let g = growth_rate(&t.p, 3).unwrap();
        assert!(g.last().is_exact() && g.last().lo().is_zero());
        assert_eq!(s.a(1), &BigUint::one());
    }

    #[test]
    fn growth_beta_two() {
        let t = PathCountTable::from_spectrum(&beta2(64), 1, 64).unwrap();
        let g = growth_rate(&t.p, 8).unwrap();
        assert_eq!(g.period, 1);
        assert!((g.last().to_f64() - std::f64::consts::LN_2).abs() < 0.05);
    }

    #[test]
    fn growth_needs_data() {
        assert!(growth_rate(&nums(&[1, 0, 0]), 1).is_err());
        assert!(growth_rate(&nums(&[1, 1]), 2).is_err());
    }

    #[test]
    fn period_and_csv() {
        let t = PathCountTable::from_first_returns(nums(&[0, 1, 0, 1]), CountSource::Renewal);
        assert_eq!(t.period(), Some(2));
        let csv = t.to_csv();
        assert!(csv.starts_with("n,f,p,growth_estimate\n0,,1,\n1,0,0,\n2,1,1,0.000000000000000\n"));
    }
}

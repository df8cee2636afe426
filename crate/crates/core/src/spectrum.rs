//! Loop spectra: how many simple loops of each length pass through the root.
//!
//! [`build_spectrum`] turns a base β > 1 into a sequence `a(n)` with `a(1) = 1`,
//! `sum a(n) β^-n = 1`, square terms `a(m²) ≈ c β^{m²-m}` with `c = (β-1)²`, and all other
//! terms bounded by `M = β + k`. Square terms come from floors `b(m²)`; the deficit
//! `δ = 1 - sum b(n) β^-n` is spread over the remaining lengths through a greedy
//! β-expansion of `δ - k/β²` (with `k = ⌊β²δ⌋` folded into length 2).

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::{
    certified_floor, eval_beta, geometric_tail, is_precision_failure, BetaValue, CReal, Dyadic,
    PrecisionPolicy, TailWeight,
};

/// Default truncation length.
pub const DEFAULT_MAX_N: usize = 64;

/// Largest square root index tracked beyond the truncation.
const MAX_HORIZON: u64 = 512;

/// Bits of slack kept between a square term's magnitude and the working precision.
const HORIZON_SLACK_BITS: i64 = 48;

/// Greedy β-expansion digits with the remainder left after the last digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaExpansion {
    /// `d(1..=n)`
    pub digits: Vec<BigUint>,
    /// `r_n = β^n (x - sum_{j<=n} d(j) β^-j)`, certified in `[0, 1)`.
    pub remainder: CReal,
}

/// Greedy expansion of `x ∈ [0, 1)` in base β: `d(n) = ⌊β r_{n-1}⌋`, `r_n = β r_{n-1} - d(n)`.
pub fn beta_expansion(x: &CReal, beta: &BetaValue, num_digits: usize) -> Result<BetaExpansion> {
    let b = eval_beta(beta, x.precision_bits().max(32))?;
    greedy_digits(x, &b, num_digits)
}

pub(crate) fn greedy_digits(x: &CReal, beta: &CReal, num_digits: usize) -> Result<BetaExpansion> {
    let p = x.precision_bits().max(beta.precision_bits());
    let unit = CReal::from_bounds(Dyadic::zero(), Dyadic::one(), p);
    if x.lo().is_negative() || !x.certainly_lt(&CReal::one(p)) {
        return Err(Error::InvalidArgument(format!(
            "β-expansion needs a value certified in [0, 1), got {x:?}"
        )));
    }
    let mut r = x.clone();
    let mut digits = Vec::with_capacity(num_digits);
    for _ in 0..num_digits {
        let t = beta * &r;
        let d = certified_floor(&t)?;
        r = (&t - &CReal::from_bigint(&d, p))
            .intersect(&unit)
            .ok_or_else(|| Error::Invariant("greedy remainder left [0, 1]".into()))?;
        digits.push(d.to_biguint().expect("floor of a nonnegative value"));
    }
    Ok(BetaExpansion { digits, remainder: r })
}

/// Intermediate sequences of the construction, kept for audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitTrace {
    /// `b(n)` for `n = 1..=N`
    pub b: Vec<BigUint>,
    /// greedy digits `d(n)` for `n = 1..=N`
    pub d: Vec<BigUint>,
    /// `d'(n)`: `d'(1) = 0`, `d'(2) = d(2) + k`, `d'(n) = d(n)` after
    pub d_prime: Vec<BigUint>,
}

/// What is known about `a(n)` past the truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailModel {
    /// Floors `b(m²)` are known exactly for every `m <= horizon`.
    pub horizon: u64,
    /// `b(m²)` for squares past the truncation, `m = first_outer..=horizon`.
    pub outer_b: Vec<BigUint>,
    /// Greedy remainder after the last stored digit.
    pub remainder: CReal,
    /// `c β^{m²-m}` is an integer for every m (β an integer), so every floor is exact.
    pub exact_squares: bool,
}

/// Analytic constants of a constructed spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumMeta {
    pub beta: BetaValue,
    pub precision_bits: u32,
    pub beta_enclosure: CReal,
    /// `(β-1)²`
    pub c: CReal,
    pub delta: CReal,
    /// `⌊β²δ⌋`
    pub k: BigUint,
    /// `β + k`
    pub m_bound: CReal,
    /// `1/β`, the radius of convergence of `sum a(n) z^n`
    pub radius: CReal,
    pub tail: TailModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrowthModel {
    /// Built from β; tails past the truncation are certified.
    Constructed {
        meta: Box<SpectrumMeta>,
        trace: DigitTrace,
    },
    /// `a(n) = 0` past the truncation (a finite graph).
    Finite,
    /// Nothing is known past the truncation.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopSpectrum {
    a: Vec<BigUint>,
    model: GrowthModel,
    deleted_loop: Option<usize>,
    added_loops: Vec<usize>,
}

impl LoopSpectrum {
    /// A user-supplied spectrum `a(1..=N)`.
    pub fn from_counts(a: Vec<BigUint>, model: GrowthModel) -> Result<LoopSpectrum> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("spectrum needs at least a(1)".into()));
        }
        if matches!(model, GrowthModel::Constructed { .. }) {
            return Err(Error::InvalidArgument(
                "constructed spectra come from build_spectrum".into(),
            ));
        }
        Ok(LoopSpectrum {
            a,
            model,
            deleted_loop: None,
            added_loops: Vec::new(),
        })
    }

    pub fn from_u64s(a: &[u64], model: GrowthModel) -> Result<LoopSpectrum> {
        LoopSpectrum::from_counts(a.iter().map(|&v| BigUint::from(v)).collect(), model)
    }

    /// Reassemble a spectrum from its parts (used when reading files).
    pub fn from_parts(
        a: Vec<BigUint>,
        model: GrowthModel,
        deleted_loop: Option<usize>,
        added_loops: Vec<usize>,
    ) -> Result<LoopSpectrum> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("spectrum needs at least a(1)".into()));
        }
        if deleted_loop.is_some_and(|n0| n0 < 2 || n0 > a.len()) {
            return Err(Error::InvalidArgument("deleted loop length out of range".into()));
        }
        for &n in &added_loops {
            let times = added_loops.iter().filter(|&&m| m == n).count();
            if n == 0 || n > a.len() || a[n - 1] < BigUint::from(times) {
                return Err(Error::InvalidArgument(format!("added loop of length {n} is inconsistent with a({n})")));
            }
        }
        Ok(LoopSpectrum {
            a,
            model,
            deleted_loop,
            added_loops,
        })
    }

    /// Truncation length N.
    pub fn max_n(&self) -> usize {
        self.a.len()
    }

    /// `a(n)` for `1 <= n <= N`.
    pub fn a(&self, n: usize) -> &BigUint {
        &self.a[n - 1]
    }

    /// `a(1..=N)`
    pub fn counts(&self) -> &[BigUint] {
        &self.a
    }

    pub fn model(&self) -> &GrowthModel {
        &self.model
    }

    pub fn meta(&self) -> Option<&SpectrumMeta> {
        match &self.model {
            GrowthModel::Constructed { meta, .. } => Some(meta),
            _ => None,
        }
    }

    pub fn trace(&self) -> Option<&DigitTrace> {
        match &self.model {
            GrowthModel::Constructed { trace, .. } => Some(trace),
            _ => None,
        }
    }

    pub fn deleted_loop(&self) -> Option<usize> {
        self.deleted_loop
    }

    pub fn added_loops(&self) -> &[usize] {
        &self.added_loops
    }

    /// Lengths n with `a(n) > 0`.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.a
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, _)| i + 1)
    }

    /// The same spectrum with one extra loop of length `n` (within the truncation).
    pub fn add_loop(&self, n: usize) -> Result<LoopSpectrum> {
        if n == 0 || n > self.max_n() {
            return Err(Error::InvalidArgument(format!(
                "loop length {n} outside 1..={}",
                self.max_n()
            )));
        }
        let mut out = self.clone();
        out.a[n - 1] += 1u32;
        out.added_loops.push(n);
        Ok(out)
    }

    /// Σ_{n>N} a(n) x^n for `0 <= x <= 1/β`.
    ///
    /// A point whose enclosure reaches the radius enclosure is read as the radius itself.
    pub fn series_tail(&self, x: &CReal) -> Result<CReal> {
        let p = x.precision_bits();
        match &self.model {
            GrowthModel::Finite => Ok(CReal::zero(p)),
            GrowthModel::Unknown => {
                if x.lo().is_zero() && x.hi().is_zero() {
                    Ok(CReal::zero(p))
                } else {
                    Err(Error::TailUnavailable)
                }
            }
            GrowthModel::Constructed { meta, .. } => {
                if x.certainly_lt(&meta.radius) {
                    Ok(tail_below_radius(meta, self.max_n(), x))
                } else if meta.radius.certainly_lt(x) {
                    Err(Error::InvalidArgument(format!(
                        "x = {x:?} lies beyond the radius of convergence"
                    )))
                } else {
                    Ok(tail_at_radius(meta, self.max_n()))
                }
            }
        }
    }

    /// Σ_{n<=N} a(n) x^n
    pub fn partial_sum(&self, x: &CReal) -> CReal {
        let p = x.precision_bits();
        let mut acc = CReal::zero(p);
        for v in self.a.iter().rev() {
            acc = &(&acc + &CReal::from_biguint(v, p)) * x;
        }
        acc
    }

    /// Σ_{n<=N} n a(n) x^n
    pub fn weighted_partial_sum(&self, x: &CReal) -> CReal {
        let p = x.precision_bits();
        let mut acc = CReal::zero(p);
        for (i, v) in self.a.iter().enumerate().rev() {
            let w = BigUint::from(i + 1) * v;
            acc = &(&acc + &CReal::from_biguint(&w, p)) * x;
        }
        acc
    }

    /// What `sum a(n) β^-n` should equal: 1, minus the deleted loop, plus added loops.
    pub fn expected_radius_sum(&self) -> Option<CReal> {
        let meta = self.meta()?;
        let l = &meta.radius;
        let mut v = CReal::one(l.precision_bits());
        if let Some(n0) = self.deleted_loop {
            v = &v - &l.powi(n0 as u64);
        }
        for &n in &self.added_loops {
            v = &v + &l.powi(n as u64);
        }
        Some(v)
    }
}

fn tail_at_radius(meta: &SpectrumMeta, n_max: usize) -> CReal {
    let l = &meta.radius;
    let p = l.precision_bits();
    let tail = &meta.tail;
    let digits = &l.powi(n_max as u64) * &tail.remainder;
    let first_outer = first_outer_root(n_max);
    let mut outer = CReal::zero(p);
    for (j, b) in tail.outer_b.iter().enumerate() {
        let m = first_outer + j as u64;
        outer = &outer + &(&CReal::from_biguint(b, p) * &l.powi(m * m));
    }
    let h = tail.horizon;
    let beyond_hi = &meta.c * &geometric_tail(l, h + 1, TailWeight::One).expect("1/β < 1");
    let beyond = if tail.exact_squares {
        beyond_hi
    } else {
        let fracs = geometric_tail(l, (h + 1) * (h + 1), TailWeight::One).expect("1/β < 1");
        let lo = (&beyond_hi - &fracs).lo().clone().max(Dyadic::zero());
        CReal::from_bounds(lo, beyond_hi.hi().clone(), p)
    };
    &(&digits + &outer) + &beyond
}

fn tail_below_radius(meta: &SpectrumMeta, n_max: usize, x: &CReal) -> CReal {
    let p = x.precision_bits();
    let beta = &meta.beta_enclosure;
    let tail = &meta.tail;
    let xh = CReal::exact(x.hi().clone(), p);
    // d(N+i) x^{N+i} <= x^N (x/L) d(N+i) L^i, summed against the remainder.
    let digits_hi = &(&(&xh.powi(n_max as u64 + 1) * beta) * &tail.remainder);
    let digits = CReal::from_bounds(Dyadic::zero(), digits_hi.hi().clone(), p);
    let first_outer = first_outer_root(n_max);
    let mut outer = CReal::zero(p);
    for (j, b) in tail.outer_b.iter().enumerate() {
        let m = first_outer + j as u64;
        outer = &outer + &(&CReal::from_biguint(b, p) * &x.powi(m * m));
    }
    // Squares past the horizon: c β^{m²-m} - 1 <= b(m²) <= c β^{m²-m}. Take them one by
    // one while they matter, then bound the rest by c (βx)^{m²} β^{-m}.
    let bx_hi = (beta * &xh).hi().clone().min(Dyadic::one());
    let bx = CReal::exact(bx_hi, p);
    let xl = CReal::exact(x.lo().clone(), p);
    let negligible = Dyadic::pow2(-(p as i64) - 16);
    let one = CReal::one(p);
    let mut m = tail.horizon + 1;
    let mut explicit = CReal::zero(p);
    while m <= tail.horizon + MAX_HORIZON && bx.hi() < &Dyadic::one() {
        let hi = &(&meta.c * &bx.powi(m * m)) * &meta.radius.powi(m);
        if hi.hi() < &negligible {
            break;
        }
        let v = &meta.c * &beta.powi(m * m - m);
        let lo = (&(&v - &one) * &xl.powi(m * m)).lo().clone().max(Dyadic::zero());
        explicit = &explicit + &CReal::from_bounds(lo, hi.hi().clone(), p);
        m += 1;
    }
    let scale = &(&meta.c * &bx.powi(m * m))
        * &geometric_tail(&meta.radius, m, TailWeight::One).expect("1/β < 1");
    let beyond = &explicit + &CReal::from_bounds(Dyadic::zero(), scale.hi().clone(), p);
    &(&digits + &outer) + &beyond
}

fn first_outer_root(n_max: usize) -> u64 {
    (n_max as u64).sqrt() + 1
}

fn is_square(n: usize) -> Option<u64> {
    let r = (n as u64).sqrt();
    (r * r == n as u64).then_some(r)
}

/// Build the spectrum of β truncated at `max_n`, escalating precision per `policy`.
pub fn build_spectrum(beta: &BetaValue, max_n: usize, policy: &PrecisionPolicy) -> Result<LoopSpectrum> {
    if max_n < 4 {
        return Err(Error::InvalidArgument(format!("max_n must be at least 4 (got {max_n})")));
    }
    let mut last = None;
    for bits in policy.steps() {
        match build_at(beta, max_n, bits) {
            Ok(s) => return Ok(s),
            Err(e) if is_precision_failure(&e) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("policy has at least one step"))
}

fn build_at(beta: &BetaValue, max_n: usize, wp: u32) -> Result<LoopSpectrum> {
    let b = eval_beta(beta, wp)?;
    let one = CReal::one(wp);
    let c = (&b - &one).sqr();
    let radius = &one / &b;
    let exact_squares = beta.as_integer().is_some();
    let unit = CReal::from_bounds(Dyadic::zero(), Dyadic::one(), wp);

    // Square floors b(m²) and their fractional parts, which make up δ:
    // δ = Σ_{m>=2} frac(c β^{m²-m}) β^{-m²}.
    let inner_root = (max_n as u64).sqrt();
    let mut square_b: Vec<BigUint> = Vec::new();
    let mut delta = CReal::zero(wp);
    let mut m: u64 = 2;
    loop {
        let inner = m <= inner_root;
        if !inner && m > MAX_HORIZON {
            break;
        }
        let v = &c * &b.powi(m * m - m);
        if !inner {
            let mag = v.hi().magnitude().unwrap_or(0);
            if mag > wp as i64 - HORIZON_SLACK_BITS {
                break;
            }
        }
        let bm = match certified_floor(&v) {
            Ok(bm) => bm,
            Err(e) if inner => return Err(e),
            Err(_) => break,
        };
        let frac = (&v - &CReal::from_bigint(&bm, wp))
            .intersect(&unit)
            .ok_or_else(|| Error::Invariant("fractional part outside [0, 1]".into()))?;
        delta = &delta + &(&frac * &radius.powi(m * m));
        square_b.push(bm.to_biguint().expect("nonnegative floor"));
        m += 1;
    }
    let horizon = m - 1;
    if !exact_squares {
        let rest = geometric_tail(&radius, (horizon + 1) * (horizon + 1), TailWeight::One)?;
        delta = CReal::from_bounds(delta.lo().clone(), (&delta + &rest).hi().clone(), wp);
    }
    if !delta.certainly_lt(&one) {
        return Err(Error::PrecisionExhausted(format!("δ = {delta:?} not separated from 1")));
    }

    let k = certified_floor(&(&b.sqr() * &delta))?;
    let kr = CReal::from_bigint(&k, wp);
    let x = &delta - &(&kr * &radius.sqr());
    let x = CReal::from_bounds(x.lo().clone().max(Dyadic::zero()), x.hi().clone().max(Dyadic::zero()), wp);
    if !x.certainly_lt(&radius) {
        return Err(Error::PrecisionExhausted(format!(
            "δ - k/β² = {x:?} not certified below 1/β"
        )));
    }
    let expansion = greedy_digits(&x, &b, max_n)?;
    if !expansion.digits[0].is_zero() {
        return Err(Error::Invariant(format!(
            "greedy digit d(1) = {} but must vanish",
            expansion.digits[0]
        )));
    }
    let k = k.to_biguint().expect("nonnegative floor");

    let mut trace = DigitTrace {
        b: vec![BigUint::zero(); max_n],
        d: expansion.digits.clone(),
        d_prime: expansion.digits.clone(),
    };
    trace.b[0] = BigUint::one();
    trace.d_prime[0] = BigUint::zero();
    trace.d_prime[1] += &k;
    for (j, bm) in square_b.iter().enumerate() {
        let n = ((j as u64 + 2) * (j as u64 + 2)) as usize;
        if n <= max_n {
            trace.b[n - 1] = bm.clone();
        }
    }
    let mut a = vec![BigUint::one()];
    for n in 2..=max_n {
        a.push(&trace.b[n - 1] + &trace.d_prime[n - 1]);
    }
    let outer_b = square_b[(inner_root as usize).saturating_sub(1)..].to_vec();

    let meta = SpectrumMeta {
        beta: beta.clone(),
        precision_bits: wp,
        m_bound: &b + &CReal::from_biguint(&k, wp),
        beta_enclosure: b,
        c,
        delta,
        k,
        radius,
        tail: TailModel {
            horizon,
            outer_b,
            remainder: expansion.remainder,
            exact_squares,
        },
    };
    Ok(LoopSpectrum {
        a,
        model: GrowthModel::Constructed {
            meta: Box::new(meta),
            trace,
        },
        deleted_loop: None,
        added_loops: Vec::new(),
    })
}

/// Remove one loop of length `n0` (default: the shortest length `>= 2` that has a loop).
pub fn delete_loop(s: &LoopSpectrum, n0: Option<usize>) -> Result<LoopSpectrum> {
    if let Some(prev) = s.deleted_loop {
        return Err(Error::NoDeletableLoop(format!(
            "a loop of length {prev} was already deleted"
        )));
    }
    let n0 = match n0 {
        Some(n0) => {
            if n0 < 2 {
                return Err(Error::NoDeletableLoop(format!("n0 = {n0} must be at least 2")));
            }
            if n0 > s.max_n() || s.a(n0).is_zero() {
                return Err(Error::NoDeletableLoop(format!("a({n0}) = 0")));
            }
            n0
        }
        None => (2..=s.max_n())
            .find(|&n| !s.a(n).is_zero())
            .ok_or_else(|| Error::NoDeletableLoop("no length n >= 2 carries a loop".into()))?,
    };
    let mut out = s.clone();
    out.a[n0 - 1] -= 1u32;
    out.deleted_loop = Some(n0);
    Ok(out)
}

/// Weight for [`spectrum_tail_bounds`]: `Σ a(n) L^n` or `Σ n a(n) L^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumWeight {
    One,
    N,
}

/// Upper bound on `Σ_{n>=from_n} w(n) a(n) L^n` from the comparison series
/// `M Σ w(n) β^-n + c Σ_m w(m²) β^-m` (non-squares `<= M`, squares `<= c β^{m²-m} + M`).
pub fn spectrum_tail_bounds(s: &LoopSpectrum, from_n: usize, weight: SumWeight) -> Result<CReal> {
    let meta = s.meta().ok_or(Error::TailUnavailable)?;
    let l = &meta.radius;
    let from = from_n.max(1) as u64;
    let m0 = {
        let r = from.sqrt();
        if r * r == from {
            r
        } else {
            r + 1
        }
    };
    let (w_all, w_sq) = match weight {
        SumWeight::One => (TailWeight::One, TailWeight::One),
        SumWeight::N => (TailWeight::N, TailWeight::NSquared),
    };
    let mut bound = &(&meta.m_bound * &geometric_tail(l, from, w_all)?)
        + &(&meta.c * &geometric_tail(l, m0, w_sq)?);
    for &n in s.added_loops() {
        if n as u64 >= from {
            let w = match weight {
                SumWeight::One => 1,
                SumWeight::N => n as i64,
            };
            bound = &bound + &(&CReal::from_int(w, l.precision_bits()) * &l.powi(n as u64));
        }
    }
    Ok(bound)
}

/// Outcome of checking the defining properties of a constructed spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub a1_is_one: bool,
    /// Enclosure of `Σ a(n) β^-n` (partial sum plus certified tail).
    pub radius_sum: CReal,
    pub radius_sum_matches: bool,
    /// `(m, c β^{m²-m} <= a(m²))` for squares within the truncation.
    pub square_lower: Vec<(u64, bool)>,
    /// `(m, ⌊c β^{m²-m}⌋ <= a(m²))`
    pub square_floor_lower: Vec<(u64, bool)>,
    /// `(m, a(m²) <= c β^{m²-m} + M)`
    pub square_upper: Vec<(u64, bool)>,
    /// Every non-square `a(n) <= M`.
    pub nonsquare_bounded: bool,
}

impl LemmaReport {
    /// All properties, with the square lower bound in its literal form.
    pub fn all_hold(&self) -> bool {
        self.holds_with_floor_bound() && self.square_lower.iter().all(|&(_, ok)| ok)
    }

    /// All properties, with the square lower bound taken on `⌊c β^{m²-m}⌋`.
    pub fn holds_with_floor_bound(&self) -> bool {
        self.a1_is_one
            && self.radius_sum_matches
            && self.square_floor_lower.iter().all(|&(_, ok)| ok)
            && self.square_upper.iter().all(|&(_, ok)| ok)
            && self.nonsquare_bounded
    }
}

/// Check `a(1) = 1`, `Σ a(n) β^-n = 1` (adjusted for deleted/added loops), and the
/// square and non-square size bounds, all as interval comparisons.
pub fn check_lemma_properties(s: &LoopSpectrum) -> Result<LemmaReport> {
    let meta = s.meta().ok_or(Error::NoGrowthModel)?;
    let p = meta.precision_bits;
    let l = &meta.radius;
    let radius_sum = &s.partial_sum(l) + &s.series_tail(l)?;
    let expected = s.expected_radius_sum().expect("constructed");
    let radius_sum_matches = radius_sum.overlaps(&expected);
    let mut square_lower = Vec::new();
    let mut square_floor_lower = Vec::new();
    let mut square_upper = Vec::new();
    let mut nonsquare_bounded = true;
    // Size bounds concern the construction itself, before loops were deleted or added.
    let mut base = s.counts().to_vec();
    if let Some(n0) = s.deleted_loop {
        base[n0 - 1] += 1u32;
    }
    for &n in &s.added_loops {
        base[n - 1] -= 1u32;
    }
    for n in 1..=s.max_n() {
        let a = CReal::from_biguint(&base[n - 1], p);
        match is_square(n) {
            Some(m) if m >= 2 => {
                let v = &meta.c * &meta.beta_enclosure.powi(m * m - m);
                square_lower.push((m, v.certainly_le(&a)));
                let fl = v.lo().floor() == v.hi().floor()
                    && BigInt::from(base[n - 1].clone()) >= v.lo().floor();
                square_floor_lower.push((m, fl));
                square_upper.push((m, a.certainly_le(&(&v + &meta.m_bound))));
            }
            _ => {
                if n >= 2 && !a.certainly_le(&meta.m_bound) {
                    nonsquare_bounded = false;
                }
            }
        }
    }
    Ok(LemmaReport {
        a1_is_one: s.a(1).is_one(),
        radius_sum,
        radius_sum_matches,
        square_lower,
        square_floor_lower,
        square_upper,
        nonsquare_bounded,
    })
}

impl DigitTrace {
    /// Recompute `a(n)` from `b`, `d'`; a consistency check on stored traces.
    pub fn recombine(&self) -> Vec<BigUint> {
        self.b
            .iter()
            .zip(&self.d_prime)
            .map(|(b, d)| b + d)
            .collect()
    }
}

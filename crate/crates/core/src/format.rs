//! On-disk JSON form of a spectrum. Big integers and interval endpoints are exact decimal
//! strings, so a file read back reproduces the spectrum bit for bit.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{BetaDescriptor, BetaValue, CReal, Dyadic};
use crate::spectrum::{DigitTrace, GrowthModel, LoopSpectrum, SpectrumMeta, TailModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalText {
    pub lo: String,
    pub hi: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Constructed,
    Finite,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailText {
    pub horizon: u64,
    pub exact_squares: bool,
    pub outer_b: Vec<String>,
    pub remainder: IntervalText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaText {
    pub precision_bits: u32,
    pub beta_enclosure: IntervalText,
    pub c: IntervalText,
    pub delta: IntervalText,
    pub k: String,
    #[serde(rename = "M")]
    pub m_bound: IntervalText,
    #[serde(rename = "L")]
    pub radius: IntervalText,
    pub tail: TailText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceText {
    pub b: Vec<String>,
    pub d: Vec<String>,
    pub d_prime: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub format_version: u32,
    pub beta: Option<BetaDescriptor>,
    pub entropy_target: Option<String>,
    pub period_lift: usize,
    pub n_max: usize,
    pub growth_model: ModelKind,
    pub a: Vec<String>,
    pub deleted_loop: Option<usize>,
    pub added_loops: Vec<usize>,
    pub meta: Option<MetaText>,
    pub digit_trace: Option<TraceText>,
}

fn ints(v: &[BigUint]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn parse_ints(v: &[String], what: &str) -> Result<Vec<BigUint>> {
    v.iter()
        .map(|s| {
            s.parse::<BigUint>()
                .map_err(|_| Error::Format(format!("{what}: {s:?} is not a nonnegative integer")))
        })
        .collect()
}

fn interval(x: &CReal) -> IntervalText {
    IntervalText {
        lo: x.lo().to_exact_decimal(),
        hi: x.hi().to_exact_decimal(),
    }
}

fn parse_interval(t: &IntervalText, bits: u32, what: &str) -> Result<CReal> {
    let lo = Dyadic::parse_exact_decimal(&t.lo)?;
    let hi = Dyadic::parse_exact_decimal(&t.hi)?;
    if lo > hi {
        return Err(Error::Format(format!("{what}: lower end above upper end")));
    }
    Ok(CReal::from_bounds(lo, hi, bits))
}

impl SpectrumFile {
    pub fn from_spectrum(s: &LoopSpectrum, entropy_target: Option<String>, period_lift: usize) -> SpectrumFile {
        let (growth_model, beta, meta, digit_trace) = match s.model() {
            GrowthModel::Constructed { meta, trace } => (
                ModelKind::Constructed,
                Some(meta.beta.descriptor().clone()),
                Some(meta_text(meta)),
                Some(TraceText {
                    b: ints(&trace.b),
                    d: ints(&trace.d),
                    d_prime: ints(&trace.d_prime),
                }),
            ),
            GrowthModel::Finite => (ModelKind::Finite, None, None, None),
            GrowthModel::Unknown => (ModelKind::Unknown, None, None, None),
        };
        SpectrumFile {
            format_version: FORMAT_VERSION,
            beta,
            entropy_target,
            period_lift,
            n_max: s.max_n(),
            growth_model,
            a: ints(s.counts()),
            deleted_loop: s.deleted_loop(),
            added_loops: s.added_loops().to_vec(),
            meta,
            digit_trace,
        }
    }

    pub fn to_spectrum(&self) -> Result<LoopSpectrum> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.period_lift == 0 {
            return Err(Error::Format("period_lift must be at least 1".into()));
        }
        let a = parse_ints(&self.a, "a")?;
        if a.len() != self.n_max {
            return Err(Error::Format(format!("n_max = {} but {} counts given", self.n_max, a.len())));
        }
        let model = match self.growth_model {
            ModelKind::Finite => GrowthModel::Finite,
            ModelKind::Unknown => GrowthModel::Unknown,
            ModelKind::Constructed => {
                let desc = self
                    .beta
                    .clone()
                    .ok_or_else(|| Error::Format("constructed spectrum without beta".into()))?;
                let m = self
                    .meta
                    .as_ref()
                    .ok_or_else(|| Error::Format("constructed spectrum without meta".into()))?;
                let t = self
                    .digit_trace
                    .as_ref()
                    .ok_or_else(|| Error::Format("constructed spectrum without digit_trace".into()))?;
                let trace = DigitTrace {
                    b: parse_ints(&t.b, "digit_trace.b")?,
                    d: parse_ints(&t.d, "digit_trace.d")?,
                    d_prime: parse_ints(&t.d_prime, "digit_trace.d_prime")?,
                };
                GrowthModel::Constructed {
                    meta: Box::new(parse_meta(m, BetaValue::from_descriptor(desc)?)?),
                    trace,
                }
            }
        };
        LoopSpectrum::from_parts(a, model, self.deleted_loop, self.added_loops.clone())
    }

    /// Pretty JSON with a trailing newline; field order is fixed.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<SpectrumFile> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

fn meta_text(m: &SpectrumMeta) -> MetaText {
    MetaText {
        precision_bits: m.precision_bits,
        beta_enclosure: interval(&m.beta_enclosure),
        c: interval(&m.c),
        delta: interval(&m.delta),
        k: m.k.to_string(),
        m_bound: interval(&m.m_bound),
        radius: interval(&m.radius),
        tail: TailText {
            horizon: m.tail.horizon,
            exact_squares: m.tail.exact_squares,
            outer_b: ints(&m.tail.outer_b),
            remainder: interval(&m.tail.remainder),
        },
    }
}

fn parse_meta(m: &MetaText, beta: BetaValue) -> Result<SpectrumMeta> {
    let p = m.precision_bits;
    Ok(SpectrumMeta {
        beta,
        precision_bits: p,
        beta_enclosure: parse_interval(&m.beta_enclosure, p, "beta_enclosure")?,
        c: parse_interval(&m.c, p, "c")?,
        delta: parse_interval(&m.delta, p, "delta")?,
        k: m.k.parse().map_err(|_| Error::Format(format!("k: {:?}", m.k)))?,
        m_bound: parse_interval(&m.m_bound, p, "M")?,
        radius: parse_interval(&m.radius, p, "L")?,
        tail: TailModel {
            horizon: m.tail.horizon,
            outer_b: parse_ints(&m.tail.outer_b, "tail.outer_b")?,
            remainder: parse_interval(&m.tail.remainder, p, "tail.remainder")?,
            exact_squares: m.tail.exact_squares,
        },
    })
}

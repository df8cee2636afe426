//! Browser front end: each exported function takes plain arguments and returns a JSON
//! string, with `{"error": ...}` on failure.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use markovforge::classifier::classify;
use markovforge::graph::{export_dot, largest_realizable, lift_period, realize};
use markovforge::numerics::{BetaValue, CReal, PrecisionPolicy};
use markovforge::oracle::PathCountTable;
use markovforge::spectrum::{build_spectrum, delete_loop, LoopSpectrum};

const MAX_N: usize = 128;
const MAX_DEPTH: usize = 256;
const MAX_DRAWN_VERTICES: usize = 600;
const BITS: u32 = 256;

fn spectrum(beta: &str, max_n: usize, transient: bool) -> Result<LoopSpectrum, String> {
    if max_n == 0 || max_n > MAX_N {
        return Err(format!("max_n must be between 1 and {MAX_N}"));
    }
    let beta: BetaValue = beta.parse().map_err(|e: markovforge::Error| e.to_string())?;
    let s = build_spectrum(&beta, max_n, &PrecisionPolicy::default()).map_err(|e| e.to_string())?;
    if transient {
        delete_loop(&s, None).map_err(|e| e.to_string())
    } else {
        Ok(s)
    }
}

fn render(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Loop counts and the classification report.
pub fn report(beta: &str, max_n: usize, transient: bool) -> String {
    render((|| {
        let s = spectrum(beta, max_n, transient)?;
        let r = classify(&s, BITS).map_err(|e| e.to_string())?;
        let counts: Vec<String> = (1..=s.max_n()).map(|n| s.a(n).to_string()).collect();
        Ok(json!({
            "a": counts,
            "deleted_loop": s.deleted_loop(),
            "report": r.to_json(),
        }))
    })())
}

/// (1/n) ln p(n) and p(n) R^n for n = 1..depth, as floats for plotting.
pub fn growth_curve(beta: &str, depth: usize, transient: bool) -> String {
    render((|| {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(format!("depth must be between 1 and {MAX_DEPTH}"));
        }
        let s = spectrum(beta, depth.min(MAX_N), transient)?;
        let r = classify(&s, BITS).map_err(|e| e.to_string())?;
        let radius = r.radius_r.clone().ok_or("no certified radius")?;
        let h = r.entropy.as_ref().map(|h| h.to_f64());
        let t = PathCountTable::from_spectrum(&s, 1, depth).map_err(|e| e.to_string())?;
        let mut rate = Vec::with_capacity(depth);
        let mut scaled = Vec::with_capacity(depth);
        for n in 1..=depth {
            if t.p[n].bits() == 0 {
                rate.push(Value::Null);
                scaled.push(0.0);
                continue;
            }
            let p = CReal::from_biguint(&t.p[n], BITS);
            rate.push(json!(p.ln().div_int(n as u64).to_f64()));
            scaled.push((&p * &radius.powi(n as u64)).to_f64());
        }
        Ok(json!({
            "entropy": h,
            "verdict": r.verdict.as_str(),
            "rate": rate,
            "scaled": scaled,
        }))
    })())
}

/// DOT text of the largest truncation that stays small enough to draw.
pub fn graph_dot(beta: &str, period: usize) -> String {
    render((|| {
        if period == 0 || period > 8 {
            return Err("period must be between 1 and 8".into());
        }
        let s = spectrum(beta, 16, false)?;
        let n = largest_realizable(&s, period, MAX_DRAWN_VERTICES);
        if n == 0 {
            return Err("no truncation fits the drawing limit".into());
        }
        let g = realize(&s, n).and_then(|g| lift_period(&g, period)).map_err(|e| e.to_string())?;
        Ok(json!({
            "truncation": n,
            "vertices": g.vertex_count(),
            "arrows": g.arrow_count(),
            "dot": export_dot(&g),
        }))
    })())
}

#[wasm_bindgen(js_name = report)]
pub fn report_js(beta: &str, max_n: usize, transient: bool) -> String {
    report(beta, max_n, transient)
}

#[wasm_bindgen(js_name = growthCurve)]
pub fn growth_curve_js(beta: &str, depth: usize, transient: bool) -> String {
    growth_curve(beta, depth, transient)
}

#[wasm_bindgen(js_name = graphDot)]
pub fn graph_dot_js(beta: &str, period: usize) -> String {
    graph_dot(beta, period)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn report_beta_two() {
        let v = parse(report("2", 16, false));
        assert_eq!(v["a"][3], "4");
        assert_eq!(v["report"]["verdict"], "PositiveRecurrent");
        let t = parse(report("2", 16, true));
        assert_eq!(t["deleted_loop"], 4);
        assert_eq!(t["report"]["verdict"], "Transient");
    }

    #[test]
    fn curve_approaches_ln_two() {
        let v = parse(growth_curve("2", 64, false));
        let rate = v["rate"].as_array().unwrap();
        assert_eq!(rate.len(), 64);
        assert!((rate[63].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 0.05);
    }

    #[test]
    fn dot_fits_the_limit() {
        let v = parse(graph_dot("2", 3));
        assert!(v["vertices"].as_u64().unwrap() <= MAX_DRAWN_VERTICES as u64);
        assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
    }

    #[test]
    fn errors_come_back_as_json() {
        assert!(parse(report("1", 16, false))["error"].is_string());
        assert!(parse(growth_curve("2", 0, false))["error"].is_string());
        assert!(parse(graph_dot("2", 0))["error"].is_string());
    }
}

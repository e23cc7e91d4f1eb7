//! Browser bindings: each export returns a JSON document for the page to draw.
//!
//! The `*_json` functions hold the logic and run natively as well; the
//! `#[wasm_bindgen]` wrappers only turn their errors into JS exceptions.

// Negated comparisons reject NaN inputs along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde_json::{json, Value};
use specwell::branchpoints::{
    delta_branch_candidates, even_branch_candidates, odd_branch_candidates,
};
use specwell::continuation::{default_chart, monodromy, LoopOptions};
use specwell::quantization::real_spectrum;
use specwell::scattering::pole_sweep;
use specwell::{Complex64, Family, Parity};
use wasm_bindgen::prelude::*;

const MAX_LAMBDA: f64 = 200.0;

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn family_of(name: &str) -> Result<Family, String> {
    match name {
        "even" => Ok(Family::EvenWell),
        "odd" => Ok(Family::OddWell),
        "delta" => Ok(Family::DeltaBarrier),
        other => Err(format!("unknown family '{other}'")),
    }
}

/// Real levels at `lambda` with the phases where `|cos|`/`|sin|` meets `φ/λ`.
pub fn spectrum_json(lambda: f64) -> Result<String, String> {
    if !(lambda > 0.0 && lambda <= MAX_LAMBDA) {
        return Err(format!("lambda must lie in (0, {MAX_LAMBDA}]"));
    }
    let t = real_spectrum(lambda).map_err(|e| e.to_string())?;
    let levels: Vec<Value> = t
        .levels
        .iter()
        .map(|l| json!({ "index": l.index, "parity": l.parity.name(), "phi": l.phi, "energy": l.energy }))
        .collect();
    Ok(json!({ "lambda": lambda, "levels": levels }).to_string())
}

/// Loops real level `level` once (or `turns` times) around `target` and
/// reports the path, the energy trajectory and where the level ended up.
pub fn loop_json(
    family: &str,
    level: usize,
    target_re: f64,
    target_im: f64,
    turns: usize,
) -> Result<String, String> {
    let family = family_of(family)?;
    if !(1..=4).contains(&turns) {
        return Err("turns must lie in 1..=4".into());
    }
    if level == 0 || level > 40 {
        return Err("level must lie in 1..=40".into());
    }
    let target = Complex64::new(target_re, target_im);
    if !(target.norm() < 60.0) {
        return Err("target must lie within |p| < 60".into());
    }
    let known = match family {
        Family::EvenWell => even_branch_candidates(24),
        Family::OddWell => odd_branch_candidates(24),
        Family::DeltaBarrier => delta_branch_candidates(24),
    }
    .map_err(|e| e.to_string())?;
    let mut options = LoopOptions::new(family, &known);
    options.turns = turns;
    let chart = default_chart(family);
    let r = monodromy(chart, level, target, &options).map_err(|e| e.to_string())?;
    let doc = json!({
        "family": family.name(),
        "start": r.start.to_string(),
        "end": r.end.map(|l| l.to_string()),
        "outcome": r.outcome.name(),
        "path": r.track.samples.iter().map(|s| pair(s.param)).collect::<Vec<_>>(),
        "energy": r.track.samples.iter().map(|s| pair(s.energy)).collect::<Vec<_>>(),
        "branch_points": known.iter().map(|b| pair(b.location)).collect::<Vec<_>>(),
    });
    Ok(doc.to_string())
}

/// Scattering-pole trajectories in the complex `k` plane over `[lo, hi]`.
pub fn poles_json(parity: &str, lo: f64, hi: f64, strip: usize) -> Result<String, String> {
    let parity = match parity {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        other => return Err(format!("unknown parity '{other}'")),
    };
    if !(hi - lo <= 20.0 && hi <= MAX_LAMBDA) {
        return Err("keep the sweep within 20 units and below 200".into());
    }
    if strip > 12 || (parity == Parity::Odd && strip == 0) {
        return Err("strip out of range".into());
    }
    let tracks = pole_sweep(parity, lo, hi, 200, &[strip]).map_err(|e| e.to_string())?;
    let doc: Vec<Value> = tracks
        .iter()
        .map(|t| {
            json!({
                "level": t.level_index,
                "lambda": t.samples.iter().map(|s| s.lambda).collect::<Vec<_>>(),
                "k": t.samples.iter().map(|s| pair(s.k)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Value::Array(doc).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectrum(lambda: f64) -> Result<String, JsError> {
    js(spectrum_json(lambda))
}

#[wasm_bindgen(js_name = loopLevel)]
pub fn loop_level(
    family: &str,
    level: usize,
    target_re: f64,
    target_im: f64,
    turns: usize,
) -> Result<String, JsError> {
    js(loop_json(family, level, target_re, target_im, turns))
}

#[wasm_bindgen]
pub fn poles(parity: &str, lo: f64, hi: f64, strip: usize) -> Result<String, JsError> {
    js(poles_json(parity, lo, hi, strip))
}

//! Browser bindings for three operations on the `(z, r̄)` facet
//! coordinates: a phase map of verdicts, single-point classification and
//! Schmidt-number bounds. The `*_json` and [`phase_codes`] functions are plain
//! Rust so they can be tested natively; the `#[wasm_bindgen]` wrappers only
//! convert errors.

use axisym::criteria::{classify_facet, Verdict};
use axisym::family::facet_from_fidelity_coords;
use axisym::schmidt::{default_subdivisions, SchmidtBoundsEngine};
use wasm_bindgen::prelude::*;

/// Verdict byte used by [`phase_map`].
pub fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Separable => 0,
        Verdict::BoundEntangled => 1,
        Verdict::NptEntangled => 2,
        Verdict::EntangledUnknownPpt => 3,
        Verdict::Unknown => 4,
    }
}

/// Verdict codes on an `n × n` grid, row-major with `z` outer: entry
/// `i·n + j` is the point `z = i/(n−1)`, `r̄ = −1 + 2j/(n−1)`.
pub fn phase_codes(d: usize, n: usize) -> axisym::Result<Vec<u8>> {
    if n < 2 {
        return Err(axisym::Error::Domain(format!("grid needs at least 2 points per axis, got {n}")));
    }
    let m = (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let rbar = (-1.0 + 2.0 * j as f64 / m).clamp(-1.0, 1.0);
            let s = facet_from_fidelity_coords(d, i as f64 / m, rbar)?;
            out.push(verdict_code(classify_facet(&s)?.verdict));
        }
    }
    Ok(out)
}

pub fn classify_json(d: usize, z: f64, rbar: f64) -> axisym::Result<String> {
    let report = classify_facet(&facet_from_fidelity_coords(d, z, rbar)?)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

pub fn schmidt_json(d: usize, z: f64, rbar: f64) -> axisym::Result<String> {
    let s = facet_from_fidelity_coords(d, z, rbar)?;
    let bounds = SchmidtBoundsEngine::new(d, default_subdivisions(d))?.bounds(&s)?;
    Ok(serde_json::to_string(&bounds).expect("bounds serialize"))
}

fn js_err(e: axisym::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Verdict bytes for an `n × n` grid of the `d = 3` facet or the `d = 4`
/// cross-section (0 separable, 1 bound entangled, 2 NPT, 3 entangled with
/// unresolved PPT, 4 unknown).
#[wasm_bindgen]
pub fn phase_map(d: usize, n: usize) -> Result<Vec<u8>, JsError> {
    phase_codes(d, n).map_err(js_err)
}

/// Classification report for one point, as JSON.
#[wasm_bindgen]
pub fn classify_point(d: usize, z: f64, rbar: f64) -> Result<String, JsError> {
    classify_json(d, z, rbar).map_err(js_err)
}

/// Schmidt-number lower and upper bounds for one point, as JSON.
#[wasm_bindgen]
pub fn schmidt_window(d: usize, z: f64, rbar: f64) -> Result<String, JsError> {
    schmidt_json(d, z, rbar).map_err(js_err)
}

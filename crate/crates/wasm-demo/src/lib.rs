//! Browser bindings: an entropy curve, the information coefficients and the
//! chopped correlation spectrum, each returned as a JSON string.

use hamming_entanglement::asymptotics::{band_prefactor, g2_coefficient, g3_coefficient};
use hamming_entanglement::measures::{entropy, norm};
use hamming_entanglement::specfun::binary_entropy;
use hamming_entanglement::subsystem::chopped_spectrum;
use hamming_entanglement::{FermiSet, GraphParams, SubsystemSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `d` the curve accepts; keeps the page responsive.
pub const MAX_CURVE_D: u32 = 4000;
pub const MAX_R: u32 = 200;

#[derive(Serialize)]
struct CurvePoint {
    d: u32,
    exact: f64,
    asymptotic: f64,
}

#[derive(Serialize)]
struct CoefficientPoint {
    r: u32,
    g2: f64,
    g3: Option<f64>,
}

#[derive(Serialize)]
struct Level {
    lambda: f64,
    multiplicity: String,
    q_label: u32,
    sector: u8,
}

#[derive(Serialize)]
struct Spectrum {
    levels: Vec<Level>,
    entropy: f64,
    entropy_log10: Option<f64>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// `S / (q^(d-1) d^(-1/2))` of `n` blocks at distance one, half filled,
/// for `d = q, 2q, ...` up to `d_max`, beside its large-`d` limit.
pub fn entropy_curve_json(q: u32, n: u32, d_max: u32) -> Result<String, String> {
    if d_max > MAX_CURVE_D {
        return Err(format!("d_max={d_max} exceeds {MAX_CURVE_D}"));
    }
    if q < 2 {
        return Err(format!("q={q} must be at least 2"));
    }
    let fraction = n.min(q) as f64 / q as f64;
    let asymptotic = band_prefactor(q) * binary_entropy(1.0 - fraction).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for d in (q..=d_max).step_by(q as usize) {
        let g = GraphParams::new(d, q).map_err(|e| e.to_string())?;
        let s = SubsystemSpec::new(n, 1, &g).map_err(|e| e.to_string())?;
        let f = FermiSet::contiguous(Some(d / q), &g).map_err(|e| e.to_string())?;
        let e = entropy(&s, &f, &g).and_then(|e| e.with_normalizations(&s, &g)).map_err(|e| e.to_string())?;
        points.push(CurvePoint { d, exact: e.normalizations[norm::PER_Q_D_MINUS_1], asymptotic });
    }
    if points.is_empty() {
        return Err(format!("no multiple of q={q} up to d_max={d_max}"));
    }
    to_json(&points)
}

/// `g2(q, r)` and `g3(q, r)` for `r = 1..=r_max`; `g3` is absent for `q = 2`.
pub fn coefficients_json(q: u32, r_max: u32) -> Result<String, String> {
    if r_max == 0 || r_max > MAX_R {
        return Err(format!("r_max must lie in 1..={MAX_R}"));
    }
    let mut out = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        let g2 = g2_coefficient(q, r).map_err(|e| e.to_string())?;
        let g3 = if q >= 3 { Some(g3_coefficient(q, r).map_err(|e| e.to_string())?) } else { None };
        out.push(CoefficientPoint { r, g2, g3 });
    }
    to_json(&out)
}

/// Distinct eigenvalues of the chopped correlation matrix with `k0` filled.
pub fn spectrum_json(d: u32, q: u32, n: u32, r: u32, k0: u32) -> Result<String, String> {
    let g = GraphParams::new(d, q).map_err(|e| e.to_string())?;
    let s = SubsystemSpec::new(n, r, &g).map_err(|e| e.to_string())?;
    let f = FermiSet::contiguous(Some(k0), &g).map_err(|e| e.to_string())?;
    let entries = chopped_spectrum(&s, &f, &g).map_err(|e| e.to_string())?;
    let total = entropy(&s, &f, &g).map_err(|e| e.to_string())?;
    let levels = entries
        .into_iter()
        .map(|e| Level { lambda: e.lambda, multiplicity: e.multiplicity.to_string(), q_label: e.q_label, sector: e.sector })
        .collect();
    let entropy_log10 = (!total.value_log.is_zero()).then(|| total.value_log.log10_mag());
    to_json(&Spectrum { levels, entropy: total.value_log.to_f64(), entropy_log10 })
}

#[wasm_bindgen]
pub fn entropy_curve(q: u32, n: u32, d_max: u32) -> Result<String, JsError> {
    entropy_curve_json(q, n, d_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn coefficients(q: u32, r_max: u32) -> Result<String, JsError> {
    coefficients_json(q, r_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectrum(d: u32, q: u32, n: u32, r: u32, k0: u32) -> Result<String, JsError> {
    spectrum_json(d, q, n, r, k0).map_err(|e| JsError::new(&e))
}

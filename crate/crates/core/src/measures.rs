//! Entanglement entropy, mutual information and tripartite information.
//!
//! Every measure is available through two independent routes: the spectral
//! sum over the chopped-correlation eigenvalues, and (for contiguous Fermi
//! sets) the boundary-coefficient sum that keeps only the `r` fractional
//! eigenvalue bands.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{FermiSet, GraphParams};
use crate::specfun::{binary_entropy_pair, ln_biguint, ln_binomial_or_neg_inf, LogValue, Sign, ENTROPY_ARG_TOL};
use crate::subsystem::{chopped_spectrum, subsystem_geometry, BoundaryCoefficients, SpectrumEntry, SubsystemSpec};

/// Normalization keys reported in [`EntropyResult::normalizations`].
pub mod norm {
    pub const PER_Q_D_MINUS_1: &str = "S/(q^(d-1) d^(-1/2))";
    pub const PER_Q_D_MINUS_R: &str = "S/(q^(d-r) d^(-1/2))";
    pub const PER_VOLUME_SQRT_R_OVER_D: &str = "S/(V_A (r/d)^(1/2))";
    pub const PER_VOLUME: &str = "S/V_A";
}

/// A (possibly signed) entropy-like quantity in nats.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyResult {
    pub value_log: LogValue,
    /// Plain value, absent when it over- or underflows `f64`.
    pub value: Option<f64>,
    pub normalizations: BTreeMap<String, f64>,
}

impl EntropyResult {
    pub fn new(value_log: LogValue) -> EntropyResult {
        EntropyResult { value_log, value: value_log.to_finite_f64(), normalizations: BTreeMap::new() }
    }

    pub fn zero() -> EntropyResult {
        EntropyResult::new(LogValue::ZERO)
    }

    /// Adds the dimensionless ratios used by the figure sweeps.
    pub fn with_normalizations(mut self, s: &SubsystemSpec, g: &GraphParams) -> Result<EntropyResult> {
        let geo = subsystem_geometry(s, g)?;
        let d = g.d() as f64;
        let ln_q = (g.q() as f64).ln();
        let ln_d = d.ln();
        let v = self.value_log;
        let per = |ln_den: f64| (v / LogValue::from_ln(ln_den)).to_f64();
        let entries = [
            (norm::PER_Q_D_MINUS_1, per((d - 1.0) * ln_q - 0.5 * ln_d)),
            (norm::PER_Q_D_MINUS_R, per((d - s.r() as f64) * ln_q - 0.5 * ln_d)),
            (
                norm::PER_VOLUME_SQRT_R_OVER_D,
                per(geo.volume.ln_mag() + 0.5 * (s.r() as f64 / d).ln()),
            ),
            (norm::PER_VOLUME, per(geo.volume.ln_mag())),
        ];
        for (k, x) in entries {
            self.normalizations.insert(k.to_string(), x);
        }
        Ok(self)
    }

    /// Entropy rescaled from nats to bits.
    pub fn in_bits(mut self) -> EntropyResult {
        let scale = LogValue::from_f64(std::f64::consts::LOG2_E);
        self.value_log = self.value_log * scale;
        self.value = self.value_log.to_finite_f64();
        for x in self.normalizations.values_mut() {
            *x *= std::f64::consts::LOG2_E;
        }
        self
    }

    pub fn ln_value(&self) -> f64 {
        self.value_log.ln_mag()
    }
}

/// `sum multiplicity * s(lambda)` over a chopped spectrum.
pub fn entropy_from_spectrum(spectrum: &[SpectrumEntry]) -> Result<EntropyResult> {
    let mut terms = Vec::with_capacity(spectrum.len());
    for e in spectrum {
        let ok = |x: f64| (-ENTROPY_ARG_TOL..=1.0 + ENTROPY_ARG_TOL).contains(&x);
        if !ok(e.lambda) || !ok(e.complement) || (e.lambda + e.complement - 1.0).abs() > ENTROPY_ARG_TOL {
            return domain(format!("eigenvalue {} (complement {}) outside [0, 1]", e.lambda, e.complement));
        }
        let s = binary_entropy_pair(e.lambda, e.complement);
        if s > 0.0 {
            terms.push(LogValue::from_ln(ln_biguint(&e.multiplicity) + s.ln()));
        }
    }
    Ok(EntropyResult::new(LogValue::sum(terms)))
}

/// Stable evaluation of `sum_j c_j s(P + a_j A)` given `P`, `1 - P` and `A`.
///
/// Information measures are differences of entropies whose arguments differ
/// by the tiny alternating part `A`; evaluated naively, all significant digits
/// cancel once `A / P` drops below machine precision. When every shift is
/// small against both `P` and `1 - P` the combination is expanded around `P`:
/// the constant and linear pieces use the coefficient moments directly and
/// the remainder `-x psi(h/x) - (1-x) psi(-h/(1-x))`, with
/// `psi(u) = (1+u) ln(1+u) - u`, is summed as a power series whose low orders
/// cancel exactly through the integer moments `sum_j c_j a_j^m`.
pub fn entropy_combination(p: f64, pc: f64, a: f64, terms: &[(f64, f64)]) -> f64 {
    let lo = p.min(pc);
    let h = terms.iter().map(|&(_, shift)| (shift * a).abs()).fold(0.0, f64::max);
    if h == 0.0 {
        let c0: f64 = terms.iter().map(|&(c, _)| c).sum();
        return c0 * binary_entropy_pair(p, pc);
    }
    if lo <= 0.0 || h > 0.1 * lo {
        return terms
            .iter()
            .map(|&(c, shift)| c * binary_entropy_pair(p + shift * a, pc - shift * a))
            .sum();
    }
    let moment = |m: i32| -> f64 { terms.iter().map(|&(c, shift)| c * shift.powi(m)).sum() };
    let mut total = moment(0) * binary_entropy_pair(p, pc) + moment(1) * a * (pc.ln() - p.ln());
    let u = -a / p;
    let v = a / pc;
    let (mut um, mut vm) = (u, v);
    // Geometric bound on the tail: |M_m u^m| <= sum|c_j| (h/p)^m.
    let weight: f64 = terms.iter().map(|&(c, _)| c.abs()).sum();
    let (hp, hpc) = (h / p, h / pc);
    let (mut bp, mut bpc) = (hp, hpc);
    let mut series = 0.0;
    for m in 2..400 {
        um *= u;
        vm *= v;
        bp *= hp;
        bpc *= hpc;
        let mm = moment(m);
        series -= mm / (m as f64 * (m as f64 - 1.0)) * (p * um + pc * vm);
        let tail = weight * (p * bp + pc * bpc) / (m as f64 * (m as f64 - 1.0));
        if tail <= 1e-18 * series.abs() || tail < f64::MIN_POSITIVE {
            break;
        }
    }
    total += series;
    total
}

/// `ln` of the band weight `C(L, d-i-k0) (q-1)^(d-i-k0)`; `-inf` when the
/// binomial vanishes.
fn ln_band_weight(i: u32, k0: u32, s: &SubsystemSpec, g: &GraphParams) -> f64 {
    let l = s.block_diameter(g) as i64;
    let t = g.d() as i64 - i as i64 - k0 as i64;
    let ln_c = ln_binomial_or_neg_inf(l, t);
    if ln_c == f64::NEG_INFINITY {
        return ln_c;
    }
    ln_c + t as f64 * ((g.q() - 1) as f64).ln()
}

/// Bands `i` with a non-vanishing weight.
fn active_bands(k0: u32, s: &SubsystemSpec, g: &GraphParams) -> std::ops::RangeInclusive<u32> {
    let r = s.r() as i64;
    let lo = (r - k0 as i64).max(1);
    let hi = (g.d() as i64 - k0 as i64).min(r);
    if lo > hi {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    lo as u32..=hi as u32
}

/// Weighted band sum `sum_i W_i * bracket(i)`, signed.
fn band_sum<F>(k0: Option<u32>, s: &SubsystemSpec, g: &GraphParams, mut bracket: F) -> Result<EntropyResult>
where
    F: FnMut(u32) -> Result<f64>,
{
    let Some(k0) = k0 else {
        return Ok(EntropyResult::zero());
    };
    g.check_mode(k0)?;
    let mut terms = Vec::new();
    for i in active_bands(k0, s, g) {
        let b = bracket(i)?;
        if b != 0.0 {
            let w = ln_band_weight(i, k0, s, g);
            terms.push(LogValue::from_f64(b) * LogValue::from_ln(w));
        }
    }
    Ok(EntropyResult::new(LogValue::sum(terms)))
}

/// Entropy of `n` blocks for `F = {0, ..., k0}` from the boundary bands.
pub fn entropy_closed_form(s: &SubsystemSpec, k0: Option<u32>, g: &GraphParams) -> Result<EntropyResult> {
    SubsystemSpec::new(s.n(), s.r(), g)?;
    let table = BoundaryCoefficients::new(g.q(), s.r())?;
    let n = s.n();
    band_sum(k0, s, g, |i| {
        let (x0, y0) = table.pair(i, 0, n)?;
        let mut b = binary_entropy_pair(x0, y0);
        if n > 1 {
            let (x1, y1) = table.pair(i, 1, n)?;
            b += (n - 1) as f64 * binary_entropy_pair(x1, y1);
        }
        Ok(b)
    })
}

/// Entropy for any Fermi set: boundary bands when contiguous, full spectrum
/// otherwise.
pub fn entropy(s: &SubsystemSpec, f: &FermiSet, g: &GraphParams) -> Result<EntropyResult> {
    if f.is_empty() {
        return Ok(EntropyResult::zero());
    }
    match f.contiguous_k0() {
        Some(k0) => entropy_closed_form(s, Some(k0), g),
        None => entropy_from_spectrum(&chopped_spectrum(s, f, g)?),
    }
}

// Terms (c_j, shift_j) of the information brackets; shift n-1 is the j=0
// sector of n blocks, shift -1 the other sectors.
const I2_TERMS: [(f64, f64); 3] = [(2.0, 0.0), (-1.0, 1.0), (-1.0, -1.0)];
const I3_TERMS: [(f64, f64); 5] = [(3.0, 0.0), (-3.0, 1.0), (-3.0, -1.0), (1.0, 2.0), (2.0, -1.0)];

pub(crate) fn i2_bracket(table: &BoundaryCoefficients, i: u32) -> Result<f64> {
    let (p, pc, a) = table.parts(i)?;
    Ok(entropy_combination(p, pc, a, &I2_TERMS))
}

pub(crate) fn i3_bracket(table: &BoundaryCoefficients, i: u32) -> Result<f64> {
    let (p, pc, a) = table.parts(i)?;
    Ok(entropy_combination(p, pc, a, &I3_TERMS))
}

fn check_tripartite_geometry(g: &GraphParams) -> Result<()> {
    if g.q() < 3 {
        return Err(Error::UnsupportedGeometry(format!("tripartite undefined for q={}", g.q())));
    }
    Ok(())
}

fn blocks(n: u32, r: u32, g: &GraphParams) -> Result<SubsystemSpec> {
    SubsystemSpec::new(n, r, g)
}

/// Mutual information of two blocks at distance `r`.
///
/// Contiguous Fermi sets use the band sum of `2 s(F^(1)_{i,0}) - s(F^(2)_{i,0})
/// - s(F^(2)_{i,1})`; other sets go through the definitional route.
pub fn mutual_information(r: u32, f: &FermiSet, g: &GraphParams) -> Result<EntropyResult> {
    let s2 = blocks(2, r, g)?;
    if f.is_empty() {
        return Ok(EntropyResult::zero());
    }
    match f.contiguous_k0() {
        Some(k0) => {
            let table = BoundaryCoefficients::new(g.q(), r)?;
            band_sum(Some(k0), &s2, g, |i| i2_bracket(&table, i))
        }
        None => mutual_information_definitional(r, f, g),
    }
}

/// `I_2 = S(A_1) + S(A_2) - S(A_1 ∪ A_2) = 2 S(1 block) - S(2 blocks)`.
pub fn mutual_information_definitional(r: u32, f: &FermiSet, g: &GraphParams) -> Result<EntropyResult> {
    let s1 = entropy(&blocks(1, r, g)?, f, g)?.value_log;
    let s2 = entropy(&blocks(2, r, g)?, f, g)?.value_log;
    Ok(EntropyResult::new(LogValue::sum([s1, s1, -s2])))
}

/// Tripartite information of three blocks at mutual distance `r`.
pub fn tripartite_information(r: u32, f: &FermiSet, g: &GraphParams) -> Result<EntropyResult> {
    check_tripartite_geometry(g)?;
    let s3 = blocks(3, r, g)?;
    if f.is_empty() {
        return Ok(EntropyResult::zero());
    }
    match f.contiguous_k0() {
        Some(k0) => {
            let table = BoundaryCoefficients::new(g.q(), r)?;
            band_sum(Some(k0), &s3, g, |i| i3_bracket(&table, i))
        }
        None => tripartite_information_from_entropies(r, f, g),
    }
}

/// `I_3 = 3 S(1 block) - 3 S(2 blocks) + S(3 blocks)`, using that every pair
/// of blocks is equivalent under a graph automorphism.
pub fn tripartite_information_from_entropies(r: u32, f: &FermiSet, g: &GraphParams) -> Result<EntropyResult> {
    check_tripartite_geometry(g)?;
    let s1 = entropy(&blocks(1, r, g)?, f, g)?.value_log;
    let s2 = entropy(&blocks(2, r, g)?, f, g)?.value_log;
    let s3 = entropy(&blocks(3, r, g)?, f, g)?.value_log;
    Ok(EntropyResult::new(LogValue::sum([s1, s1, s1, -s2, -s2, -s2, s3])))
}

/// `I_3 = I_2(A_1:A_2) + I_2(A_1:A_3) - I_2(A_1 : A_2 ∪ A_3)`, with the last
/// term written as `S(A_1) + S(A_2 ∪ A_3) - S(A_1 ∪ A_2 ∪ A_3)`.
pub fn tripartite_information_definitional(r: u32, f: &FermiSet, g: &GraphParams) -> Result<EntropyResult> {
    check_tripartite_geometry(g)?;
    let i2 = mutual_information_definitional(r, f, g)?.value_log;
    let s1 = entropy(&blocks(1, r, g)?, f, g)?.value_log;
    let s2 = entropy(&blocks(2, r, g)?, f, g)?.value_log;
    let s3 = entropy(&blocks(3, r, g)?, f, g)?.value_log;
    let i2_a1_a23 = LogValue::sum([s1, s2, -s3]);
    Ok(EntropyResult::new(LogValue::sum([i2, i2, -i2_a1_a23])))
}

/// `S(n blocks) - n S(1 block)`: how far the entropy is from additive in the
/// number of blocks.
pub fn additivity_deviation(s: &SubsystemSpec, f: &FermiSet, g: &GraphParams) -> Result<LogValue> {
    let sn = entropy(s, f, g)?.value_log;
    let s1 = entropy(&s.with_blocks(1, g)?, f, g)?.value_log;
    Ok(sn - s1 * LogValue::from_f64(s.n() as f64))
}

/// True when the entropy is non-negative as every valid entropy must be.
pub fn is_physical(e: &EntropyResult) -> bool {
    e.value_log.sign() != Sign::Negative
}

//! Evaluation of one measure at one parameter point, shared by `compute`
//! and `sweep`.

use std::collections::BTreeMap;

use hamming_entanglement::asymptotics::{f_coefficient, g2_coefficient, g3_coefficient};
use hamming_entanglement::measures::{entropy, mutual_information, norm, tripartite_information};
use hamming_entanglement::model::{fermi_set, filling_fraction};
use hamming_entanglement::subsystem::{chopped_spectrum, subsystem_geometry};
use hamming_entanglement::{Error, FermiSet, GraphParams, HoppingModel, LogValue, Sign, SubsystemSpec};
use serde::Serialize;

use crate::args::{Measure, ModelKind};

/// Normalization column names, in output order.
pub const PER_Q_D_MINUS_1: &str = norm::PER_Q_D_MINUS_1;
pub const PER_VOLUME_SQRT_R_OVER_D: &str = norm::PER_VOLUME_SQRT_R_OVER_D;
pub const PER_VOLUME_SQRT_DELTA: &str = "S/(V_A (1-delta)^(1/2))";
pub const INFO_PER_Q_D_MINUS_R: &str = "I/(q^(d-r) d^(-1/2))";
pub const NORMALIZATIONS: [&str; 4] =
    [PER_Q_D_MINUS_1, PER_VOLUME_SQRT_R_OVER_D, PER_VOLUME_SQRT_DELTA, INFO_PER_Q_D_MINUS_R];

/// Hopping model parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub alpha0: f64,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
}

impl ModelSpec {
    fn build(&self, g: &GraphParams) -> Result<HoppingModel, Error> {
        match self.kind {
            ModelKind::Nn => Ok(HoppingModel::nearest_neighbor(self.alpha0, g)),
            ModelKind::Lr => Ok(HoppingModel::exponential(self.alpha0, self.c, g)),
            ModelKind::Explicit => match &self.alphas {
                Some(a) => HoppingModel::explicit(a.clone(), g),
                None => Err(Error::Domain("explicit model needs --alphas".into())),
            },
        }
    }
}

/// How the occupied modes are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum FermiChoice {
    /// Ground state of the hopping model.
    Model,
    /// `{0, ..., k0}`.
    K0(u32),
    /// `{0, ..., d/q}`; requires `q | d`.
    DOverQ,
    Members(Vec<u32>),
}

/// One parameter point.
#[derive(Clone, Debug)]
pub struct Point {
    pub measure: Measure,
    pub model: ModelSpec,
    pub fermi: FermiChoice,
    pub d: Option<u32>,
    pub q: u32,
    pub n: u32,
    pub r: u32,
    /// Set when `r` was derived from `delta = 1 - r/d`.
    pub delta: Option<f64>,
    pub bits: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub lambda: f64,
    pub complement: f64,
    /// Decimal string; multiplicities outgrow every integer type.
    pub multiplicity: String,
    pub q_label: u32,
    pub sector: u8,
}

/// Result at one point.
#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub k0: Option<u32>,
    pub fermi_set: Option<Vec<u32>>,
    /// A single-particle energy vanished and its mode was filled.
    pub degenerate: bool,
    pub units: &'static str,
    /// Plain value, `None` when it leaves the `f64` range.
    pub value: Option<f64>,
    /// `log10 |value|`, `None` for an exact zero.
    pub log10: Option<f64>,
    pub sign: i8,
    pub normalizations: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<SpectrumRow>>,
}

fn sign_of(v: &LogValue) -> i8 {
    match v.sign() {
        Sign::Negative => -1,
        Sign::Zero => 0,
        Sign::Positive => 1,
    }
}

fn plain(value: f64, units: &'static str) -> Evaluation {
    let v = LogValue::from_f64(value);
    Evaluation {
        k0: None,
        fermi_set: None,
        degenerate: false,
        units,
        value: Some(value),
        log10: (!v.is_zero()).then(|| v.log10_mag()),
        sign: sign_of(&v),
        normalizations: BTreeMap::new(),
        spectrum: None,
    }
}

fn scale_bits(v: LogValue, bits: bool) -> LogValue {
    if bits {
        v * LogValue::from_f64(std::f64::consts::LOG2_E)
    } else {
        v
    }
}

fn resolve_fermi(p: &Point, g: &GraphParams) -> Result<FermiSet, Error> {
    match &p.fermi {
        FermiChoice::Model => fermi_set(&p.model.build(g)?, g),
        FermiChoice::K0(k0) => FermiSet::contiguous(Some(*k0), g),
        FermiChoice::DOverQ => {
            if !g.d().is_multiple_of(g.q()) {
                return Err(Error::Domain(format!("k0 = d/q needs d={} to be a multiple of q={}", g.d(), g.q())));
            }
            FermiSet::contiguous(Some(g.d() / g.q()), g)
        }
        FermiChoice::Members(m) => FermiSet::from_members(m.clone(), g),
    }
}

/// `ln (q^(d-r) d^(-1/2))`.
fn ln_band_scale(r: u32, g: &GraphParams) -> f64 {
    (g.d() - r) as f64 * (g.q() as f64).ln() - 0.5 * (g.d() as f64).ln()
}

/// Evaluates `p.measure` at `p`.
pub fn evaluate(p: &Point) -> Result<Evaluation, Error> {
    let units = if p.bits && p.measure.is_entropic() { "bits" } else if p.measure.is_entropic() { "nats" } else { "" };
    if matches!(p.measure, Measure::Tripartite | Measure::G3) && p.q == 2 {
        return Err(Error::UnsupportedGeometry("tripartite undefined for q=2".into()));
    }
    let coeff_scale = if p.bits { std::f64::consts::LOG2_E } else { 1.0 };
    match p.measure {
        Measure::G2 => return Ok(plain(coeff_scale * g2_coefficient(p.q, p.r)?, units)),
        Measure::G3 => return Ok(plain(coeff_scale * g3_coefficient(p.q, p.r)?, units)),
        Measure::F => return Ok(plain(coeff_scale * f_coefficient(p.n, p.q, p.r)?, units)),
        _ => {}
    }

    let d = p.d.ok_or_else(|| Error::Domain(format!("measure {} needs d", p.measure.name())))?;
    let g = GraphParams::new(d, p.q)?;
    let f = resolve_fermi(p, &g)?;
    let mut normalizations = BTreeMap::new();
    let mut spectrum = None;
    let value = match p.measure {
        Measure::Entropy => {
            let s = SubsystemSpec::new(p.n, p.r, &g)?;
            let e = entropy(&s, &f, &g)?.with_normalizations(&s, &g)?;
            let e = if p.bits { e.in_bits() } else { e };
            for key in [PER_Q_D_MINUS_1, PER_VOLUME_SQRT_R_OVER_D] {
                normalizations.insert(key.to_string(), e.normalizations[key]);
            }
            if let Some(delta) = p.delta {
                let volume = subsystem_geometry(&s, &g)?.volume;
                let den = volume * LogValue::from_f64((1.0 - delta).sqrt());
                normalizations.insert(PER_VOLUME_SQRT_DELTA.to_string(), e.value_log.ratio(&den));
            }
            e.value_log
        }
        Measure::Mutual | Measure::Tripartite => {
            let v = if p.measure == Measure::Mutual {
                mutual_information(p.r, &f, &g)?
            } else {
                tripartite_information(p.r, &f, &g)?
            };
            let v = scale_bits(v.value_log, p.bits);
            normalizations.insert(INFO_PER_Q_D_MINUS_R.to_string(), v.ratio(&LogValue::from_ln(ln_band_scale(p.r, &g))));
            v
        }
        Measure::Filling => LogValue::from_f64(filling_fraction(&f, &g)?),
        Measure::Spectrum => {
            let s = SubsystemSpec::new(p.n, p.r, &g)?;
            let entries = chopped_spectrum(&s, &f, &g)?;
            let trace = LogValue::sum(
                entries.iter().map(|e| LogValue::from_biguint(&e.multiplicity) * LogValue::from_f64(e.lambda)),
            );
            spectrum = Some(
                entries
                    .into_iter()
                    .map(|e| SpectrumRow {
                        lambda: e.lambda,
                        complement: e.complement,
                        multiplicity: e.multiplicity.to_string(),
                        q_label: e.q_label,
                        sector: e.sector,
                    })
                    .collect(),
            );
            trace
        }
        Measure::G2 | Measure::G3 | Measure::F => unreachable!("handled above"),
    };
    Ok(Evaluation {
        k0: f.contiguous_k0(),
        fermi_set: Some(f.members().to_vec()),
        degenerate: f.degenerate_ground_state(),
        units,
        value: value.to_finite_f64(),
        log10: (!value.is_zero()).then(|| value.log10_mag()),
        sign: sign_of(&value),
        normalizations,
        spectrum,
    })
}

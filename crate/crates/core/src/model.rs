//! Hamming graph spectra and single-particle physics of the hopping model.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{self, binomial_exact, ln_binomial, log_sum_exp, LogValue};

/// Energies closer to zero than this are treated as zero modes.
pub const ENERGY_ZERO_TOL: f64 = 1e-12;

/// The Hamming graph `H(d, q)`: words of length `d` over `q` letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphParams {
    d: u32,
    q: u32,
}

impl GraphParams {
    pub fn new(d: u32, q: u32) -> Result<GraphParams> {
        if d == 0 {
            return domain("graph diameter d must be positive");
        }
        if q < 2 {
            return domain(format!("alphabet size q={q} must be at least 2"));
        }
        Ok(GraphParams { d, q })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `q^d` as a log value.
    pub fn vertex_count(&self) -> LogValue {
        LogValue::from_ln(self.d as f64 * (self.q as f64).ln())
    }

    /// `q^d` exactly.
    pub fn vertex_count_exact(&self) -> BigUint {
        BigUint::from(self.q).pow(self.d)
    }

    /// `q^d` when it fits in a `u64`.
    pub fn vertex_count_u64(&self) -> Option<u64> {
        (self.q as u64).checked_pow(self.d)
    }

    pub(crate) fn check_mode(&self, k: u32) -> Result<()> {
        if k > self.d {
            return domain(format!("mode index k={k} outside 0..={}", self.d));
        }
        Ok(())
    }
}

/// Distance-dependent hopping amplitudes `alpha_0 ..= alpha_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoppingModel {
    alphas: Vec<f64>,
}

impl HoppingModel {
    pub fn explicit(alphas: Vec<f64>, g: &GraphParams) -> Result<HoppingModel> {
        if alphas.len() != g.d as usize + 1 {
            return domain(format!(
                "hopping model has {} amplitudes, H({}, {}) needs {}",
                alphas.len(),
                g.d,
                g.q,
                g.d + 1
            ));
        }
        Ok(HoppingModel { alphas })
    }

    /// Chemical potential `alpha_0` and unit nearest-neighbour hopping.
    pub fn nearest_neighbor(alpha0: f64, g: &GraphParams) -> HoppingModel {
        let mut alphas = vec![0.0; g.d as usize + 1];
        alphas[0] = alpha0;
        alphas[1] = 1.0;
        HoppingModel { alphas }
    }

    /// `alpha_i = exp(-c i)` for `i > 0`.
    pub fn exponential(alpha0: f64, c: f64, g: &GraphParams) -> HoppingModel {
        let alphas = (0..=g.d)
            .map(|i| if i == 0 { alpha0 } else { (-c * i as f64).exp() })
            .collect();
        HoppingModel { alphas }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// Occupied modes of the ground state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermiSet {
    members: Vec<u32>,
    contiguous_k0: Option<u32>,
    degenerate_ground_state: bool,
}

impl FermiSet {
    pub fn empty() -> FermiSet {
        FermiSet { members: Vec::new(), contiguous_k0: None, degenerate_ground_state: false }
    }

    /// `{0, ..., k0}`, or the empty set for `None`.
    pub fn contiguous(k0: Option<u32>, g: &GraphParams) -> Result<FermiSet> {
        match k0 {
            None => Ok(FermiSet::empty()),
            Some(k0) => {
                g.check_mode(k0)?;
                Ok(FermiSet::from_members((0..=k0).collect(), g)?)
            }
        }
    }

    /// Arbitrary set of mode indices; duplicates are merged.
    pub fn from_members(mut members: Vec<u32>, g: &GraphParams) -> Result<FermiSet> {
        members.sort_unstable();
        members.dedup();
        if let Some(&k) = members.last() {
            g.check_mode(k)?;
        }
        let contiguous_k0 = match members.last() {
            Some(&last) if members.len() == last as usize + 1 => Some(last),
            _ => None,
        };
        Ok(FermiSet { members, contiguous_k0, degenerate_ground_state: false })
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, k: u32) -> bool {
        self.members.binary_search(&k).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Some(k0)` iff the set is exactly `{0, ..., k0}`.
    pub fn contiguous_k0(&self) -> Option<u32> {
        self.contiguous_k0
    }

    /// True when some single-particle energy vanished (within
    /// [`ENERGY_ZERO_TOL`]) and the zero mode was filled.
    pub fn degenerate_ground_state(&self) -> bool {
        self.degenerate_ground_state
    }
}

/// Adjacency eigenvalue `omega_k = k q - d`.
pub fn adjacency_eigenvalue(k: u32, g: &GraphParams) -> Result<i64> {
    g.check_mode(k)?;
    Ok(k as i64 * g.q as i64 - g.d as i64)
}

/// Degeneracy `D_k = C(d, k) (q-1)^(d-k)` of `omega_k`.
pub fn adjacency_degeneracy(k: u32, g: &GraphParams) -> Result<BigUint> {
    g.check_mode(k)?;
    Ok(binomial_exact(g.d as u64, k as i64) * BigUint::from(g.q - 1).pow(g.d - k))
}

/// `ln D_k`.
pub fn ln_adjacency_degeneracy(k: u32, g: &GraphParams) -> Result<f64> {
    g.check_mode(k)?;
    Ok(ln_binomial(g.d as u64, k as i64)? + (g.d - k) as f64 * ((g.q - 1) as f64).ln())
}

/// Single-particle energy `epsilon_k`, summed over the Krawtchouk expansion.
///
/// Each coefficient `C(d,i) (q-1)^i K_i` is an integer and is formed exactly;
/// only the final weighted sum over the amplitudes runs in floating point.
pub fn single_particle_energy(m: &HoppingModel, k: u32, g: &GraphParams) -> Result<f64> {
    g.check_mode(k)?;
    if m.alphas.len() != g.d as usize + 1 {
        return domain(format!(
            "hopping model length {} does not match d={}",
            m.alphas.len(),
            g.d
        ));
    }
    let x = g.d - k;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (i, &alpha) in m.alphas.iter().enumerate() {
        if alpha == 0.0 {
            continue;
        }
        let i = i as u32;
        let weight = BigRational::from_integer(
            (binomial_exact(g.d as u64, i as i64) * BigUint::from(g.q - 1).pow(i)).into(),
        );
        let coeff = specfun::rational_to_f64(&(weight * specfun::krawtchouk_exact(i, x, g.q, g.d)?));
        let t = alpha * coeff;
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    Ok(sum + comp)
}

/// Closed-form energies of the nearest-neighbour model, `alpha_0 + omega_k`.
pub fn nn_energy(alpha0: f64, k: u32, g: &GraphParams) -> Result<f64> {
    Ok(alpha0 + adjacency_eigenvalue(k, g)? as f64)
}

/// Closed-form energies of the exponential long-range model.
pub fn lr_energy(alpha0: f64, c: f64, k: u32, g: &GraphParams) -> Result<f64> {
    g.check_mode(k)?;
    let e = (-c).exp();
    let ln_part = (g.d - k) as f64 * (-e).ln_1p() + k as f64 * (e * (g.q - 1) as f64).ln_1p();
    Ok(ln_part.exp() + alpha0 - 1.0)
}

fn clamp_k0(raw: f64, g: &GraphParams) -> Option<u32> {
    if raw.is_nan() || raw < 0.0 {
        None
    } else if raw >= g.d as f64 {
        Some(g.d)
    } else {
        Some(raw as u32)
    }
}

/// Fermi momentum of the nearest-neighbour model, `floor((d - alpha_0) / q)`.
/// `None` when no mode is occupied.
pub fn nn_fermi_k0(alpha0: f64, g: &GraphParams) -> Option<u32> {
    clamp_k0(((g.d as f64 - alpha0) / g.q as f64).floor(), g)
}

/// Fermi momentum of the exponential long-range model.
pub fn lr_fermi_k0(alpha0: f64, c: f64, g: &GraphParams) -> Result<Option<u32>> {
    if alpha0 >= 1.0 {
        return Ok(None);
    }
    if c.is_nan() || c <= 0.0 {
        return domain(format!("long-range decay c={c} must be positive"));
    }
    let e = (-c).exp();
    let ln_lo = (-e).ln_1p();
    let ln_hi = (e * (g.q - 1) as f64).ln_1p();
    let raw = ((-alpha0).ln_1p() - g.d as f64 * ln_lo) / (ln_hi - ln_lo);
    Ok(clamp_k0(raw.floor(), g))
}

/// Ground-state Fermi set `{k : epsilon_k <= 0}`. Zero modes are filled and
/// flagged.
pub fn fermi_set(m: &HoppingModel, g: &GraphParams) -> Result<FermiSet> {
    let mut members = Vec::new();
    let mut degenerate = false;
    for k in 0..=g.d {
        let e = single_particle_energy(m, k, g)?;
        if e.abs() < ENERGY_ZERO_TOL {
            degenerate = true;
            members.push(k);
        } else if e < 0.0 {
            members.push(k);
        }
    }
    let mut set = FermiSet::from_members(members, g)?;
    set.degenerate_ground_state = degenerate;
    Ok(set)
}

const EXACT_FILLING_MAX_BITS: f64 = 16384.0;

/// Filling fraction `sum_{k in F} D_k / q^d`.
///
/// Exact rational arithmetic while `q^d` has at most 16384 bits, log-space
/// beyond.
pub fn filling_fraction(f: &FermiSet, g: &GraphParams) -> Result<f64> {
    if f.is_empty() {
        return Ok(0.0);
    }
    if g.d as f64 * (g.q as f64).log2() <= EXACT_FILLING_MAX_BITS {
        let mut filled = BigUint::zero();
        for &k in f.members() {
            filled += adjacency_degeneracy(k, g)?;
        }
        let nu = BigRational::new(filled.into(), g.vertex_count_exact().into());
        return nu.to_f64().ok_or_else(|| Error::Internal("filling fraction not representable".into()));
    }
    let logs = f
        .members()
        .iter()
        .map(|&k| ln_adjacency_degeneracy(k, g))
        .collect::<Result<Vec<_>>>()?;
    let ln_nu = log_sum_exp(&logs) - g.d as f64 * (g.q as f64).ln();
    Ok(ln_nu.exp().min(1.0))
}

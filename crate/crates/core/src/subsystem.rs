//! Disjoint Hamming subgraphs and the closed-form spectrum of the chopped
//! correlation matrix.
//!
//! Block `j` (for `j = 0..n`) is the set of words whose first `r` letters all
//! equal `j`; it is a copy of `H(L, q)` with `L = d - r`, and distinct blocks
//! sit at distance `r` from each other.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{FermiSet, GraphParams};
use crate::specfun::{binomial_exact, ln_binomial, log_sum_exp, LogValue};

/// Eigenvalues outside `[0, 1]` by less than this are clamped; by more, they
/// are reported as internal errors.
pub const LAMBDA_CLAMP_TOL: f64 = 1e-12;

/// `n` blocks at mutual distance `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemSpec {
    n: u32,
    r: u32,
}

impl SubsystemSpec {
    pub fn new(n: u32, r: u32, g: &GraphParams) -> Result<SubsystemSpec> {
        if n == 0 {
            return domain("number of blocks n must be positive");
        }
        if n > g.q() {
            return domain(format!("n={n} blocks need n <= q={}", g.q()));
        }
        if r == 0 || r > g.d() {
            return domain(format!("separation r={r} outside 1..={}", g.d()));
        }
        Ok(SubsystemSpec { n, r })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Block diameter `L = d - r`.
    pub fn block_diameter(&self, g: &GraphParams) -> u32 {
        g.d() - self.r
    }

    /// Same separation, different number of blocks.
    pub fn with_blocks(&self, n: u32, g: &GraphParams) -> Result<SubsystemSpec> {
        SubsystemSpec::new(n, self.r, g)
    }
}

/// Volume, boundary and volume fraction of a subsystem.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Geometry {
    /// `|A| = n q^(d-r)`.
    pub volume: LogValue,
    /// `(q-1) r |A|`: edges that change one of the `r` fixed letters of a
    /// vertex in `A`. This is the cut between `A` and its complement unless
    /// `r = 1` and `n > 1`, where some of these edges join two blocks.
    pub boundary_area: LogValue,
    /// `|A| / q^d = n q^(-r)`.
    pub volume_ratio: LogValue,
}

pub fn subsystem_geometry(s: &SubsystemSpec, g: &GraphParams) -> Result<Geometry> {
    SubsystemSpec::new(s.n, s.r, g)?;
    let ln_q = (g.q() as f64).ln();
    let ln_n = (s.n as f64).ln();
    let volume = LogValue::from_ln(ln_n + s.block_diameter(g) as f64 * ln_q);
    let boundary_area = volume * LogValue::from_f64(((g.q() - 1) * s.r) as f64);
    let volume_ratio = LogValue::from_ln(ln_n - s.r as f64 * ln_q);
    Ok(Geometry { volume, boundary_area, volume_ratio })
}

/// One distinct eigenvalue of the chopped correlation matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    /// `1 - lambda`, carried separately at full relative precision.
    pub complement: f64,
    pub multiplicity: BigUint,
    /// Number of uniform factors among the block coordinates.
    pub q_label: u32,
    /// `0` for the block-symmetric sector, `1` for the `n - 1` others.
    pub sector: u8,
}

fn check_lambda(lambda: f64, what: &str) -> Result<f64> {
    if !(-LAMBDA_CLAMP_TOL..=1.0 + LAMBDA_CLAMP_TOL).contains(&lambda) || lambda.is_nan() {
        return Err(Error::Internal(format!("{what} = {lambda} escapes [0, 1]")));
    }
    Ok(lambda.clamp(0.0, 1.0))
}

fn sector_weight(n: u32, sector: u8) -> f64 {
    if sector == 0 {
        n as f64 - 1.0
    } else {
        -1.0
    }
}

/// Eigenvalue `Lambda_{Q,e}` for an arbitrary Fermi set.
pub fn lambda_eigenvalue(
    q_label: u32,
    sector: u8,
    s: &SubsystemSpec,
    f: &FermiSet,
    g: &GraphParams,
) -> Result<f64> {
    Ok(lambda_pair(q_label, sector, s, f, g)?.0)
}

/// `(Lambda_{Q,e}, 1 - Lambda_{Q,e})`.
///
/// The binomial and alternating sums are merged term by term into
/// `C(r,m) q^(-r) ((q-1)^(r-m) + w (-1)^(r-m))`, which is never negative
/// because `-1 <= w <= q - 1`. Summing these over `k = Q + m` in `F` gives
/// the eigenvalue; summing them over the rest of the window gives its
/// complement, since the full window adds up to one. Both sides therefore
/// keep full relative precision, which matters for eigenvalues within
/// rounding of 1 that carry astronomically large multiplicities.
pub fn lambda_pair(
    q_label: u32,
    sector: u8,
    s: &SubsystemSpec,
    f: &FermiSet,
    g: &GraphParams,
) -> Result<(f64, f64)> {
    let l = s.block_diameter(g);
    if q_label > l {
        return domain(format!("Q={q_label} outside 0..={l}"));
    }
    if sector > 1 {
        return domain(format!("sector e={sector} must be 0 or 1"));
    }
    if s.n == 1 && sector == 1 {
        return domain("a single block has no e=1 sector");
    }
    let r = s.r;
    if let Some(k0) = f.contiguous_k0() {
        if q_label > k0 {
            return Ok((0.0, 1.0));
        }
        if q_label + r <= k0 {
            return Ok((1.0, 0.0));
        }
    } else if f.is_empty() {
        return Ok((0.0, 1.0));
    }

    // The window Q..=Q+r never passes d because Q <= L = d - r.
    let ln_q = (g.q() as f64).ln();
    let ln_qm1 = ((g.q() - 1) as f64).ln();
    let w = sector_weight(s.n, sector);
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for m in 0..=r {
        let t = (r - m) as f64;
        let sign = if (r - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        // ln((q-1)^t + w (-1)^t): exact integers while they fit in a double,
        // otherwise the correction is far below rounding of the power.
        let core = if t * ln_qm1 < 40.0 * std::f64::consts::LN_2 {
            ((g.q() - 1) as f64).powi(t as i32) + w * sign
        } else {
            f64::NAN
        };
        let core = if core.is_nan() { t * ln_qm1 + (w * sign * (-t * ln_qm1).exp()).ln_1p() } else { core.ln() };
        let term = ln_binomial(r as u64, m as i64)? - r as f64 * ln_q + core;
        if f.contains(q_label + m) {
            inside.push(term);
        } else {
            outside.push(term);
        }
    }
    let lambda = check_lambda(log_sum_exp(&inside).exp(), "Lambda")?;
    let complement = check_lambda(log_sum_exp(&outside).exp(), "1 - Lambda")?;
    if (lambda + complement - 1.0).abs() > LAMBDA_CLAMP_TOL {
        return Err(Error::Internal(format!("Lambda {lambda} and complement {complement} do not add to 1")));
    }
    Ok((lambda, complement))
}

/// The two sums that make up every boundary coefficient, tabulated for
/// `i = 1..=r`:
///
/// * `lower[i]  = sum_{m=0}^{r-i} C(r,m) (q-1)^(r-m) / q^r`
/// * `upper[i]  = 1 - lower[i]`, summed directly over `m > r - i`
/// * `alt[i]    = sum_{m=0}^{r-i} C(r,m) (-1)^(r-m) / q^r`
///
/// so that `F_{i,j} = lower + w alt` and `1 - F_{i,j} = upper - w alt` with
/// `w = n - 1` for `j = 0` and `w = -1` otherwise.
#[derive(Clone, Debug)]
pub struct BoundaryCoefficients {
    q: u32,
    r: u32,
    lower: Vec<f64>,
    upper: Vec<f64>,
    alt: Vec<f64>,
    exact: Option<ExactTable>,
}

fn neumaier_prefix(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = Vec::new();
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for t in values {
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
        out.push(sum + comp);
    }
    out
}

type Prefixes = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

/// Separations up to this size get exact boundary tables.
const EXACT_TABLE_MAX_R: u32 = 256;

/// Integer numerators over the common denominator `q^r`, indexed by `i`.
#[derive(Clone, Debug)]
struct ExactTable {
    denom: BigInt,
    lower: Vec<BigInt>,
    upper: Vec<BigInt>,
    alt: Vec<BigInt>,
}

impl ExactTable {
    fn new(q: u32, r: u32) -> ExactTable {
        let denom = BigInt::from(q).pow(r);
        let ru = r as usize;
        let (mut lower, mut upper, mut alt) =
            (vec![BigInt::zero(); ru + 1], vec![BigInt::zero(); ru + 1], vec![BigInt::zero(); ru + 1]);
        let (mut pmf_acc, mut alt_acc) = (BigInt::zero(), BigInt::zero());
        // m runs upwards, so the prefix ending at m = r - i lands at i.
        for m in 0..r {
            let c = BigInt::from(binomial_exact(r as u64, m as i64));
            pmf_acc += &c * BigInt::from(q - 1).pow(r - m);
            if (r - m).is_multiple_of(2) {
                alt_acc += &c;
            } else {
                alt_acc -= &c;
            }
            let i = ru - m as usize;
            lower[i] = pmf_acc.clone();
            upper[i] = &denom - &pmf_acc;
            alt[i] = alt_acc.clone();
        }
        ExactTable { denom, lower, upper, alt }
    }

    fn round(&self, num: &BigInt) -> f64 {
        BigRational::new(num.clone(), self.denom.clone()).to_f64().unwrap_or(f64::NAN)
    }
}

fn float_prefixes(q: u32, r: u32) -> Result<Prefixes> {
    let ln_q = (q as f64).ln();
    let ln_qm1 = ((q - 1) as f64).ln();
    let mut pmf = Vec::with_capacity(r as usize + 1);
    let mut alt = Vec::with_capacity(r as usize + 1);
    for m in 0..=r {
        let ln_c = ln_binomial(r as u64, m as i64)? - r as f64 * ln_q;
        pmf.push((ln_c + (r - m) as f64 * ln_qm1).exp());
        let sign = if (r - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        alt.push(sign * ln_c.exp());
    }
    Ok((
        neumaier_prefix(pmf.iter().copied()),
        neumaier_prefix(pmf.iter().rev().copied()),
        neumaier_prefix(alt.iter().copied()),
        neumaier_prefix(alt.iter().rev().copied()),
    ))
}

impl BoundaryCoefficients {
    pub fn new(q: u32, r: u32) -> Result<BoundaryCoefficients> {
        if q < 2 {
            return domain(format!("q={q} must be at least 2"));
        }
        if r == 0 {
            return domain("r must be positive");
        }
        let ru = r as usize;
        let mut lower = vec![f64::NAN; ru + 1];
        let mut upper = vec![f64::NAN; ru + 1];
        let mut alt = vec![f64::NAN; ru + 1];
        if r <= EXACT_TABLE_MAX_R {
            let exact = ExactTable::new(q, r);
            for i in 1..=ru {
                lower[i] = exact.round(&exact.lower[i]);
                upper[i] = exact.round(&exact.upper[i]);
                alt[i] = exact.round(&exact.alt[i]);
            }
            return Ok(BoundaryCoefficients { q, r, lower, upper, alt, exact: Some(exact) });
        }
        let (pmf_lo, pmf_hi, alt_lo, alt_hi) = float_prefixes(q, r)?;
        for i in 1..=ru {
            let top = ru - i; // last m in the partial sum
            let tail = i - 1; // index into the reversed prefix covering m > top
            // Both tails are sums of positive terms, hence accurate on their own.
            lower[i] = pmf_lo[top];
            upper[i] = pmf_hi[tail];
            // Full alternating sum vanishes, so the partial sum equals minus
            // the complementary tail.
            alt[i] = if 2 * top < ru { alt_lo[top] } else { -alt_hi[tail] };
        }
        Ok(BoundaryCoefficients { q, r, lower, upper, alt, exact: None })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    fn check(&self, i: u32) -> Result<usize> {
        if i == 0 || i > self.r {
            return domain(format!("boundary index i={i} outside 1..={}", self.r));
        }
        Ok(i as usize)
    }

    /// Binomial part, its complement, and the alternating part for index `i`.
    pub fn parts(&self, i: u32) -> Result<(f64, f64, f64)> {
        let i = self.check(i)?;
        Ok((self.lower[i], self.upper[i], self.alt[i]))
    }

    /// `(F_{i,j}, 1 - F_{i,j})` for `n` blocks.
    pub fn pair(&self, i: u32, sector: u8, n: u32) -> Result<(f64, f64)> {
        let (p, pc, a) = self.parts(i)?;
        if let Some(t) = &self.exact {
            let w = BigInt::from(if sector == 0 { n as i64 - 1 } else { -1 });
            let i = i as usize;
            return Ok((t.round(&(&t.lower[i] + &w * &t.alt[i])), t.round(&(&t.upper[i] - &w * &t.alt[i]))));
        }
        let w = sector_weight(n, sector);
        Ok((p + w * a, pc - w * a))
    }

    /// `F_{i,j}` for `n` blocks.
    pub fn value(&self, i: u32, sector: u8, n: u32) -> Result<f64> {
        let (x, _) = self.pair(i, sector, n)?;
        check_lambda(x, "boundary coefficient")
    }
}

/// Boundary coefficient `F_{i,j}^{(n)}`: the eigenvalue `Lambda_{Q,j}` at
/// `Q = k0 - r + i` for the contiguous Fermi set `{0, ..., k0}`.
pub fn boundary_coefficient(i: u32, sector: u8, s: &SubsystemSpec, g: &GraphParams) -> Result<f64> {
    if sector > 1 {
        return domain(format!("sector j={sector} must be 0 or 1"));
    }
    if i == 0 || i > s.r {
        return domain(format!("boundary index i={i} outside 1..={}", s.r));
    }
    BoundaryCoefficients::new(g.q(), s.r)?.value(i, sector, s.n)
}

/// Degeneracy `C(L, Q) (q-1)^(L-Q)` of the block-coordinate labels.
pub fn block_degeneracy(q_label: u32, l: u32, q: u32) -> BigUint {
    if q_label > l {
        return BigUint::from(0u32);
    }
    binomial_exact(l as u64, q_label as i64) * BigUint::from(q - 1).pow(l - q_label)
}

/// All distinct eigenvalues of `pi_A pi_F pi_A` on `A` with exact
/// multiplicities. Entries with zero multiplicity are omitted.
pub fn chopped_spectrum(s: &SubsystemSpec, f: &FermiSet, g: &GraphParams) -> Result<Vec<SpectrumEntry>> {
    SubsystemSpec::new(s.n, s.r, g)?;
    let l = s.block_diameter(g);
    let mut out = Vec::with_capacity(2 * (l as usize + 1));
    for q_label in 0..=l {
        let deg = block_degeneracy(q_label, l, g.q());
        let (lambda, complement) = lambda_pair(q_label, 0, s, f, g)?;
        out.push(SpectrumEntry {
            lambda,
            complement,
            multiplicity: deg.clone(),
            q_label,
            sector: 0,
        });
        if s.n > 1 {
            let (lambda, complement) = lambda_pair(q_label, 1, s, f, g)?;
            out.push(SpectrumEntry {
                lambda,
                complement,
                multiplicity: deg * BigUint::from(s.n - 1),
                q_label,
                sector: 1,
            });
        }
    }
    Ok(out)
}

/// Sum of multiplicities; equals `n q^L`.
pub fn total_multiplicity(spectrum: &[SpectrumEntry]) -> BigUint {
    spectrum.iter().map(|e| &e.multiplicity).sum()
}

/// Expands the spectrum into a sorted list with one value per eigenvector.
/// Only sensible for oracle-sized subsystems.
pub fn expand_spectrum(spectrum: &[SpectrumEntry]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for e in spectrum {
        let count: u64 = (&e.multiplicity)
            .try_into()
            .map_err(|_| Error::Domain("multiplicity too large to expand".into()))?;
        if count > 1 << 26 {
            return domain("spectrum too large to expand");
        }
        out.extend(std::iter::repeat_n(e.lambda, count as usize));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

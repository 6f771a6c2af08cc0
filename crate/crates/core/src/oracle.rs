//! Dense brute-force ground truth on the full `q^d`-dimensional vertex space.
//!
//! Vertices are words `v = (v_1, ..., v_d)` indexed by `sum_i v_i q^(d-i)`.
//! The correlation matrix is built twice, once from the product expansion
//! over binary strings and once from numerically diagonalized adjacency
//! eigenvectors; the two must agree before anything is certified.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::{entropy, entropy_from_spectrum};
use crate::model::{adjacency_degeneracy, adjacency_eigenvalue, FermiSet, GraphParams};
use crate::specfun::binary_entropy_pair;
use crate::subsystem::{chopped_spectrum, expand_spectrum, SpectrumEntry, SubsystemSpec};

pub const DEFAULT_CAP: u64 = 4096;
pub const CAP_ENV: &str = "HAMMING_ORACLE_CAP";

pub const INPUT_SYMMETRY_TOL: f64 = 1e-10;
pub const PROJECTOR_SYMMETRY_TOL: f64 = 1e-12;
pub const IDEMPOTENCE_TOL: f64 = 1e-10;
pub const PROJECTOR_EIGEN_TOL: f64 = 1e-8;
pub const CONSTRUCTION_TOL: f64 = 1e-9;
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const CLUSTER_GAP: f64 = 1e-7;
pub const ENTROPY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-10;

/// Size limit of the dense oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub cap: u64,
}

impl Default for OracleConfig {
    fn default() -> OracleConfig {
        OracleConfig { cap: DEFAULT_CAP }
    }
}

impl OracleConfig {
    pub fn with_cap(cap: u64) -> OracleConfig {
        OracleConfig { cap }
    }

    /// Default cap, overridden by `HAMMING_ORACLE_CAP` when set.
    pub fn from_env() -> Result<OracleConfig> {
        match std::env::var(CAP_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(OracleConfig::with_cap)
                .map_err(|_| Error::Domain(format!("{CAP_ENV}={v:?} is not a vertex count"))),
            Err(_) => Ok(OracleConfig::default()),
        }
    }

    /// Vertex count of `g` if it is within the cap.
    pub fn admit(&self, g: &GraphParams) -> Result<usize> {
        match g.vertex_count_u64() {
            Some(v) if v <= self.cap => Ok(v as usize),
            Some(v) => Err(Error::Capacity { vertices: v, cap: self.cap }),
            None => Err(Error::Capacity { vertices: u64::MAX, cap: self.cap }),
        }
    }
}

/// Index of a word.
pub fn vertex_index(word: &[u32], g: &GraphParams) -> Result<usize> {
    if word.len() != g.d() as usize {
        return domain(format!("word of length {} on H({}, {})", word.len(), g.d(), g.q()));
    }
    let mut idx = 0usize;
    for &letter in word {
        if letter >= g.q() {
            return domain(format!("letter {letter} outside alphabet of size {}", g.q()));
        }
        idx = idx * g.q() as usize + letter as usize;
    }
    Ok(idx)
}

/// Word of an index.
pub fn vertex_word(mut idx: usize, g: &GraphParams) -> Vec<u32> {
    let q = g.q() as usize;
    let mut word = vec![0u32; g.d() as usize];
    for slot in word.iter_mut().rev() {
        *slot = (idx % q) as u32;
        idx /= q;
    }
    word
}

fn hamming_distance(mut a: usize, mut b: usize, g: &GraphParams) -> usize {
    let q = g.q() as usize;
    let mut dist = 0;
    for _ in 0..g.d() {
        if a % q != b % q {
            dist += 1;
        }
        a /= q;
        b /= q;
    }
    dist
}

fn fill_by_distance(size: usize, g: &GraphParams, table: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(size, size);
    m.as_mut_slice().par_chunks_mut(size).enumerate().for_each(|(col, column)| {
        for (row, entry) in column.iter_mut().enumerate() {
            *entry = table[hamming_distance(row, col, g)];
        }
    });
    m
}

fn adjacency_kronecker(g: &GraphParams) -> DMatrix<f64> {
    let q = g.q() as usize;
    let complete = DMatrix::<f64>::from_element(q, q, 1.0) - DMatrix::<f64>::identity(q, q);
    let mut acc = complete.clone();
    let mut dim = q;
    for _ in 1..g.d() {
        acc = acc.kronecker(&DMatrix::<f64>::identity(q, q)) + DMatrix::<f64>::identity(dim, dim).kronecker(&complete);
        dim *= q;
    }
    acc
}

fn adjacency_by_distance(size: usize, g: &GraphParams) -> DMatrix<f64> {
    let mut table = vec![0.0; g.d() as usize + 1];
    table[1] = 1.0;
    fill_by_distance(size, g, &table)
}

/// Adjacency matrix, built as a Kronecker sum of complete graphs and as the
/// distance-one indicator; the two must coincide exactly.
pub fn build_adjacency(g: &GraphParams, cfg: &OracleConfig) -> Result<DMatrix<f64>> {
    let size = cfg.admit(g)?;
    let kron = adjacency_kronecker(g);
    let dist = adjacency_by_distance(size, g);
    if kron != dist {
        return Err(Error::Internal("adjacency constructions disagree".into()));
    }
    Ok(kron)
}

/// A dense orthogonal projector on the vertex space.
#[derive(Clone, Debug)]
pub struct DenseProjector {
    matrix: DMatrix<f64>,
    d: u32,
    q: u32,
}

/// Measured departures of a [`DenseProjector`] from an exact projector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorDefects {
    pub max_asymmetry: f64,
    /// Frobenius norm of `P^2 - P`, an upper bound on its operator norm.
    pub idempotence: f64,
    /// Largest distance of an eigenvalue from `{0, 1}`.
    pub eigen_spread: f64,
    pub trace: f64,
}

impl DenseProjector {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.d, self.q)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn defects(&self) -> ProjectorDefects {
        let max_asymmetry = (&self.matrix - self.matrix.transpose()).amax();
        let idempotence = (&self.matrix * &self.matrix - &self.matrix).norm();
        let eigen_spread = self
            .matrix
            .symmetric_eigenvalues()
            .iter()
            .map(|&x| x.abs().min((x - 1.0).abs()))
            .fold(0.0, f64::max);
        ProjectorDefects { max_asymmetry, idempotence, eigen_spread, trace: self.trace() }
    }

    /// Checks symmetry, idempotence and the `{0, 1}` spectrum.
    pub fn verify(&self) -> Result<ProjectorDefects> {
        let f = self.defects();
        if f.max_asymmetry > PROJECTOR_SYMMETRY_TOL
            || f.idempotence > IDEMPOTENCE_TOL
            || f.eigen_spread > PROJECTOR_EIGEN_TOL
        {
            return Err(Error::Internal(format!("projector defects beyond tolerance: {f:?}")));
        }
        Ok(f)
    }
}

/// Adjacency matrix with its numerical eigendecomposition, shared by every
/// Fermi set on the same graph.
pub struct OracleGraph {
    g: GraphParams,
    size: usize,
    adjacency: DMatrix<f64>,
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    modes: Vec<u32>,
}

impl OracleGraph {
    pub fn new(g: &GraphParams, cfg: &OracleConfig) -> Result<OracleGraph> {
        let size = cfg.admit(g)?;
        let adjacency = build_adjacency(g, cfg)?;
        let eig = adjacency.clone().symmetric_eigen();
        let q = g.q() as f64;
        let d = g.d() as f64;
        let modes = eig
            .eigenvalues
            .iter()
            .map(|&w| {
                let k = ((w + d) / q).round();
                if k < 0.0 || k > d || (w - (k * q - d)).abs() > 1e-6 {
                    return Err(Error::Internal(format!("adjacency eigenvalue {w} is no kq - d")));
                }
                Ok(k as u32)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OracleGraph {
            g: *g,
            size,
            adjacency,
            eigenvectors: eig.eigenvectors,
            eigenvalues: eig.eigenvalues,
            modes,
        })
    }

    pub fn graph(&self) -> &GraphParams {
        &self.g
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    /// Numerical adjacency eigenvalues, ascending.
    pub fn adjacency_spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Number of numerical eigenvectors assigned to each mode `k`.
    pub fn mode_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.g.d() as usize + 1];
        for &k in &self.modes {
            counts[k as usize] += 1;
        }
        counts
    }

    /// Largest deviation of the numeric adjacency spectrum from the exact
    /// multiset `{kq - d with multiplicity D_k}`; `None` if the
    /// multiplicities differ.
    pub fn adjacency_spectrum_deviation(&self) -> Result<Option<f64>> {
        let mut exact = Vec::with_capacity(self.size);
        for k in 0..=self.g.d() {
            let count: u64 = (&adjacency_degeneracy(k, &self.g)?)
                .try_into()
                .map_err(|_| Error::Internal("degeneracy overflow".into()))?;
            exact.extend(std::iter::repeat_n(adjacency_eigenvalue(k, &self.g)? as f64, count as usize));
        }
        let numeric = self.adjacency_spectrum();
        if exact.len() != numeric.len() {
            return Ok(None);
        }
        let counts_match = self
            .mode_counts()
            .iter()
            .enumerate()
            .all(|(k, &c)| adjacency_degeneracy(k as u32, &self.g).map(|dk| dk == c.into()).unwrap_or(false));
        if !counts_match {
            return Ok(None);
        }
        Ok(Some(exact.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)))
    }

    /// Product expansion over binary strings: `b_i = 0` picks the uniform
    /// projector `J/q` on letter `i`, `b_i = 1` its complement `1 - J/q`, and
    /// strings with `d - k` ones span mode `k`. An entry depends on the pair
    /// of words only through the letters they share, so the string sum is
    /// carried out as a polynomial in the number of ones.
    pub fn pi_f_product(&self, f: &FermiSet) -> DMatrix<f64> {
        let d = self.g.d() as usize;
        let inv_q = 1.0 / self.g.q() as f64;
        let table: Vec<f64> = (0..=d)
            .map(|dist| {
                // poly[w] = sum over strings with w ones of the entry product.
                let mut poly = vec![0.0; d + 1];
                poly[0] = 1.0;
                for pos in 0..d {
                    let (zero, one) = if pos < dist { (inv_q, -inv_q) } else { (inv_q, 1.0 - inv_q) };
                    for w in (0..=pos + 1).rev() {
                        let carry = if w > 0 { poly[w - 1] * one } else { 0.0 };
                        poly[w] = poly[w] * zero + carry;
                    }
                }
                f.members().iter().map(|&k| poly[d - k as usize]).sum()
            })
            .collect();
        fill_by_distance(self.size, &self.g, &table)
    }

    /// Sum of outer products of the numerical eigenvectors of the filled modes.
    pub fn pi_f_spectral(&self, f: &FermiSet) -> DMatrix<f64> {
        let cols: Vec<usize> = (0..self.size).filter(|&j| f.contains(self.modes[j])).collect();
        if cols.is_empty() {
            return DMatrix::zeros(self.size, self.size);
        }
        let v = self.eigenvectors.select_columns(&cols);
        &v * v.transpose()
    }

    /// Correlation matrix of the ground state with Fermi set `f`.
    pub fn pi_f(&self, f: &FermiSet) -> Result<DenseProjector> {
        if let Some(&k) = f.members().last() {
            self.g.check_mode(k)?;
        }
        let product = self.pi_f_product(f);
        let spectral = self.pi_f_spectral(f);
        let gap = (&product - &spectral).amax();
        if gap > CONSTRUCTION_TOL {
            return Err(Error::Internal(format!("correlation-matrix constructions differ by {gap:e}")));
        }
        Ok(DenseProjector { matrix: product, d: self.g.d(), q: self.g.q() })
    }
}

/// Correlation matrix `pi_F` on `H(d, q)`.
pub fn build_pi_f(f: &FermiSet, g: &GraphParams, cfg: &OracleConfig) -> Result<DenseProjector> {
    OracleGraph::new(g, cfg)?.pi_f(f)
}

/// A set of distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSubset {
    g: GraphParams,
    indices: Vec<usize>,
}

impl VertexSubset {
    pub fn new(words: &[Vec<u32>], g: &GraphParams) -> Result<VertexSubset> {
        let mut indices = words.iter().map(|w| vertex_index(w, g)).collect::<Result<Vec<_>>>()?;
        let before = indices.len();
        indices.sort_unstable();
        indices.dedup();
        if indices.len() != before {
            return domain("vertex subset contains duplicates");
        }
        Ok(VertexSubset { g: *g, indices })
    }

    /// Union of the blocks whose first `r` letters all equal `j < n`.
    pub fn from_spec(s: &SubsystemSpec, g: &GraphParams) -> Result<VertexSubset> {
        SubsystemSpec::new(s.n(), s.r(), g)?;
        let total = g.vertex_count_u64().ok_or_else(|| Error::Domain("graph too large to enumerate".into()))?;
        let r = s.r() as usize;
        let indices = (0..total as usize)
            .filter(|&idx| {
                let w = vertex_word(idx, g);
                w[0] < s.n() && w[..r].iter().all(|&x| x == w[0])
            })
            .collect();
        Ok(VertexSubset { g: *g, indices })
    }

    pub fn complement(&self) -> VertexSubset {
        let total = self.g.vertex_count_u64().unwrap_or(0) as usize;
        let mut it = self.indices.iter().peekable();
        let mut out = Vec::with_capacity(total - self.indices.len());
        for idx in 0..total {
            if it.peek() == Some(&&idx) {
                it.next();
            } else {
                out.push(idx);
            }
        }
        VertexSubset { g: self.g, indices: out }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn words(&self) -> Vec<Vec<u32>> {
        self.indices.iter().map(|&i| vertex_word(i, &self.g)).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Diagonal projector onto a vertex subset.
pub fn build_pi_a(subset: &VertexSubset, cfg: &OracleConfig) -> Result<DenseProjector> {
    let g = subset.g;
    let size = cfg.admit(&g)?;
    let mut m = DMatrix::zeros(size, size);
    for &i in subset.indices() {
        m[(i, i)] = 1.0;
    }
    Ok(DenseProjector { matrix: m, d: g.d(), q: g.q() })
}

/// Principal submatrix of `pi_F` on the subset, i.e. `pi_A pi_F pi_A`
/// restricted to the support of `pi_A`.
pub fn restrict(pi_f: &DenseProjector, subset: &VertexSubset) -> DMatrix<f64> {
    pi_f.matrix.select_rows(subset.indices()).select_columns(subset.indices())
}

/// Chopped correlation matrix of the blocks `s`.
pub fn chopped_correlation(f: &FermiSet, s: &SubsystemSpec, g: &GraphParams, cfg: &OracleConfig) -> Result<DMatrix<f64>> {
    let pi_f = build_pi_f(f, g, cfg)?;
    Ok(restrict(&pi_f, &VertexSubset::from_spec(s, g)?))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn numeric_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return domain("matrix is not square");
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let asym = (m - m.transpose()).amax();
    if asym > INPUT_SYMMETRY_TOL {
        return domain(format!("matrix is not symmetric (deviation {asym:e})"));
    }
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sum_j s(x_j)` over numeric occupation eigenvalues; values within
/// [`SPECTRUM_TOL`] of `[0, 1]` are clamped.
pub fn oracle_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &x in eigenvalues {
        if !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&x) {
            return domain(format!("occupation eigenvalue {x} outside [0, 1]"));
        }
        let x = x.clamp(0.0, 1.0);
        total += binary_entropy_pair(x, 1.0 - x);
    }
    Ok(total)
}

/// Groups a sorted list into runs separated by more than `gap`; returns
/// `(mean, count)` per run.
pub fn cluster(sorted: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &x in sorted {
        match out.last_mut() {
            Some((sum, count)) if x - prev <= gap => {
                *sum += x;
                *count += 1;
            }
            _ => out.push((x, 1)),
        }
        prev = x;
    }
    out.into_iter().map(|(sum, count)| (sum / count as f64, count)).collect()
}

/// Outcome of comparing one closed-form instance against the oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub d: u32,
    pub q: u32,
    pub n: u32,
    pub r: u32,
    pub fermi: Vec<u32>,
    pub subsystem_size: usize,
    /// Largest gap between sorted closed-form and numeric eigenvalues.
    pub spectrum_deviation: f64,
    /// Same number of eigenvalue clusters with the same sizes.
    pub multiplicities_match: bool,
    pub clusters: usize,
    pub entropy_closed: f64,
    pub entropy_oracle: f64,
    /// `|S_closed - S_oracle| / max(S_closed, 1)`.
    pub entropy_deviation: f64,
    pub trace_closed: f64,
    pub trace_oracle: f64,
    pub trace_deviation: f64,
    pub passed: bool,
}

fn corrupt(spectrum: &mut [SpectrumEntry], by: f64) {
    for e in spectrum.iter_mut() {
        let shift = if e.lambda + by <= 1.0 { by } else { -by };
        e.lambda += shift;
        e.complement -= shift;
    }
}

/// Certifies one instance on a prepared graph and correlation matrix.
/// `corruption` shifts every closed-form eigenvalue and exists to check that
/// the comparison can fail.
pub fn certify_prepared(
    pi_f: &DenseProjector,
    s: &SubsystemSpec,
    f: &FermiSet,
    g: &GraphParams,
    corruption: f64,
) -> Result<CertifyReport> {
    let subset = VertexSubset::from_spec(s, g)?;
    let numeric = numeric_spectrum(&restrict(pi_f, &subset))?;

    let mut spectrum = chopped_spectrum(s, f, g)?;
    if corruption != 0.0 {
        corrupt(&mut spectrum, corruption);
    }
    let closed = expand_spectrum(&spectrum)?;

    let spectrum_deviation = if closed.len() == numeric.len() {
        closed.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let cc = cluster(&closed, CLUSTER_GAP);
    let cn = cluster(&numeric, CLUSTER_GAP);
    let multiplicities_match = cc.len() == cn.len()
        && cc.iter().zip(&cn).all(|(a, b)| a.1 == b.1 && (a.0 - b.0).abs() < SPECTRUM_TOL);

    let entropy_closed = if corruption != 0.0 {
        entropy_from_spectrum(&spectrum)?.value_log.to_f64()
    } else {
        entropy(s, f, g)?.value_log.to_f64()
    };
    let entropy_oracle = oracle_entropy(&numeric)?;
    let entropy_deviation = (entropy_closed - entropy_oracle).abs() / entropy_closed.abs().max(1.0);

    let trace_closed: f64 = spectrum
        .iter()
        .map(|e| e.lambda * e.multiplicity.to_f64().unwrap_or(f64::INFINITY))
        .sum();
    let trace_oracle: f64 = numeric.iter().sum();
    let trace_direct: f64 = subset.indices().iter().map(|&i| pi_f.matrix[(i, i)]).sum();
    let trace_deviation = (trace_closed - trace_direct).abs().max((trace_oracle - trace_direct).abs());

    let passed = spectrum_deviation < SPECTRUM_TOL
        && multiplicities_match
        && entropy_deviation < ENTROPY_TOL
        && trace_deviation < TRACE_TOL * trace_direct.abs().max(1.0);
    Ok(CertifyReport {
        d: g.d(),
        q: g.q(),
        n: s.n(),
        r: s.r(),
        fermi: f.members().to_vec(),
        subsystem_size: subset.len(),
        spectrum_deviation,
        multiplicities_match,
        clusters: cn.len(),
        entropy_closed,
        entropy_oracle,
        entropy_deviation,
        trace_closed,
        trace_oracle: trace_direct,
        trace_deviation,
        passed,
    })
}

/// Certifies the closed-form spectrum and entropy of one instance.
pub fn certify(s: &SubsystemSpec, f: &FermiSet, g: &GraphParams, cfg: &OracleConfig) -> Result<CertifyReport> {
    let pi_f = build_pi_f(f, g, cfg)?;
    certify_prepared(&pi_f, s, f, g, 0.0)
}

/// One oracle instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub g: GraphParams,
    pub s: SubsystemSpec,
    pub f: FermiSet,
}

const SINGLE_LETTER_MAX_Q: u32 = 32;

/// Which graphs the exhaustive enumeration visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFilter {
    /// Largest vertex count `q^d`.
    pub cap: u64,
    /// Largest alphabet size.
    pub max_q: u32,
}

impl InstanceFilter {
    /// Alphabet bound `max(floor(sqrt(cap)), min(cap, 32))`: every graph with
    /// at least two letters per word, plus single-letter graphs up to 32
    /// symbols (all of them for small caps).
    pub fn with_cap(cap: u64) -> InstanceFilter {
        let sqrt = (cap as f64).sqrt().floor() as u32;
        let single = cap.min(SINGLE_LETTER_MAX_Q as u64) as u32;
        InstanceFilter { cap, max_q: sqrt.max(single) }
    }

    /// All `(d, q)` in the filter, ordered by `d` then `q`.
    pub fn graphs(&self) -> Vec<GraphParams> {
        let mut out = Vec::new();
        for d in 1u32.. {
            if 2u64.checked_pow(d).is_none_or(|v| v > self.cap) {
                break;
            }
            for q in 2..=self.max_q {
                match (q as u64).checked_pow(d) {
                    Some(v) if v <= self.cap => out.push(GraphParams::new(d, q).expect("valid")),
                    _ => break,
                }
            }
        }
        out
    }

    /// Every `(n, r, k0)` with contiguous Fermi set on every graph.
    pub fn contiguous_instances(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for g in self.graphs() {
            for n in 1..=g.q() {
                for r in 1..=g.d() {
                    for k0 in 0..=g.d() {
                        out.push(Instance {
                            g,
                            s: SubsystemSpec::new(n, r, &g).expect("valid"),
                            f: FermiSet::contiguous(Some(k0), &g).expect("valid"),
                        });
                    }
                }
            }
        }
        out
    }

    /// `count` random instances with non-contiguous Fermi sets, reproducible
    /// from `seed`.
    pub fn random_noncontiguous_instances(&self, count: usize, seed: u64) -> Vec<Instance> {
        let graphs = self.graphs();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count && !graphs.is_empty() {
            let g = graphs[rng.gen_range(0..graphs.len())];
            let members: Vec<u32> = (0..=g.d()).filter(|_| rng.gen_bool(0.5)).collect();
            let Ok(f) = FermiSet::from_members(members, &g) else { continue };
            if f.is_empty() || f.contiguous_k0().is_some() {
                continue;
            }
            let n = rng.gen_range(1..=g.q());
            let r = rng.gen_range(1..=g.d());
            out.push(Instance { g, s: SubsystemSpec::new(n, r, &g).expect("valid"), f });
        }
        out
    }
}

/// Certifies many instances. Graphs are diagonalized once and processed in
/// parallel; reports come back in input order.
pub fn certify_instances(instances: &[Instance], cfg: &OracleConfig, corruption: f64) -> Result<Vec<CertifyReport>> {
    let mut order: Vec<GraphParams> = Vec::new();
    let mut by_graph: HashMap<GraphParams, Vec<usize>> = HashMap::new();
    for (i, inst) in instances.iter().enumerate() {
        by_graph.entry(inst.g).or_insert_with(|| {
            order.push(inst.g);
            Vec::new()
        });
        by_graph.get_mut(&inst.g).expect("inserted").push(i);
    }
    let groups: Vec<Vec<(usize, CertifyReport)>> = order
        .par_iter()
        .map(|g| -> Result<Vec<(usize, CertifyReport)>> {
            let graph = OracleGraph::new(g, cfg)?;
            let mut cache: HashMap<Vec<u32>, DenseProjector> = HashMap::new();
            let mut out = Vec::new();
            for &i in &by_graph[g] {
                let inst = &instances[i];
                let key = inst.f.members().to_vec();
                if !cache.contains_key(&key) {
                    cache.insert(key.clone(), graph.pi_f(&inst.f)?);
                }
                out.push((i, certify_prepared(&cache[&key], &inst.s, &inst.f, g, corruption)?));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut reports: Vec<Option<CertifyReport>> = vec![None; instances.len()];
    for (i, rep) in groups.into_iter().flatten() {
        reports[i] = Some(rep);
    }
    Ok(reports.into_iter().map(|r| r.expect("every instance certified")).collect())
}

//! Leading-order asymptotics and the scaling fits built on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::{entropy_closed_form, i2_bracket, i3_bracket};
use crate::model::GraphParams;
use crate::specfun::{binary_entropy, binary_entropy_pair, LogValue};
use crate::subsystem::{subsystem_geometry, BoundaryCoefficients, SubsystemSpec};

/// `q / sqrt(2 pi (q-1))`, the Gaussian weight of the boundary bands.
pub fn band_prefactor(q: u32) -> f64 {
    q as f64 / (2.0 * std::f64::consts::PI * (q - 1) as f64).sqrt()
}

/// `q^(d-r) d^(-1/2) * coeff` as a log value.
fn scaled(coeff: f64, r: u32, g: &GraphParams) -> LogValue {
    let ln_base = (g.d() - r) as f64 * (g.q() as f64).ln() - 0.5 * (g.d() as f64).ln();
    LogValue::from_f64(coeff) * LogValue::from_ln(ln_base)
}

/// Leading behaviour of the entropy of `n` blocks at distance one with
/// `k0 = d / q`.
pub fn asymptotic_entropy_r1(n: u32, g: &GraphParams) -> Result<LogValue> {
    SubsystemSpec::new(n, 1, g)?;
    if !g.d().is_multiple_of(g.q()) {
        return domain(format!("d={} must be a multiple of q={}", g.d(), g.q()));
    }
    let q = g.q();
    let coeff = band_prefactor(q) * binary_entropy((q - n) as f64 / q as f64)?;
    Ok(scaled(coeff, 1, g))
}

fn check_blocks(n: u32, q: u32, r: u32) -> Result<()> {
    if q < 2 {
        return domain(format!("q={q} must be at least 2"));
    }
    if n == 0 || n > q {
        return domain(format!("n={n} must lie in 1..={q}"));
    }
    if r == 0 {
        return domain("r must be positive");
    }
    Ok(())
}

/// Sum of the `r` band entropies of `n` blocks, times the Gaussian weight.
pub fn f_coefficient(n: u32, q: u32, r: u32) -> Result<f64> {
    check_blocks(n, q, r)?;
    let table = BoundaryCoefficients::new(q, r)?;
    let mut sum = 0.0;
    for i in 1..=r {
        let (x0, y0) = table.pair(i, 0, n)?;
        sum += binary_entropy_pair(x0, y0);
        if n > 1 {
            let (x1, y1) = table.pair(i, 1, n)?;
            sum += (n - 1) as f64 * binary_entropy_pair(x1, y1);
        }
    }
    Ok(band_prefactor(q) * sum)
}

/// `q^(d-r) d^(-1/2) f(n, q, r)`.
pub fn asymptotic_entropy_finite_r(n: u32, q: u32, r: u32, d: u32) -> Result<LogValue> {
    let g = GraphParams::new(d, q)?;
    SubsystemSpec::new(n, r, &g)?;
    Ok(scaled(f_coefficient(n, q, r)?, r, &g))
}

/// Mutual-information coefficient: `I_2 ~ q^(d-r) d^(-1/2) g2(q, r)`.
pub fn g2_coefficient(q: u32, r: u32) -> Result<f64> {
    check_blocks(2, q, r)?;
    let table = BoundaryCoefficients::new(q, r)?;
    let mut sum = 0.0;
    for i in 1..=r {
        sum += i2_bracket(&table, i)?;
    }
    Ok(band_prefactor(q) * sum)
}

/// Tripartite coefficient: `I_3 ~ q^(d-r) d^(-1/2) g3(q, r)`.
pub fn g3_coefficient(q: u32, r: u32) -> Result<f64> {
    if q == 2 {
        return Err(Error::UnsupportedGeometry("tripartite undefined for q=2".into()));
    }
    check_blocks(3, q, r)?;
    let table = BoundaryCoefficients::new(q, r)?;
    let mut sum = 0.0;
    for i in 1..=r {
        sum += i3_bracket(&table, i)?;
    }
    Ok(band_prefactor(q) * sum)
}

/// Ordinary least squares line `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Root mean square of the residuals.
    pub rms: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return domain("x and y samples differ in length");
    }
    if xs.len() < 3 {
        return domain(format!("need at least 3 samples, got {}", xs.len()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return domain("non-finite sample");
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return domain("all x samples coincide");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, r_squared, rms: (sse / m).sqrt() })
}

/// Exact entropy at one grid point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EntropySample {
    pub d: u32,
    pub r: u32,
    pub n: u32,
    pub q: u32,
    pub entropy: LogValue,
}

impl EntropySample {
    /// `S / V_A`.
    pub fn per_volume(&self) -> Result<f64> {
        let g = GraphParams::new(self.d, self.q)?;
        let s = SubsystemSpec::new(self.n, self.r, &g)?;
        Ok(self.entropy.ratio(&subsystem_geometry(&s, &g)?.volume))
    }

    /// `S / (V_A (r/d)^(1/2))`.
    pub fn per_volume_sqrt_ratio(&self) -> Result<f64> {
        Ok(self.per_volume()? / (self.r as f64 / self.d as f64).sqrt())
    }
}

/// Fermi momentum used by the scaling sweeps: `floor(d / q)`, the half
/// filling of the nearest-neighbour model at zero chemical potential.
pub fn sweep_k0(d: u32, q: u32) -> u32 {
    d / q
}

/// Exact entropy with `k0 = floor(d / q)`.
pub fn exact_sample(d: u32, r: u32, n: u32, q: u32) -> Result<EntropySample> {
    let g = GraphParams::new(d, q)?;
    let s = SubsystemSpec::new(n, r, &g)?;
    let entropy = entropy_closed_form(&s, Some(sweep_k0(d, q)), &g)?.value_log;
    Ok(EntropySample { d, r, n, q, entropy })
}

/// Grid of the large-`d`, fixed-`r` fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitGrid {
    pub r: Vec<u32>,
    pub d_over_r: Vec<u32>,
    pub n: Vec<u32>,
    pub q: Vec<u32>,
}

impl Default for FitGrid {
    fn default() -> FitGrid {
        FitGrid {
            r: vec![100, 200, 400, 600],
            d_over_r: vec![20, 40, 80, 160],
            n: vec![1, 2, 3],
            q: vec![3, 4, 5],
        }
    }
}

impl FitGrid {
    /// Exact samples in lexicographic `(r, d/r, n, q)` order; points with
    /// `n > q` are skipped.
    pub fn samples(&self) -> Result<Vec<EntropySample>> {
        let mut points = Vec::new();
        for &r in &self.r {
            for &ratio in &self.d_over_r {
                for &n in &self.n {
                    for &q in &self.q {
                        if n <= q {
                            let d = r.checked_mul(ratio).ok_or_else(|| Error::Domain("d overflows".into()))?;
                            points.push((d, r, n, q));
                        }
                    }
                }
            }
        }
        points.into_par_iter().map(|(d, r, n, q)| exact_sample(d, r, n, q)).collect()
    }
}

/// Result of fitting `S / (V_A (r/d)^(1/2)) = beta - gamma (r/d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub beta: f64,
    pub gamma: f64,
    pub residual: f64,
    pub sample_range: String,
}

pub fn fit_beta_gamma(samples: &[EntropySample]) -> Result<ScalingFit> {
    if samples.len() < 3 {
        return domain(format!("need at least 3 samples, got {}", samples.len()));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.r as f64 / s.d as f64).collect();
    let ys = samples.iter().map(|s| s.per_volume_sqrt_ratio()).collect::<Result<Vec<_>>>()?;
    let fit = linear_fit(&xs, &ys)?;
    let range = |f: fn(&EntropySample) -> u32| {
        let lo = samples.iter().map(f).min().unwrap_or(0);
        let hi = samples.iter().map(f).max().unwrap_or(0);
        format!("{lo}..={hi}")
    };
    let sample_range = format!(
        "{} samples, d {}, r {}, n {}, q {}",
        samples.len(),
        range(|s| s.d),
        range(|s| s.r),
        range(|s| s.n),
        range(|s| s.q)
    );
    Ok(ScalingFit { beta: fit.intercept, gamma: -fit.slope, residual: fit.rms, sample_range })
}

/// Exact entropy on the line `r = (1 - delta) d`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VolumeSample {
    pub d: u32,
    pub delta: f64,
    pub n: u32,
    pub q: u32,
    pub entropy: LogValue,
}

/// `r = round((1 - delta) d)`.
pub fn separation_for(d: u32, delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("delta={delta} must lie strictly between 0 and 1"));
    }
    let r = ((1.0 - delta) * d as f64).round() as u32;
    if r == 0 || r > d {
        return domain(format!("delta={delta} leaves no valid separation at d={d}"));
    }
    Ok(r)
}

pub fn volume_sample(d: u32, delta: f64, n: u32, q: u32) -> Result<VolumeSample> {
    let r = separation_for(d, delta)?;
    let e = exact_sample(d, r, n, q)?;
    Ok(VolumeSample { d, delta, n, q, entropy: e.entropy })
}

/// Samples over `d x n x q` in lexicographic order.
pub fn volume_samples(delta: f64, ds: &[u32], ns: &[u32], qs: &[u32]) -> Result<Vec<VolumeSample>> {
    let mut points = Vec::new();
    for &d in ds {
        for &n in ns {
            for &q in qs {
                if n <= q {
                    points.push((d, n, q));
                }
            }
        }
    }
    points.into_par_iter().map(|(d, n, q)| volume_sample(d, delta, n, q)).collect()
}

/// Large-`d` estimate of `S / V_A` at fixed `delta` for one `(n, q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeLawGroup {
    pub n: u32,
    pub q: u32,
    pub d_last: u32,
    pub estimate: f64,
    /// `estimate - (S/V_A at d_last / 2)`, when that point was sampled.
    pub drift: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeLawEstimate {
    pub delta: f64,
    pub beta_tilde: f64,
    /// `beta_tilde / (1 - delta)^(1/2)`.
    pub normalized: f64,
    /// Largest absolute drift over the groups.
    pub max_drift: Option<f64>,
    pub groups: Vec<VolumeLawGroup>,
}

/// Volume-law coefficient: the last-point ratio `S / V_A` of every `(n, q)`
/// group, averaged over groups.
pub fn fit_beta_tilde(samples: &[VolumeSample]) -> Result<VolumeLawEstimate> {
    let Some(first) = samples.first() else {
        return domain("no samples");
    };
    let delta = first.delta;
    if samples.iter().any(|s| s.delta != delta) {
        return domain("samples mix several values of delta");
    }
    let mut keys: Vec<(u32, u32)> = samples.iter().map(|s| (s.n, s.q)).collect();
    keys.sort_unstable();
    keys.dedup();
    let ratio = |s: &VolumeSample| -> Result<f64> {
        let r = separation_for(s.d, s.delta)?;
        EntropySample { d: s.d, r, n: s.n, q: s.q, entropy: s.entropy }.per_volume()
    };
    let mut groups = Vec::with_capacity(keys.len());
    for (n, q) in keys {
        let mut pts: Vec<&VolumeSample> = samples.iter().filter(|s| s.n == n && s.q == q).collect();
        pts.sort_by_key(|s| s.d);
        let last = pts[pts.len() - 1];
        let estimate = ratio(last)?;
        let half = pts.iter().find(|s| 2 * s.d == last.d);
        let drift = match half {
            Some(h) => Some(estimate - ratio(h)?),
            None => None,
        };
        groups.push(VolumeLawGroup { n, q, d_last: last.d, estimate, drift });
    }
    let beta_tilde = groups.iter().map(|g| g.estimate).sum::<f64>() / groups.len() as f64;
    let max_drift = groups.iter().filter_map(|g| g.drift.map(f64::abs)).reduce(f64::max);
    Ok(VolumeLawEstimate { delta, beta_tilde, normalized: beta_tilde / (1.0 - delta).sqrt(), max_drift, groups })
}

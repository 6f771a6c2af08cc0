//! `hamming certify`: closed forms against dense diagonalization.

use hamming_entanglement::oracle::{certify_instances, CertifyReport, InstanceFilter, OracleConfig, CAP_ENV};
use serde::Serialize;

use crate::args::CertifyArgs;
use crate::{CliError, CliResult};

/// Cap used when neither `--cap` nor the environment sets one.
pub const DEFAULT_CLI_CAP: u64 = 1024;

const LISTED_FAILURES: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub cap: u64,
    pub max_q: u32,
    pub graphs: usize,
    pub contiguous: usize,
    pub noncontiguous: usize,
    pub seed: u64,
    pub failures: usize,
    pub max_spectrum_deviation: f64,
    pub max_entropy_deviation: f64,
    pub max_trace_deviation: f64,
    pub multiplicity_mismatches: usize,
    pub passed: bool,
    pub failed_instances: Vec<CertifyReport>,
}

#[derive(Serialize)]
struct FullReport<'a> {
    summary: &'a Summary,
    reports: &'a [CertifyReport],
}

fn resolve_cap(flag: Option<u64>) -> CliResult<u64> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    if std::env::var_os(CAP_ENV).is_some() {
        return Ok(OracleConfig::from_env()?.cap);
    }
    Ok(DEFAULT_CLI_CAP)
}

/// Runs the certification and returns the summary plus every report.
pub fn certify_all(a: &CertifyArgs) -> CliResult<(Summary, Vec<CertifyReport>)> {
    let cap = resolve_cap(a.cap)?;
    let filter = InstanceFilter::with_cap(cap);
    let mut instances = filter.contiguous_instances();
    let contiguous = instances.len();
    instances.extend(filter.random_noncontiguous_instances(a.noncontiguous, a.seed));
    let noncontiguous = instances.len() - contiguous;
    let reports = certify_instances(&instances, &OracleConfig::with_cap(cap), a.corrupt)?;
    let max = |f: fn(&CertifyReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
    let failed: Vec<CertifyReport> = reports.iter().filter(|r| !r.passed).cloned().collect();
    let summary = Summary {
        cap,
        max_q: filter.max_q,
        graphs: filter.graphs().len(),
        contiguous,
        noncontiguous,
        seed: a.seed,
        failures: failed.len(),
        max_spectrum_deviation: max(|r| r.spectrum_deviation),
        max_entropy_deviation: max(|r| r.entropy_deviation),
        max_trace_deviation: max(|r| r.trace_deviation),
        multiplicity_mismatches: reports.iter().filter(|r| !r.multiplicities_match).count(),
        passed: failed.is_empty() && !reports.is_empty(),
        failed_instances: failed.into_iter().take(LISTED_FAILURES).collect(),
    };
    Ok((summary, reports))
}

/// Returns the summary line to print and whether every instance passed.
pub fn run(a: &CertifyArgs) -> CliResult<(String, bool)> {
    let (summary, reports) = certify_all(a)?;
    let ser = |e: serde_json::Error| CliError::failure(format!("serializing report: {e}"));
    if let Some(path) = &a.report {
        let full = serde_json::to_vec_pretty(&FullReport { summary: &summary, reports: &reports }).map_err(ser)?;
        std::fs::write(path, full).map_err(|e| CliError::usage(format!("writing {}: {e}", path.display())))?;
    }
    Ok((serde_json::to_string(&summary).map_err(ser)?, summary.passed))
}

//! `hamming compute`: one measure at one point, printed as a JSON record.

use serde::Serialize;

use crate::args::{ComputeArgs, Measure};
use crate::eval::{evaluate, Evaluation, FermiChoice, ModelSpec, Point};
use crate::{CliError, CliResult};

#[derive(Serialize)]
struct Inputs<'a> {
    model: &'a ModelSpec,
    d: Option<u32>,
    q: u32,
    n: u32,
    r: u32,
}

#[derive(Serialize)]
struct Record<'a> {
    measure: &'static str,
    inputs: Inputs<'a>,
    #[serde(flatten)]
    result: Evaluation,
}

pub fn point_from_args(a: &ComputeArgs) -> Point {
    let fermi = match (&a.fermi_set, a.k0) {
        (Some(m), _) => FermiChoice::Members(m.clone()),
        (None, Some(k0)) => FermiChoice::K0(k0),
        (None, None) => FermiChoice::Model,
    };
    let n = match a.measure {
        Measure::Mutual => 2,
        Measure::Tripartite => 3,
        _ => a.n,
    };
    Point {
        measure: a.measure,
        model: ModelSpec { kind: a.model, alpha0: a.alpha0, c: a.c, alphas: a.alphas.clone() },
        fermi,
        d: a.d,
        q: a.q,
        n,
        r: a.r,
        delta: None,
        bits: a.bits,
    }
}

/// Evaluates the point and returns the JSON line to print.
pub fn run(a: &ComputeArgs) -> CliResult<String> {
    let p = point_from_args(a);
    let result = evaluate(&p)?;
    let record = Record {
        measure: p.measure.name(),
        inputs: Inputs { model: &p.model, d: p.d, q: p.q, n: p.n, r: p.r },
        result,
    };
    serde_json::to_string(&record).map_err(|e| CliError::failure(format!("serializing record: {e}")))
}

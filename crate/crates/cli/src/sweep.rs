//! `hamming sweep`: a measure over a parameter grid, written as CSV or JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{Format, Measure, ModelKind, SweepArgs};
use crate::eval::{evaluate, Evaluation, FermiChoice, ModelSpec, Point, NORMALIZATIONS};
use crate::{CliError, CliResult, Exit};

pub const SCHEMA: u32 = 1;

/// How the Fermi set of each grid point is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FermiPolicy {
    /// Ground state of the configured hopping model.
    Model,
    /// `{0, ..., d/q}`; every `d` must be a multiple of `q`.
    DOverQ,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default)]
    pub alpha0: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    pub alphas: Option<Vec<f64>>,
}

fn default_c() -> f64 {
    20.0
}

impl Default for ModelConfig {
    fn default() -> ModelConfig {
        ModelConfig { kind: ModelKind::Nn, alpha0: 0.0, c: default_c(), alphas: None }
    }
}

/// Grid axes. Exactly one of `r` and `delta` is used; `alpha0`, when given,
/// replaces the model's value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub d: Vec<u32>,
    pub q: Vec<u32>,
    #[serde(default = "one")]
    pub n: Vec<u32>,
    #[serde(default)]
    pub r: Vec<u32>,
    #[serde(default)]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub alpha0: Vec<f64>,
}

fn one() -> Vec<u32> {
    vec![1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub measure: Measure,
    #[serde(default = "default_format")]
    pub format: Format,
    pub output: Option<PathBuf>,
    #[serde(default = "default_fermi")]
    pub fermi: FermiPolicy,
    #[serde(default)]
    pub bits: bool,
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
    #[serde(default)]
    pub model: ModelConfig,
    pub grid: Grid,
}

fn default_format() -> Format {
    Format::Csv
}

fn default_fermi() -> FermiPolicy {
    FermiPolicy::Model
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> CliResult<SweepConfig> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("invalid sweep config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<SweepConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("reading {}: {e}", path.display())))?;
        SweepConfig::from_toml(&text)
    }

    fn check(&self) -> CliResult<()> {
        let g = &self.grid;
        if g.q.is_empty() || g.n.is_empty() {
            return Err(CliError::usage("grid.q and grid.n must be non-empty"));
        }
        if g.r.is_empty() == g.delta.is_empty() {
            return Err(CliError::usage("give exactly one of grid.r and grid.delta"));
        }
        if self.measure.uses_graph() {
            if g.d.is_empty() {
                return Err(CliError::usage(format!("measure {} needs grid.d", self.measure.name())));
            }
        } else {
            if !g.d.is_empty() {
                return Err(CliError::usage(format!("measure {} does not depend on d; drop grid.d", self.measure.name())));
            }
            if !g.delta.is_empty() {
                return Err(CliError::usage("grid.delta needs a graph measure"));
            }
        }
        Ok(())
    }

    fn alpha0s(&self) -> Vec<f64> {
        if self.grid.alpha0.is_empty() {
            vec![self.model.alpha0]
        } else {
            self.grid.alpha0.clone()
        }
    }

    /// Grid points in lexicographic `(d, q, n, r | delta, alpha0)` order.
    pub fn points(&self) -> CliResult<Vec<GridPoint>> {
        self.check()?;
        let ds: Vec<Option<u32>> =
            if self.measure.uses_graph() { self.grid.d.iter().copied().map(Some).collect() } else { vec![None] };
        let seps: Vec<Separation> = if self.grid.delta.is_empty() {
            self.grid.r.iter().map(|&r| Separation::R(r)).collect()
        } else {
            self.grid.delta.iter().map(|&x| Separation::Delta(x)).collect()
        };
        let fermi = match self.fermi {
            FermiPolicy::Model => FermiChoice::Model,
            FermiPolicy::DOverQ => FermiChoice::DOverQ,
        };
        let mut out = Vec::new();
        for &d in &ds {
            for &q in &self.grid.q {
                for &n in &self.grid.n {
                    for &sep in &seps {
                        for alpha0 in self.alpha0s() {
                            let (r, delta) = match sep {
                                Separation::R(r) => (Some(r), None),
                                Separation::Delta(x) => (d.and_then(|d| separation(d, x)), Some(x)),
                            };
                            out.push(GridPoint {
                                point: Point {
                                    measure: self.measure,
                                    model: ModelSpec {
                                        kind: self.model.kind,
                                        alpha0,
                                        c: self.model.c,
                                        alphas: self.model.alphas.clone(),
                                    },
                                    fermi: fermi.clone(),
                                    d,
                                    q,
                                    n,
                                    r: r.unwrap_or(0),
                                    delta,
                                    bits: self.bits,
                                },
                                invalid_delta: r.is_none(),
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn meta(&self) -> Meta {
        let m = &self.model;
        Meta {
            schema: SCHEMA,
            measure: self.measure.name(),
            model: format!(
                "{} alpha0={} c={}{}",
                kind_name(m.kind),
                m.alpha0,
                m.c,
                m.alphas.as_ref().map(|a| format!(" alphas={a:?}")).unwrap_or_default()
            ),
            fermi: match self.fermi {
                FermiPolicy::Model => "model",
                FermiPolicy::DOverQ => "d_over_q",
            },
            units: if !self.measure.is_entropic() {
                "none"
            } else if self.bits {
                "bits"
            } else {
                "nats"
            },
            columns: columns(),
        }
    }
}

fn kind_name(k: ModelKind) -> &'static str {
    match k {
        ModelKind::Nn => "nn",
        ModelKind::Lr => "lr",
        ModelKind::Explicit => "explicit",
    }
}

#[derive(Clone, Copy, Debug)]
enum Separation {
    R(u32),
    Delta(f64),
}

/// `r = round((1 - delta) d)` when it lies in `1..=d`.
fn separation(d: u32, delta: f64) -> Option<u32> {
    hamming_entanglement::asymptotics::separation_for(d, delta).ok()
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub point: Point,
    invalid_delta: bool,
}

/// One output row.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub d: Option<u32>,
    pub q: u32,
    pub n: u32,
    pub r: Option<u32>,
    pub delta: Option<f64>,
    pub alpha0: Option<f64>,
    pub k0: Option<u32>,
    pub sign: Option<i8>,
    pub measure_log10: Option<f64>,
    pub value: Option<f64>,
    pub normalizations: Vec<Option<f64>>,
    pub error: Option<String>,
}

impl Row {
    fn new(gp: &GridPoint, result: Result<Evaluation, String>) -> Row {
        let p = &gp.point;
        let uses_model = p.measure.uses_graph() && p.fermi == FermiChoice::Model && p.model.kind != ModelKind::Explicit;
        let mut row = Row {
            d: p.d,
            q: p.q,
            n: p.n,
            r: (!gp.invalid_delta).then_some(p.r),
            delta: p.delta,
            alpha0: uses_model.then_some(p.model.alpha0),
            k0: None,
            sign: None,
            measure_log10: None,
            value: None,
            normalizations: vec![None; NORMALIZATIONS.len()],
            error: None,
        };
        match result {
            Ok(e) => {
                row.k0 = e.k0;
                row.sign = Some(e.sign);
                row.measure_log10 = Some(e.log10.unwrap_or(f64::NEG_INFINITY));
                row.value = e.value;
                for (slot, key) in row.normalizations.iter_mut().zip(NORMALIZATIONS) {
                    *slot = e.normalizations.get(key).copied();
                }
            }
            Err(msg) => row.error = Some(msg),
        }
        row
    }

    fn csv_record(&self) -> Vec<String> {
        let int = |x: Option<u32>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut rec = vec![
            int(self.d),
            self.q.to_string(),
            self.n.to_string(),
            int(self.r),
            num(self.delta),
            num(self.alpha0),
            int(self.k0),
            self.sign.map(|s| s.to_string()).unwrap_or_default(),
            num(self.measure_log10),
            num(self.value),
        ];
        rec.extend(self.normalizations.iter().map(|&x| num(x)));
        rec.push(self.error.clone().unwrap_or_default());
        rec
    }

    fn json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        let mut put = |k: &str, v: serde_json::Value| {
            obj.insert(k.to_string(), v);
        };
        put("d", serde_json::json!(self.d));
        put("q", serde_json::json!(self.q));
        put("n", serde_json::json!(self.n));
        put("r", serde_json::json!(self.r));
        put("delta", serde_json::json!(self.delta));
        put("alpha0", serde_json::json!(self.alpha0));
        put("k0", serde_json::json!(self.k0));
        put("sign", serde_json::json!(self.sign));
        put("measure_log10", serde_json::json!(self.measure_log10.filter(|x| x.is_finite())));
        put("value", serde_json::json!(self.value));
        for (key, x) in NORMALIZATIONS.iter().zip(&self.normalizations) {
            put(key, serde_json::json!(x));
        }
        put("error", serde_json::json!(self.error));
        serde_json::Value::Object(obj)
    }
}

/// Seventeen significant digits, enough to round-trip every `f64`.
fn num(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(v) if v == f64::NEG_INFINITY => "-inf".into(),
        Some(v) if v == f64::INFINITY => "inf".into(),
        Some(v) => format!("{v:.16e}"),
    }
}

pub fn columns() -> Vec<String> {
    let mut c: Vec<String> = ["d", "q", "n", "r", "delta", "alpha0", "k0", "sign", "measure_log10", "value"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    c.extend(NORMALIZATIONS.iter().map(|s| s.to_string()));
    c.push("error".into());
    c
}

#[derive(Clone, Debug, Serialize)]
struct Meta {
    schema: u32,
    measure: &'static str,
    model: String,
    fermi: &'static str,
    units: &'static str,
    columns: Vec<String>,
}

/// Evaluates every grid point on a bounded pool; rows keep grid order.
pub fn evaluate_grid(cfg: &SweepConfig) -> CliResult<Vec<Row>> {
    let points = cfg.points()?;
    if points.is_empty() {
        return Err(CliError::usage("empty grid"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::failure(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|gp| {
                let result = if gp.invalid_delta {
                    Err(format!("delta={} leaves no valid separation", gp.point.delta.unwrap_or(f64::NAN)))
                } else {
                    evaluate(&gp.point).map_err(|e| e.to_string())
                };
                Row::new(gp, result)
            })
            .collect()
    }))
}

/// Renders rows in the requested format.
pub fn render(cfg: &SweepConfig, rows: &[Row], format: Format) -> CliResult<Vec<u8>> {
    let meta = cfg.meta();
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# schema={}", meta.schema)?;
            writeln!(out, "# measure={}", meta.measure)?;
            writeln!(out, "# model={}", meta.model)?;
            writeln!(out, "# fermi={}", meta.fermi)?;
            writeln!(out, "# units={}", meta.units)?;
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| CliError::failure(format!("writing csv: {e}"));
            w.write_record(&meta.columns).map_err(csv_err)?;
            for row in rows {
                w.write_record(row.csv_record()).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::failure(format!("writing csv: {e}")))
        }
        Format::Json => {
            let doc = serde_json::json!({
                "meta": meta,
                "rows": rows.iter().map(Row::json).collect::<Vec<_>>(),
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::failure(format!("writing json: {e}")))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Where the output went and how the command ends.
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub destination: Option<PathBuf>,
    pub rows: usize,
    pub failed: usize,
}

impl Outcome {
    pub fn exit(&self) -> Exit {
        if self.failed == self.rows {
            Exit::Usage
        } else {
            Exit::Ok
        }
    }
}

pub fn run(a: &SweepArgs) -> CliResult<Outcome> {
    let cfg = SweepConfig::load(&a.config)?;
    let format = a.format.unwrap_or(cfg.format);
    let rows = evaluate_grid(&cfg)?;
    let bytes = render(&cfg, &rows, format)?;
    let destination = match a.output.clone().or_else(|| cfg.output.clone()) {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) if p.is_relative() && a.output.is_none() => {
            Some(a.config.parent().map(|dir| dir.join(&p)).unwrap_or(p))
        }
        other => other,
    };
    if let Some(path) = &destination {
        std::fs::write(path, &bytes).map_err(|e| CliError::usage(format!("writing {}: {e}", path.display())))?;
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(Outcome { bytes, destination, rows: rows.len(), failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILLING: &str = r#"
measure = "filling"
[model]
kind = "nn"
[grid]
d = [4, 8]
q = [4]
r = [1]
alpha0 = [0.0, 1.0]
"#;

    #[test]
    fn grid_order_is_lexicographic() {
        let cfg = SweepConfig::from_toml(FILLING).unwrap();
        let pts = cfg.points().unwrap();
        let keys: Vec<(Option<u32>, f64)> = pts.iter().map(|p| (p.point.d, p.point.model.alpha0)).collect();
        assert_eq!(keys, vec![(Some(4), 0.0), (Some(4), 1.0), (Some(8), 0.0), (Some(8), 1.0)]);
    }

    #[test]
    fn invalid_points_become_error_rows() {
        let text = FILLING.replace("measure = \"filling\"", "measure = \"entropy\"").replace("r = [1]", "r = [1, 6]");
        let cfg = SweepConfig::from_toml(&text).unwrap();
        let rows = evaluate_grid(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        let bad: Vec<_> = rows.iter().filter(|r| r.error.is_some()).map(|r| (r.d, r.r)).collect();
        assert_eq!(bad, vec![(Some(4), Some(6)), (Some(4), Some(6))]);
    }

    #[test]
    fn coefficient_measures_reject_d() {
        let text = FILLING.replace("measure = \"filling\"", "measure = \"g2\"");
        assert!(SweepConfig::from_toml(&text).unwrap().points().is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 0.1 + 0.2] {
            assert_eq!(num(Some(x)).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(Some(f64::NEG_INFINITY)), "-inf");
    }
}

//! JSON input formats and versioned report envelopes.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gates::named_gate;
use crate::harness::{CertificateReport, CircuitPath, Normalization, Segment, Term};
use crate::spectrum::{boolean_embed, BooleanFunction};
use crate::tensor::{label_site, Operator, C64};

pub const SCHEMA: &str = "pauli-lens/1";

/// An operator given either as dense real/imaginary row arrays or as a
/// named gate placed on `targets`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorJson {
    Dense { d: usize, n: usize, re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>> },
    Gate { gate: String, targets: Vec<usize>, d: usize, n: usize },
}

impl OperatorJson {
    pub fn to_operator(&self) -> Result<Operator> {
        match self {
            OperatorJson::Dense { d, n, re, im } => {
                let rows = re.len();
                if re.iter().any(|r| r.len() != rows) {
                    return Err(Error::Argument("\"re\" must be a square array".into()));
                }
                if let Some(im) = im {
                    if im.len() != rows || im.iter().any(|r| r.len() != rows) {
                        return Err(Error::Argument("\"im\" must match the shape of \"re\"".into()));
                    }
                }
                let mat = DMatrix::from_fn(rows, rows, |r, c| {
                    C64::new(re[r][c], im.as_ref().map_or(0.0, |im| im[r][c]))
                });
                Operator::new(*d, *n, mat)
            }
            OperatorJson::Gate { gate, targets, d, n } => named_gate(gate, targets, *d, *n),
        }
    }

    pub fn from_operator(o: &Operator) -> OperatorJson {
        let m = o.matrix();
        let grid = |f: fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(m[(r, c)])).collect()).collect()
        };
        OperatorJson::Dense { d: o.d(), n: o.n(), re: grid(|z| z.re), im: Some(grid(|z| z.im)) }
    }
}

/// A ±1-valued Boolean function on `n` bits, embedded as `Σ_S f̂(S) X^S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BooleanJson {
    pub n: usize,
    pub table: Vec<i8>,
}

/// Input of the spectrum-style subcommands.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SpectrumInput {
    Operator(OperatorJson),
    Boolean(BooleanJson),
}

impl SpectrumInput {
    pub fn to_operator(&self) -> Result<Operator> {
        match self {
            SpectrumInput::Operator(o) => o.to_operator(),
            SpectrumInput::Boolean(b) => boolean_embed(&BooleanFunction::new(b.n, b.table.clone())?),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub support: Vec<usize>,
    pub h: OperatorJson,
    pub r: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentJson {
    pub duration: f64,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitPathJson {
    pub d: usize,
    pub n: usize,
    pub segments: Vec<SegmentJson>,
}

impl CircuitPathJson {
    pub fn to_path(&self, mode: Normalization) -> Result<CircuitPath> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let terms = seg
                .terms
                .iter()
                .map(|t| Term::new(self.d, self.n, t.support.clone(), t.h.to_operator()?, t.r, mode))
                .collect::<Result<Vec<_>>>()?;
            segments.push(Segment { duration: seg.duration, terms });
        }
        CircuitPath::new(self.d, self.n, segments)
    }

    pub fn from_path(p: &CircuitPath) -> CircuitPathJson {
        CircuitPathJson {
            d: p.d(),
            n: p.n(),
            segments: p
                .segments()
                .iter()
                .map(|s| SegmentJson {
                    duration: s.duration,
                    terms: s
                        .terms
                        .iter()
                        .map(|t| TermJson {
                            support: t.support.clone(),
                            h: OperatorJson::from_operator(&t.h),
                            r: t.r,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Input of `otoc`: `O_D(t) = U O_D U†` (identity evolution when absent),
/// an optional probe `O_A`, and optional `k`, `m` for the weight-`m` averages.
#[derive(Clone, Debug, Deserialize)]
pub struct OtocInput {
    pub evolution: Option<OperatorJson>,
    pub o_d: OperatorJson,
    pub o_a: Option<OperatorJson>,
    pub k: Option<usize>,
    pub m: Option<usize>,
}

/// Input of `cost-audit`: a path to certify or a previously emitted report.
#[derive(Clone, Debug)]
pub enum AuditInput {
    Path(CircuitPathJson),
    Report(Box<CertificateReport>),
}

pub fn parse_audit_input(v: Value) -> Result<AuditInput> {
    if v.get("segments").is_some() {
        return Ok(AuditInput::Path(serde_json::from_value(v)?));
    }
    let cert = v.get("certificate").cloned().unwrap_or(v);
    Ok(AuditInput::Report(Box::new(serde_json::from_value(cert)?)))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    Ok(serde_json::from_value(v)?)
}

/// `{"schema": "pauli-lens/1", "command": command, ...body}`.
pub fn report(command: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        out.extend(fields);
    } else {
        out.insert("result".into(), body);
    }
    Value::Object(out)
}

/// Flattens a report into `key,value` lines; nested keys are joined with
/// dots and arrays of scalars with semicolons.
pub fn to_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, val) in rows {
        out.push_str(&format!("{k},{val}\n"));
    }
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(x) => Some(x.to_string()),
        Value::String(s) => Some(if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.clone() }),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                flatten(&key(k), val, rows);
            }
        }
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            let joined: Vec<String> = items.iter().filter_map(scalar).collect();
            rows.push((prefix.to_string(), joined.join(";")));
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), val, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other).unwrap_or_default())),
    }
}

/// Human-readable Pauli label: `IXZY` strings for qubits, `X^sZ^t` factors
/// joined by `.` otherwise.
pub fn pauli_label_string(label: usize, d: usize, n: usize) -> String {
    if d == 2 {
        (0..n)
            .map(|i| match label_site(label, 2, i) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect()
    } else {
        (0..n)
            .map(|i| {
                let (s, t) = label_site(label, d, i);
                format!("X{s}Z{t}")
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

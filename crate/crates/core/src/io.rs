//! Configuration files and CSV/JSON output.
//!
//! Everything the CLI prints goes through [`Table`]: named columns, rows of
//! [`Field`]s and optional JSON metadata. CSV uses `,`, `.` decimals, LF line
//! endings and always has a header; JSON is an object with `meta` and `rows`
//! keys. Numbers are written with a fixed number of significant digits, and
//! at 17 digits every `f64` re-parses to the identical bit pattern.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::emission::EmissionSample;
use crate::resonance::ResonanceResult;
use crate::sweeps::{ConvergenceReport, SweepResult};

pub const DEFAULT_PRECISION: usize = 17;
pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("precision must be in [{MIN_PRECISION}, {MAX_PRECISION}], got {0}")]
    Precision(usize),
    #[error("unknown output format '{0}' (expected csv or json)")]
    UnknownFormat(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("check failed: {0}")]
    Check(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(IoError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Settings read from a config file. Keys mirror the command-line flag
/// names; command-line flags take precedence. Unknown keys are rejected.
///
/// ```toml
/// theta = 78.0
/// k-dq0 = 0.03
/// format = "json"
/// precision = 12
/// methods = ["perturbative", "closed-form", "truncated:3"]
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CliConfig {
    pub theta: Option<f64>,
    pub k_dq0: Option<f64>,
    pub delta: Option<f64>,
    pub method: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub precision: Option<usize>,
    pub order: Option<usize>,
    pub kind: Option<String>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<String>,
    pub methods: Option<Vec<String>>,
    pub orders: Option<Vec<usize>>,
    pub numeric: Option<bool>,
}

impl CliConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, IoError> {
        let cfg: CliConfig = toml::from_str(text).map_err(|e| IoError::Config {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })?;
        if let Some(p) = cfg.precision {
            check_precision(p)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = fs::read_to_string(path).map_err(|source| IoError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }
}

pub fn check_precision(p: usize) -> Result<usize, IoError> {
    if (MIN_PRECISION..=MAX_PRECISION).contains(&p) {
        Ok(p)
    } else {
        Err(IoError::Precision(p))
    }
}

/// `v` with `precision` significant digits, in scientific notation.
pub fn format_number(v: f64, precision: usize) -> String {
    format!("{:.*e}", precision.saturating_sub(1), v)
}

fn rounded(v: f64, precision: usize) -> f64 {
    if v.is_finite() {
        format_number(v, precision).parse().unwrap_or(v)
    } else {
        v
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Field {
    fn csv(&self, precision: usize) -> String {
        match self {
            Field::Num(v) => format_number(*v, precision),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(s) => s.clone(),
            Field::Missing => String::new(),
        }
    }

    fn json(&self, precision: usize) -> Value {
        match self {
            // non-finite values have no JSON representation and become null
            Field::Num(v) => serde_json::Number::from_f64(rounded(*v, precision))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Field::Int(i) => json!(i),
            Field::Bool(b) => json!(b),
            Field::Text(s) => json!(s),
            Field::Missing => Value::Null,
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<Option<f64>> for Field {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Field::Missing, Field::Num)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as u64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
    /// Emitted as the JSON `meta` object; CSV carries no metadata.
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            meta: Map::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W, precision: usize) -> Result<(), IoError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|f| f.csv(precision)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, precision: usize) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|f| f.json(precision)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "meta": self.meta, "rows": rows })
    }

    pub fn write<W: Write>(&self, mut out: W, format: Format, precision: usize) -> Result<(), IoError> {
        check_precision(precision)?;
        match format {
            Format::Csv => self.write_csv(out, precision),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(precision))?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    /// Renders the table to a string.
    pub fn render(&self, format: Format, precision: usize) -> Result<String, IoError> {
        let mut buf = Vec::new();
        self.write(&mut buf, format, precision)?;
        Ok(String::from_utf8(buf).expect("table output is UTF-8"))
    }
}

fn flag_column(value_column: &str) -> String {
    format!("flag_{}", value_column.strip_prefix("rho_").unwrap_or(value_column))
}

/// Sweep rows: the grid coordinate, one value column per method/order, then
/// one flag column per value column.
pub fn sweep_table(result: &SweepResult) -> Table {
    let mut columns = vec![result.spec.kind.axis().to_string()];
    columns.extend(result.columns.iter().cloned());
    columns.extend(result.columns.iter().map(|c| flag_column(c)));
    let mut t = Table::new(columns);
    for row in &result.rows {
        let mut fields = vec![Field::Num(row.x)];
        fields.extend(row.cells.iter().map(|c| Field::Num(c.value)));
        fields.extend(row.cells.iter().map(|c| Field::from(c.flag.as_str())));
        t.rows.push(fields);
    }
    t.meta.insert("kind".into(), json!(result.spec.kind.name()));
    t.meta.insert("axis".into(), json!(result.spec.kind.axis()));
    t.meta.insert("expected_rows".into(), json!(result.spec.grid.count));
    t.meta.insert("spec".into(), serde_json::to_value(&result.spec).unwrap_or(Value::Null));
    t.meta.insert("version".into(), json!(result.meta.version));
    t.meta.insert("determinism".into(), json!(result.meta.determinism));
    t.meta.insert("wall_time_s".into(), json!(result.meta.wall_time_s));
    t
}

pub fn sample_table(sample: &EmissionSample) -> Table {
    let q = &sample.query;
    let mut t = Table::new(
        ["theta_deg", "k_dq0", "delta", "method", "delta_eff", "rho", "singular"]
            .map(String::from)
            .to_vec(),
    );
    t.rows.push(vec![
        q.theta_deg.into(),
        q.k_dq0.into(),
        q.delta.into(),
        Field::Text(q.method.to_string()),
        sample.delta_eff.into(),
        sample.rho.into(),
        sample.singular.into(),
    ]);
    t.meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    t
}

pub fn resonance_table(results: &[ResonanceResult]) -> Table {
    let mut t = Table::new(
        [
            "theta_deg",
            "k_dq0",
            "delta_s_analytic",
            "delta_s_numeric",
            "bracket_lo",
            "bracket_hi",
            "iterations",
            "order",
        ]
        .map(String::from)
        .to_vec(),
    );
    for r in results {
        t.rows.push(vec![
            r.theta_deg.into(),
            r.k_dq0.into(),
            r.delta_s_analytic.into(),
            r.delta_s_numeric.into(),
            r.bracket.map(|b| b.0).into(),
            r.bracket.map(|b| b.1).into(),
            r.iterations.into(),
            r.order.map_or(Field::Missing, Field::from),
        ]);
    }
    t.meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    t.meta.insert("frequency_shift".into(), json!("delta_omega = k * delta_s"));
    t
}

pub fn convergence_table(report: &ConvergenceReport) -> Table {
    let mut t = Table::new(
        ["order", "g1_re", "g1_im", "rho", "residual", "change", "condition_flag"]
            .map(String::from)
            .to_vec(),
    );
    for r in &report.rows {
        t.rows.push(vec![
            r.order.into(),
            r.g1.re.into(),
            r.g1.im.into(),
            r.rho.into(),
            r.residual.into(),
            r.change.into(),
            r.condition_flag.into(),
        ]);
    }
    t.meta.insert("theta_deg".into(), json!(report.theta_deg));
    t.meta.insert("k_dq0".into(), json!(report.k_dq0));
    t.meta.insert("delta".into(), json!(report.delta));
    t.meta.insert("converged_at".into(), json!(report.converged_at));
    t.meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    t
}

/// Outcome of re-reading a sweep file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub format: Format,
    pub axis: String,
    pub rows: usize,
    pub columns: usize,
    /// Row count recorded in the JSON metadata, if any.
    pub expected_rows: Option<usize>,
    pub monotone: bool,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.monotone && self.expected_rows.is_none_or(|n| n == self.rows)
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn check_csv(text: &str) -> Result<CheckReport, IoError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let axis = header
        .get(0)
        .ok_or_else(|| IoError::Check("empty header".into()))?
        .to_string();
    let mut xs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let x = rec
            .get(0)
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| IoError::Check(format!("row {}: grid value is not a number", xs.len() + 1)))?;
        xs.push(x);
    }
    Ok(CheckReport {
        format: Format::Csv,
        axis,
        rows: xs.len(),
        columns: header.len(),
        expected_rows: None,
        monotone: strictly_increasing(&xs),
    })
}

fn check_json(text: &str) -> Result<CheckReport, IoError> {
    let doc: Value = serde_json::from_str(text)?;
    let meta = doc
        .get("meta")
        .and_then(Value::as_object)
        .ok_or_else(|| IoError::Check("missing 'meta' object".into()))?;
    let rows = doc
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::Check("missing 'rows' array".into()))?;
    let axis = meta
        .get("axis")
        .and_then(Value::as_str)
        .ok_or_else(|| IoError::Check("meta has no 'axis'".into()))?
        .to_string();
    let expected_rows = meta.get("expected_rows").and_then(Value::as_u64).map(|n| n as usize);
    let mut xs = Vec::with_capacity(rows.len());
    let mut columns = 0;
    for (i, row) in rows.iter().enumerate() {
        let obj = row
            .as_object()
            .ok_or_else(|| IoError::Check(format!("row {} is not an object", i + 1)))?;
        columns = columns.max(obj.len());
        let x = obj
            .get(&axis)
            .and_then(Value::as_f64)
            .ok_or_else(|| IoError::Check(format!("row {}: missing '{axis}'", i + 1)))?;
        xs.push(x);
    }
    Ok(CheckReport {
        format: Format::Json,
        axis,
        rows: xs.len(),
        columns,
        expected_rows,
        monotone: strictly_increasing(&xs),
    })
}

/// Re-reads sweep output and verifies its grid. The format is taken from
/// `format`, else from the file extension, else sniffed from the content.
pub fn check_file(path: &Path, format: Option<Format>) -> Result<CheckReport, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let format = format
        .or_else(|| path.extension().and_then(|e| e.to_str()).and_then(|e| e.parse().ok()))
        .unwrap_or(if text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Csv
        });
    match format {
        Format::Csv => check_csv(&text),
        Format::Json => check_json(&text),
    }
}

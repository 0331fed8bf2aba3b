//! Record formatting for the command-line front end: aligned tables, CSV and
//! JSON lines.
//!
//! Fixed-point numbers are rounded half-to-even at the requested precision
//! (the behavior of `{:.N}` formatting on the exact binary value). Error
//! bounds are printed in scientific notation so they are never rounded to 0.

use std::io::{self, Write};
use std::path::PathBuf;

use crate::counting::{CountReport, SiftReport};
use crate::delta::{DeltaReport, ThresholdResult};
use crate::sieve_functions::SieveFunctionValue;

pub const DEFAULT_PRECISION: usize = 10;

/// Significant digits kept for error bounds.
const BOUND_DIGITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputSpec {
    pub format: Format,
    /// `None` writes to standard output.
    pub destination: Option<PathBuf>,
    pub precision: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            format: Format::Table,
            destination: None,
            precision: DEFAULT_PRECISION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    /// Printed fixed-point at the output precision.
    Float(f64),
    /// Printed in scientific notation.
    Bound(f64),
    Bool(bool),
    Str(String),
    Missing,
}

impl Value {
    fn render(&self, precision: usize) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) if v.is_finite() => format!("{v:.precision$}"),
            Value::Bound(v) if v.is_finite() => format!("{v:.BOUND_DIGITS$e}"),
            Value::Float(v) | Value::Bound(v) => v.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    fn render_json(&self, precision: usize) -> String {
        match self {
            Value::Float(v) | Value::Bound(v) if !v.is_finite() => "null".into(),
            Value::Int(_) | Value::Float(_) | Value::Bound(_) | Value::Bool(_) => {
                self.render(precision)
            }
            Value::Str(s) => serde_json::Value::String(s.clone()).to_string(),
            Value::Missing => "null".into(),
        }
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i128)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v as i128)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Missing, Value::Float)
    }
}

/// An ordered list of named fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.fields.push((name.to_string(), value.into()));
        self
    }

    pub fn float(self, name: &str, value: f64) -> Self {
        self.field(name, Value::Float(value))
    }

    pub fn bound(self, name: &str, value: f64) -> Self {
        self.field(name, Value::Bound(value))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Write records in the requested format. The header is taken from the first
/// record; all records are expected to share it.
pub fn write_records<W: Write>(out: &mut W, records: &[Record], spec: &OutputSpec) -> io::Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header: Vec<&str> = first.names().collect();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| r.fields.iter().map(|(_, v)| v.render(spec.precision)).collect())
        .collect();
    match spec.format {
        Format::Table => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
                cells
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&mut header.iter().copied()))?;
            for row in &rows {
                writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for row in &rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Format::JsonLines => {
            for r in records {
                let body: Vec<String> = r
                    .fields
                    .iter()
                    .map(|(n, v)| {
                        format!(
                            "{}:{}",
                            serde_json::Value::String(n.clone()),
                            v.render_json(spec.precision)
                        )
                    })
                    .collect();
                writeln!(out, "{{{}}}", body.join(","))?;
            }
        }
    }
    Ok(())
}

pub fn sieve_value_record(v: &SieveFunctionValue) -> Record {
    Record::new()
        .field("function", v.func.symbol())
        .float("s", v.s)
        .float("value", v.value)
        .bound("error_bound", v.error_bound)
        .field("branch", u32::from(v.branch.index()))
}

pub fn delta_record(r: &DeltaReport) -> Record {
    Record::new()
        .field("mode", r.params.mode.name())
        .float("param", r.params.param)
        .float("lambda", r.params.lambda())
        .float("delta_a", r.delta_a)
        .float("delta_b", r.delta_b)
        .float("margin", r.margin)
        .bound("error_bound", r.error_bound)
}

pub fn threshold_record(t: &ThresholdResult) -> Record {
    Record::new()
        .field("mode", t.mode.name())
        .float("lambda", t.lambda)
        .float("threshold", t.threshold)
        .bound("margin_at_threshold", t.margin_at_threshold)
        .field("iterations", t.iterations)
        .bound("bracket_width", t.bracket_width)
}

pub fn count_record(r: &CountReport) -> Record {
    Record::new()
        .field("N", r.query.n)
        .field("mode", r.query.mode.name())
        .field("param", r.query.mode.param())
        .field("r", r.query.r)
        .field("count", r.count)
        .float("predicted", r.predicted_main_term)
        .field("ratio", r.ratio)
}

pub fn sift_record(r: &SiftReport) -> Record {
    Record::new()
        .field("N", r.n)
        .float("z", r.z)
        .field("s1", r.s1)
        .field("s2", r.s2)
        .float("weighted", r.weighted)
        .field("d13", r.d13)
        .field("exceptions", r.exceptions)
        .field("holds", r.holds)
}

//! Report assembly: `report.json` plus one CSV per table.
//!
//! Floats are written with 17 significant digits so every value round-trips.
//! Nothing time- or path-dependent goes into the files.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => float(*x),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, exp)) if !exp.starts_with('-') => format!("{m}e+{exp}"),
            _ => s,
        }
    }
}

/// JSON value for a float; non-finite values become strings.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(fmt_f64(x))
    }
}

/// Pretty printer that writes every float with [`fmt_f64`].
struct FixedDigits(PrettyFormatter<'static>);

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-digit floats and a trailing newline.
pub fn to_json_text(value: &Value) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    EvidenceOnly,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::EvidenceOnly => "evidence-only",
        }
    }

    pub fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A column name with the operation that produced it.
#[derive(Clone, Debug)]
pub struct Column {
    pub name: &'static str,
    pub source: &'static str,
}

pub const fn col(name: &'static str, source: &'static str) -> Column {
    Column { name, source }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: Vec<Column>) -> Self {
        Self {
            name,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.columns.len(),
            "row width in table {}",
            self.name
        );
        self.rows.push(row);
    }

    fn csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(vec![]);
        w.write_record(self.columns.iter().map(|c| c.name))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        Ok(w.into_inner()?)
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.name.to_owned(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn json_columns(&self) -> Value {
        Value::Array(
            self.columns
                .iter()
                .map(|c| json!({"name": c.name, "source": c.source}))
                .collect(),
        )
    }
}

#[derive(Debug)]
pub struct Report {
    pub experiment: &'static str,
    pub inputs: Value,
    pub tolerances: Vec<(&'static str, f64)>,
    pub summary: Vec<(&'static str, Cell)>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(experiment: &'static str, inputs: Value) -> Self {
        Self {
            experiment,
            inputs,
            tolerances: Vec::new(),
            summary: Vec::new(),
            tables: Vec::new(),
            notes: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn tol(&mut self, name: &'static str, value: f64) {
        self.tolerances.push((name, value));
    }

    pub fn summarize(&mut self, name: &'static str, value: impl Into<Cell>) {
        self.summary.push((name, value.into()));
    }

    pub fn to_json(&self) -> Value {
        let tolerances: Map<String, Value> = self
            .tolerances
            .iter()
            .map(|(k, v)| ((*k).to_owned(), float(*v)))
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| ((*k).to_owned(), v.json()))
            .collect();
        let rows: Map<String, Value> = self
            .tables
            .iter()
            .map(|t| (t.name.to_owned(), t.json_rows()))
            .collect();
        let columns: Map<String, Value> = self
            .tables
            .iter()
            .map(|t| (t.name.to_owned(), t.json_columns()))
            .collect();
        json!({
            "schema": SCHEMA,
            "experiment": self.experiment,
            "inputs": self.inputs,
            "verdict": self.verdict.as_str(),
            "tolerances": tolerances,
            "summary": summary,
            "notes": self.notes,
            "columns": columns,
            "rows": rows,
        })
    }

    /// Writes `report.json` and `<table>.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let text = to_json_text(&self.to_json())?;
        let path = dir.join("report.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            fs::write(&path, t.csv()?).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

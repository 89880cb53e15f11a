//! Typed result tables and their CSV / JSON serialization.
//!
//! Floats are written with 17 significant digits so a file read back yields
//! the same bits. Non-finite floats are written as `inf`, `-inf` and `NaN`;
//! empty cells as an empty CSV field or JSON `null`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Int,
    Float,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn fits(&self, kind: ColumnKind) -> bool {
        matches!(
            (self, kind),
            (Cell::Empty, _)
                | (Cell::Int(_), ColumnKind::Int)
                | (Cell::Float(_), ColumnKind::Float)
                | (Cell::Text(_), ColumnKind::Text)
        )
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match *self {
            Cell::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_float(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[(&str, ColumnKind)]) -> Self {
        Table {
            columns: columns
                .iter()
                .map(|&(name, kind)| Column {
                    name: name.to_string(),
                    kind,
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Appends a row; its cells must match the column kinds.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Parameter(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some((cell, col)) = row.iter().zip(&self.columns).find(|(cell, col)| !cell.fits(col.kind)) {
            return Err(Error::Parameter(format!(
                "cell {cell:?} does not fit column {}",
                col.name
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Values of a column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Parameter(format!("CSV encoding failed: {e}"));
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|cell| match cell {
                Cell::Int(i) => i.to_string(),
                Cell::Float(x) => format_float(*x),
                Cell::Text(s) => s.clone(),
                Cell::Empty => String::new(),
            }))
            .map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Parameter(format!("CSV encoding failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Parameter(format!("CSV encoding failed: {e}")))
    }

    /// `{"columns": [{"name", "kind"}...], "data": {name: [values...]}}`.
    pub fn to_json_value(&self) -> Value {
        let mut data = Map::new();
        for (j, col) in self.columns.iter().enumerate() {
            let values = self
                .rows
                .iter()
                .map(|r| match &r[j] {
                    Cell::Int(i) => Value::from(*i),
                    Cell::Float(x) if x.is_finite() => Value::from(*x),
                    Cell::Float(x) => Value::from(format_float(*x)),
                    Cell::Text(s) => Value::from(s.as_str()),
                    Cell::Empty => Value::Null,
                })
                .collect();
            data.insert(col.name.clone(), Value::Array(values));
        }
        serde_json::json!({ "columns": self.columns, "data": data })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("table JSON is always valid");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Table> {
        let bad = |m: String| Error::Parameter(format!("malformed table JSON: {m}"));
        let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let columns: Vec<Column> =
            serde_json::from_value(v.get("columns").cloned().unwrap_or(Value::Null)).map_err(|e| bad(e.to_string()))?;
        let data = v
            .get("data")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing data".into()))?;
        let mut arrays = Vec::with_capacity(columns.len());
        for col in &columns {
            let arr = data
                .get(&col.name)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("missing column {}", col.name)))?;
            arrays.push(arr);
        }
        let n = arrays.first().map_or(0, |a| a.len());
        if arrays.iter().any(|a| a.len() != n) {
            return Err(bad("columns differ in length".into()));
        }
        let mut table = Table {
            columns: columns.clone(),
            rows: Vec::with_capacity(n),
        };
        for i in 0..n {
            let mut row = Vec::with_capacity(columns.len());
            for (col, arr) in columns.iter().zip(&arrays) {
                let v = &arr[i];
                let cell = match (col.kind, v) {
                    (_, Value::Null) => Cell::Empty,
                    (ColumnKind::Int, _) => Cell::Int(v.as_i64().ok_or_else(|| bad(format!("{v} is not an integer")))?),
                    (ColumnKind::Float, Value::String(s)) => {
                        Cell::Float(parse_float(s).ok_or_else(|| bad(format!("{s} is not a float")))?)
                    }
                    (ColumnKind::Float, _) => {
                        Cell::Float(v.as_f64().ok_or_else(|| bad(format!("{v} is not a float")))?)
                    }
                    (ColumnKind::Text, _) => {
                        Cell::Text(v.as_str().ok_or_else(|| bad(format!("{v} is not text")))?.into())
                    }
                };
                row.push(cell);
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` selects JSON; anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Provenance written next to every emitted table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub software: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    /// The grid actually evaluated, after defaults were applied.
    pub grid: Value,
    pub seeds: Vec<u64>,
    pub columns: Vec<Column>,
    pub rows: usize,
}

impl Metadata {
    pub fn new(command: &str, config: Value, seeds: Vec<u64>) -> Self {
        Metadata {
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            grid: Value::Null,
            seeds,
            columns: Vec::new(),
            rows: 0,
        }
    }
}

impl Metadata {
    pub fn with_grid(mut self, grid: Value) -> Self {
        self.grid = grid;
        self
    }
}

/// Path of the metadata sidecar for `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes `table` to `path` and its metadata to [`sidecar_path`].
pub fn emit(table: &Table, path: &Path, format: Format, metadata: &Metadata) -> Result<()> {
    let body = match format {
        Format::Csv => table.to_csv_string()?,
        Format::Json => table.to_json_string(),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))?;
    let meta = Metadata {
        columns: table.columns.clone(),
        rows: table.len(),
        ..metadata.clone()
    };
    let side = sidecar_path(path);
    let mut text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Json {
        path: side.clone(),
        source: e,
    })?;
    text.push('\n');
    fs::write(&side, text).map_err(|e| Error::io(&side, e))
}

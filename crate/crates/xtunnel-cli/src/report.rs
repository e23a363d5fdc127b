//! Scenario outputs: CSV tables and the JSON summary.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use xtunnel::analysis::{FitResult, LinearFit};
use xtunnel::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// 12 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        "nan".into()
    }
}

/// JSON number rounded to 12 significant digits (`null` when not finite).
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        fmt_num(v).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// A row for a failed scan point: the parameter, blanks, and the message in the last column.
    pub fn push_error(&mut self, value: f64, err: &Error) {
        let mut row = vec![Cell::Num(value)];
        row.resize(self.header.len() - 1, Cell::Empty);
        row.push(Cell::Text(err.to_string()));
        self.rows.push(row);
    }

    /// Column `name` as numbers (skipping blanks).
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(j) = self.header.iter().position(|h| h == name) else { return Vec::new() };
        self.rows
            .iter()
            .filter_map(|r| match r[j] {
                Cell::Num(v) => Some(v),
                Cell::Int(v) => Some(v as f64),
                _ => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| io::Error::new(io::ErrorKind::Other, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some scan rows failed.
    Partial,
    Failed,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Partial => "partial",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub prefix: String,
    pub params: Map<String, Value>,
    pub results: Map<String, Value>,
    pub fits: Vec<Value>,
    pub tables: Vec<Table>,
    pub row_errors: Vec<Value>,
    pub error: Option<Value>,
}

/// Variant name of a library error, used as a machine-readable kind.
pub fn error_kind(e: &Error) -> String {
    let d = format!("{e:?}");
    d.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

pub fn error_object(e: &Error) -> Value {
    json!({ "kind": error_kind(e), "message": e.to_string() })
}

impl Report {
    pub fn new(scenario: &str, prefix: &str, params: Map<String, Value>) -> Self {
        Self {
            scenario: scenario.into(),
            prefix: prefix.into(),
            params,
            results: Map::new(),
            fits: Vec::new(),
            tables: Vec::new(),
            row_errors: Vec::new(),
            error: None,
        }
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.results.insert(key.into(), v);
    }

    pub fn set_num(&mut self, key: &str, v: f64) {
        self.results.insert(key.into(), num(v));
    }

    pub fn row_error(&mut self, parameter: &str, value: f64, e: &Error) {
        self.row_errors.push(json!({ parameter: num(value), "kind": error_kind(e), "message": e.to_string() }));
    }

    pub fn fit(&mut self, name: &str, fit: Result<FitResult, Error>) -> Option<FitResult> {
        match fit {
            Ok(f) => {
                self.fits.push(json!({
                    "name": name,
                    "model": f.model.name(),
                    "rate_or_exponent": num(f.rate_or_exponent),
                    "intercept": num(f.intercept),
                    "r_squared": num(f.r_squared),
                    "window": [num(f.window.0), num(f.window.1)],
                }));
                Some(f)
            }
            Err(e) => {
                self.fits.push(json!({ "name": name, "error": error_object(&e) }));
                None
            }
        }
    }

    pub fn linear_fit(&mut self, name: &str, fit: Result<LinearFit, Error>) -> Option<LinearFit> {
        match fit {
            Ok(f) => {
                self.fits.push(json!({
                    "name": name,
                    "model": "linear",
                    "slope": num(f.slope),
                    "intercept": num(f.intercept),
                    "r_squared": num(f.r_squared),
                }));
                Some(f)
            }
            Err(e) => {
                self.fits.push(json!({ "name": name, "error": error_object(&e) }));
                None
            }
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn result(&self, key: &str) -> Option<f64> {
        self.results.get(key).and_then(Value::as_f64)
    }

    pub fn fit_value(&self, name: &str, field: &str) -> Option<f64> {
        self.fits.iter().find(|f| f["name"] == name).and_then(|f| f[field].as_f64())
    }

    pub fn status(&self) -> Status {
        if self.error.is_some() {
            Status::Failed
        } else if !self.row_errors.is_empty() {
            Status::Partial
        } else {
            Status::Ok
        }
    }

    /// 0 on success, 3 on any numerical failure, including a single failed scan row.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Ok => 0,
            _ => 3,
        }
    }

    pub fn summary(&self) -> Value {
        let mut m = Map::new();
        m.insert("scenario".into(), self.scenario.clone().into());
        m.insert("params".into(), Value::Object(self.params.clone()));
        let mut results = self.results.clone();
        if !self.row_errors.is_empty() {
            results.insert("row_errors".into(), Value::Array(self.row_errors.clone()));
        }
        m.insert("results".into(), Value::Object(results));
        m.insert("fits".into(), Value::Array(self.fits.clone()));
        m.insert("status".into(), self.status().name().into());
        m.insert("error".into(), self.error.clone().unwrap_or(Value::Null));
        Value::Object(m)
    }

    /// File name and bytes of every artifact.
    pub fn artifacts(&self) -> io::Result<Vec<(String, Vec<u8>)>> {
        let mut out = Vec::with_capacity(self.tables.len() + 1);
        for t in &self.tables {
            out.push((format!("{}_{}.csv", self.prefix, t.name), t.to_csv()?));
        }
        let mut json = serde_json::to_vec_pretty(&self.summary())?;
        json.push(b'\n');
        out.push((format!("{}.json", self.prefix), json));
        Ok(out)
    }

    /// Writes all artifacts into `dir` at once and returns their paths.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        let files = self.artifacts()?;
        fs::create_dir_all(dir)?;
        let mut paths = Vec::with_capacity(files.len());
        for (name, bytes) in files {
            let p = dir.join(name);
            fs::write(&p, bytes)?;
            paths.push(p);
        }
        Ok(paths)
    }
}

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Output encoding selected by `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    /// Shortest decimal that parses back to the same `f64`.
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => {
                serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or_else(|| format!("{v:?}").into())
            }
            Cell::Int(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A named table with a fixed header.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Table { name: name.to_string(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::io(&self.name, std::io::Error::other(e));
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(fail)?;
        }
        w.into_inner().map_err(|e| CliError::io(&self.name, std::io::Error::other(e.to_string())))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (k, v) in self.header.iter().zip(row) {
                        obj.insert(k.clone(), v.to_json());
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn encode(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(pretty(&self.to_json())),
        }
    }
}

/// Everything a command produces: tables (honouring `--format`), JSON
/// reports (always JSON) and, when a numerical check failed, the failure
/// to report after the data has been written.
#[derive(Debug, Default)]
pub struct Output {
    pub tables: Vec<Table>,
    pub reports: Vec<(String, Value)>,
    pub failure: Option<CliError>,
}

impl Output {
    pub fn table(t: Table) -> Self {
        Output { tables: vec![t], ..Default::default() }
    }

    pub fn report(name: &str, v: Value) -> Self {
        Output { reports: vec![(name.to_string(), v)], ..Default::default() }
    }

    pub fn failing(mut self, failure: Option<CliError>) -> Self {
        self.failure = failure;
        self
    }

    pub fn with_report(mut self, name: &str, v: Value) -> Self {
        self.reports.push((name.to_string(), v));
        self
    }

    /// Writes `<name>.csv|json` files into `dir`. Without a directory the
    /// tables go to stdout; reports are printed only when there is no table.
    pub fn emit(&self, dir: Option<&Path>, format: Format) -> CliResult<()> {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        match dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                for t in &self.tables {
                    let path = dir.join(format!("{}.{ext}", t.name));
                    std::fs::write(&path, t.encode(format)?).map_err(|e| CliError::io(&path, e))?;
                }
                for (name, v) in &self.reports {
                    let path = dir.join(format!("{name}.json"));
                    std::fs::write(&path, pretty(v)).map_err(|e| CliError::io(&path, e))?;
                }
            }
            None => {
                let stdout = std::io::stdout();
                let mut out = stdout.lock();
                let io = |e| CliError::io("stdout", e);
                for t in &self.tables {
                    out.write_all(&t.encode(format)?).map_err(io)?;
                }
                if self.tables.is_empty() {
                    for (_, v) in &self.reports {
                        out.write_all(&pretty(v)).map_err(io)?;
                    }
                }
                out.flush().map_err(io)?;
            }
        }
        Ok(())
    }
}

pub fn pretty(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("JSON values serialize");
    bytes.push(b'\n');
    bytes
}

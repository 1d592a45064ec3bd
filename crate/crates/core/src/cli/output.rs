//! Output bundles: metadata, CSV tables, JSON-lines streams and SVG files,
//! written deterministically.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::check::Check;

/// A CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<usize>> for Cell {
    fn from(x: Option<usize>) -> Self {
        x.map(Cell::from).unwrap_or(Cell::Empty)
    }
}

/// Float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// RFC 4180: comma separated, CRLF line ends.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |cells: Vec<String>| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        out.push_str(&line(self.header.clone()));
        out.push_str("\r\n");
        for row in &self.rows {
            let cells = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_float(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&line(cells));
            out.push_str("\r\n");
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub program: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: Value,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

/// Everything one command produces.
#[derive(Clone, Debug)]
pub struct OutputBundle {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub tables: Vec<(String, Table)>,
    pub jsonl: Vec<(String, Vec<Value>)>,
    pub json: Vec<(String, Value)>,
    pub svg: Vec<(String, String)>,
    /// Human-readable summary lines for stdout.
    pub notes: Vec<String>,
}

/// SHA-256 of the compact JSON of the effective configuration (object keys
/// are sorted, so equal configs hash equally).
pub fn config_hash(config: &Value) -> String {
    let text = serde_json::to_string(config).expect("JSON values serialize");
    let digest = Sha256::digest(text.as_bytes());
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

impl OutputBundle {
    pub fn new(command: &str, config: Value, seed: u64) -> Self {
        OutputBundle {
            command: command.into(),
            config,
            seed,
            checks: Vec::new(),
            tables: Vec::new(),
            jsonl: Vec::new(),
            json: Vec::new(),
            svg: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            program: "dressing-lab",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            config_hash: config_hash(&self.config),
            seed: self.seed,
            config: self.config.clone(),
            checks: self.checks.clone(),
            all_pass: self.all_pass(),
        }
    }

    /// (file name, contents) of every output file, metadata first.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let meta = serde_json::to_string_pretty(&self.metadata()).expect("metadata serializes");
        out.push(("metadata.json".to_string(), meta + "\n"));
        for (name, t) in &self.tables {
            out.push((format!("{name}.csv"), t.to_csv()));
        }
        for (name, lines) in &self.jsonl {
            let mut s = String::new();
            for l in lines {
                s.push_str(&serde_json::to_string(l).expect("JSON values serialize"));
                s.push('\n');
            }
            out.push((format!("{name}.jsonl"), s));
        }
        for (name, v) in &self.json {
            out.push((format!("{name}.json"), serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"));
        }
        for (name, s) in &self.svg {
            out.push((format!("{name}.svg"), s.clone()));
        }
        out
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in self.files() {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

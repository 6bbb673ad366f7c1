//! Table assembly and the CSV/JSON emitters.
//!
//! Identical configurations must produce byte-identical output: floats are
//! rendered with 12 significant digits everywhere and JSON keys are sorted.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt12(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(round12(*x)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Str(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// 12 significant digits, scientific form.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Round to the 12-significant-digit value that `fmt12` prints.
pub fn round12(x: f64) -> f64 {
    fmt12(x).parse().expect("formatted float parses")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_results(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Render a command result in the requested format.
pub fn render(command: &str, params: Value, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let doc = json!({
                "command": command,
                "params": params,
                "results": table.to_json_results(),
                "version": env!("CARGO_PKG_VERSION"),
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            text
        }
    }
}

/// Write to a file, or to stdout for the path `-`.
pub fn emit(path: &str, content: &str) -> std::io::Result<()> {
    if path == "-" {
        std::io::stdout().write_all(content.as_bytes())
    } else {
        if let Some(parent) = Path::new(path).parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, content)
    }
}

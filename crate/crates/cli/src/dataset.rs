//! Self-describing tabular output.
//!
//! CSV files start with `#`-prefixed metadata lines (tool version, command,
//! seed and the full run configuration as JSON), followed by a header row and
//! the data; summary values follow the data as further `#` lines. JSON files
//! carry the same content as one object with `config`, `columns` and `rows`.
//! Floats are written in their shortest round-trip form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Num(v) => Some(v),
            Self::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Self::Text(s) => Some(s),
            _ => None,
        }
    }

    fn to_field(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Num(v) => format!("{v:?}"),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }

    fn from_field(s: &str) -> Self {
        if s.is_empty() {
            Self::Empty
        } else if let Ok(v) = s.parse::<u64>() {
            Self::Int(v)
        } else if let Ok(v) = s.parse::<f64>() {
            Self::Num(v)
        } else {
            Self::Text(s.to_string())
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Int(v) => json!(v),
            Self::Num(v) => json!(v),
            Self::Text(s) => json!(s),
            Self::Empty => Value::Null,
        }
    }

    fn from_json(v: &Value) -> Result<Self, CliError> {
        Ok(match v {
            Value::Null => Self::Empty,
            Value::String(s) => Self::Text(s.clone()),
            Value::Number(n) => match n.as_u64() {
                Some(u) if !n.to_string().contains(['.', 'e', 'E']) => Self::Int(u),
                _ => Self::Num(
                    n.as_f64()
                        .ok_or_else(|| CliError::Format(format!("bad number {n}")))?,
                ),
            },
            other => return Err(CliError::Format(format!("unexpected cell {other}"))),
        })
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub version: String,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, Cell>,
}

impl Dataset {
    pub fn new(config: RunConfig, columns: &[&str]) -> Self {
        Self {
            version: VERSION.to_string(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let config =
            serde_json::to_string(&self.config).map_err(|e| CliError::Format(e.to_string()))?;
        let mut out = String::new();
        writeln!(out, "# tdsim {}", self.version).unwrap();
        writeln!(out, "# command: {}", self.config.command.as_str()).unwrap();
        match self.config.seed {
            Some(s) => writeln!(out, "# seed: {s}").unwrap(),
            None => writeln!(out, "# seed: none").unwrap(),
        }
        writeln!(out, "# config: {config}").unwrap();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field))
                .map_err(csv_err)?;
        }
        let body = w
            .into_inner()
            .map_err(|e| CliError::Format(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        for (k, v) in &self.summary {
            writeln!(out, "# {k}: {}", v.to_field()).unwrap();
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let doc = json!({
            "tdsim_version": self.version,
            "command": self.config.command.as_str(),
            "seed": self.config.seed,
            "config": self.config,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "summary": summary,
        });
        let mut s =
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Parses either format, detected from the first non-blank character.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_csv(text)
        }
    }

    fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut version = None;
        let mut config = None;
        let mut summary = BTreeMap::new();
        let mut seen_body = false;
        for line in text.lines() {
            let Some(meta) = line.strip_prefix('#') else {
                seen_body = true;
                continue;
            };
            let meta = meta.trim_start();
            if !seen_body {
                if let Some(v) = meta.strip_prefix("tdsim ") {
                    version = Some(v.to_string());
                } else if let Some(c) = meta.strip_prefix("config: ") {
                    config = Some(
                        serde_json::from_str::<RunConfig>(c)
                            .map_err(|e| CliError::Format(e.to_string()))?,
                    );
                }
            } else if let Some((k, v)) = meta.split_once(": ") {
                summary.insert(k.to_string(), Cell::from_field(v));
            }
        }
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(Cell::from_field).collect());
        }
        Ok(Self {
            version: version.ok_or_else(|| CliError::Format("missing version line".into()))?,
            config: config.ok_or_else(|| CliError::Format("missing config line".into()))?,
            columns,
            rows,
            summary,
        })
    }

    fn from_json(text: &str) -> Result<Self, CliError> {
        let bad = |what: &str| CliError::Format(format!("missing or invalid `{what}`"));
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))?;
        let config =
            serde_json::from_value(doc.get("config").cloned().ok_or_else(|| bad("config"))?)
                .map_err(|e| CliError::Format(e.to_string()))?;
        let columns = doc["columns"]
            .as_array()
            .ok_or_else(|| bad("columns"))?
            .iter()
            .map(|c| c.as_str().map(String::from).ok_or_else(|| bad("columns")))
            .collect::<Result<_, _>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| bad("rows"))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("rows"))?
                    .iter()
                    .map(Cell::from_json)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let summary = match doc.get("summary") {
            Some(Value::Object(m)) => m
                .iter()
                .map(|(k, v)| Ok((k.clone(), Cell::from_json(v)?)))
                .collect::<Result<_, CliError>>()?,
            _ => BTreeMap::new(),
        };
        Ok(Self {
            version: doc["tdsim_version"]
                .as_str()
                .ok_or_else(|| bad("tdsim_version"))?
                .to_string(),
            config,
            columns,
            rows,
            summary,
        })
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Format(e.to_string())
}

//! Rendering of reports as JSON, CSV or plain text.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Table behind a result, recorded so a report can be traced to its counts.
#[derive(Clone, Debug, Serialize)]
pub struct TableInfo {
    pub n_max: u32,
    pub mode: partlab_core::TableMode,
    pub cache_version: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub samples: Option<u64>,
    pub table: Option<TableInfo>,
}

/// One finished run. Everything here is deterministic in the inputs.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub provenance: Provenance,
    pub result: Value,
    #[serde(skip)]
    pub text: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, result: impl Serialize) -> Self {
        Self {
            tool: "partlab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            provenance: Provenance {
                seed,
                samples: None,
                table: None,
            },
            result: serde_json::to_value(result).expect("results serialize"),
            text: None,
        }
    }

    pub fn samples(mut self, samples: u64) -> Self {
        self.provenance.samples = Some(samples);
        self
    }

    pub fn table(mut self, table: Option<TableInfo>) -> Self {
        self.provenance.table = table;
        self
    }

    pub fn text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => write_csv(&rows(&self.result), out),
            Format::Text => match &self.text {
                Some(t) => writeln!(out, "{t}"),
                None => write_text(&rows(&self.result), out),
            },
        }
    }
}

/// Flattened records: an array yields one record per element, an object
/// holding a `rows` array yields its rows, anything else a single record.
fn rows(v: &Value) -> Vec<Vec<(String, String)>> {
    match v {
        Value::Array(items) => items.iter().map(flatten).collect(),
        Value::Object(m) => match m.get("rows") {
            Some(Value::Array(items)) => items.iter().map(flatten).collect(),
            _ => vec![flatten(v)],
        },
        _ => vec![vec![("value".into(), scalar(v))]],
    }
}

fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match v {
        Value::Object(m) => flatten_into("", m, &mut out),
        _ => out.push(("value".into(), scalar(v))),
    }
    out
}

fn flatten_into(prefix: &str, m: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in m {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Object(inner) => flatten_into(&key, inner, out),
            _ => out.push((key, scalar(v))),
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => v.to_string(),
        _ => v.to_string(),
    }
}

fn write_csv(rows: &[Vec<(String, String)>], out: &mut impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| k))?;
    }
    for row in rows {
        w.write_record(row.iter().map(|(_, v)| v))?;
    }
    w.flush()
}

fn write_text(rows: &[Vec<(String, String)>], out: &mut impl Write) -> std::io::Result<()> {
    if let [row] = rows {
        let width = row.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in row {
            writeln!(out, "{k:width$}  {v}")?;
        }
        return Ok(());
    }
    if let Some(first) = rows.first() {
        let header: Vec<_> = first.iter().map(|(k, _)| k.as_str()).collect();
        writeln!(out, "{}", header.join("\t"))?;
    }
    for row in rows {
        let cells: Vec<_> = row.iter().map(|(_, v)| v.as_str()).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

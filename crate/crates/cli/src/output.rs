use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "branchlab/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A command result: a JSON object plus, for tabular commands, rows for CSV.
pub struct Report {
    pub body: Map<String, Value>,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(body: Value) -> Self {
        let Value::Object(body) = body else {
            panic!("report body must be a JSON object");
        };
        Self { body, table: None }
    }

    pub fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }
}

/// `num/den` for a serialized rational, else the scalar as text.
fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if m.len() == 2 && m.contains_key("num") && m.contains_key("den") => {
            Some(format!("{}/{}", scalar(&m["num"])?, scalar(&m["den"])?))
        }
        _ => None,
    }
}

pub fn cell(v: &Value) -> String {
    scalar(v).unwrap_or_else(|| v.to_string())
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        out.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            let joined: Vec<String> = items.iter().filter_map(scalar).collect();
            out.push((prefix.to_string(), joined.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

/// Writes the report; fails only on I/O or when CSV is requested for a
/// command without tabular output.
pub fn write(out: &mut impl Write, command: &str, seed: u64, format: Format, report: Report) -> Result<(), String> {
    let mut body = Map::new();
    body.insert("schema".into(), Value::String(SCHEMA.into()));
    body.insert("command".into(), Value::String(command.into()));
    body.insert("seed".into(), Value::from(seed));
    body.extend(report.body);
    let io = |e: std::io::Error| e.to_string();
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &Value::Object(body)).map_err(|e| e.to_string())?;
            writeln!(out).map_err(io)
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &Value::Object(body), &mut lines);
            for (k, v) in lines {
                writeln!(out, "{k}: {v}").map_err(io)?;
            }
            Ok(())
        }
        Format::Csv => {
            let table = report.table.ok_or_else(|| format!("`{command}` has no tabular output; use --format json or text"))?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.header).map_err(|e| e.to_string())?;
            for row in table.rows {
                w.write_record(&row).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(io)
        }
    }
}

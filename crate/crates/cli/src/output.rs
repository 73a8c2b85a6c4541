use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A flat record: ordered `(field, value)` pairs. JSON values are strings
/// unless marked numeric.
#[derive(Debug, Clone, Default)]
pub struct Record(Vec<(String, Value)>);

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn int(mut self, key: &str, v: impl Into<u64>) -> Self {
        self.0.push((key.to_string(), Value::Int(v.into())));
        self
    }

    pub fn text(mut self, key: &str, v: impl ToString) -> Self {
        self.0.push((key.to_string(), Value::Text(v.to_string())));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.0.push((key.to_string(), Value::Bool(v)));
        self
    }

    /// A JSON object with the fields in insertion order.
    fn json(&self) -> String {
        let fields: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| {
                let v = serde_json::to_string(v).expect("plain values");
                format!("{}:{v}", serde_json::Value::from(k.as_str()))
            })
            .collect();
        format!("{{{}}}", fields.join(","))
    }

    fn header(&self) -> String {
        self.0.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>().join(",")
    }

    fn csv_row(&self) -> String {
        self.0
            .iter()
            .map(|(_, v)| match v {
                Value::Int(i) => i.to_string(),
                Value::Text(s) => s.clone(),
                Value::Bool(b) => b.to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// One record as a JSON object or a CSV header plus row.
pub fn single(r: &Record, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", r.json()),
        Format::Csv => format!("{}\n{}\n", r.header(), r.csv_row()),
    }
}

/// Several records as a JSON array or CSV rows under one header.
pub fn table(rows: &[Record], format: Format) -> String {
    match format {
        Format::Json => {
            let items: Vec<String> = rows.iter().map(Record::json).collect();
            format!("[{}]\n", items.join(","))
        }
        Format::Csv => {
            let mut out = String::new();
            if let Some(first) = rows.first() {
                let _ = writeln!(out, "{}", first.header());
            }
            for r in rows {
                let _ = writeln!(out, "{}", r.csv_row());
            }
            out
        }
    }
}

//! Tabular reports rendered as aligned text, CSV or JSON.
//!
//! Everything except the optional timing footer is a pure function of the
//! configuration, so repeated runs produce identical bytes.

use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(v) => human_number(*v),
            Cell::Missing => "-".into(),
            other => other.csv(),
        }
    }
}

pub fn human_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{v:.10}")
    } else {
        format!("{v:.6e}")
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
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
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn to_human(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::human).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).fold(c.len(), usize::max))
            .collect();
        let line = |items: &mut dyn Iterator<Item = &String>| {
            let padded: Vec<String> = items.zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&mut self.columns.iter());
        for row in &cells {
            out.push_str(&line(&mut row.iter()));
        }
        out
    }
}

/// A finished command result.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Value,
    /// JSON key of the main table: `rows` or `findings`.
    pub key: &'static str,
    pub table: Table,
    pub summary: Value,
    /// Shown instead of `table` in human output when present.
    pub human_table: Option<Table>,
    pub human_notes: Vec<String>,
    pub wall_time: Option<Duration>,
}

impl Report {
    pub fn new(command: &str, config: Value, key: &'static str, table: Table, summary: Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            key,
            table,
            summary,
            human_table: None,
            human_notes: Vec::new(),
            wall_time: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut doc = Map::new();
                doc.insert(
                    "meta".into(),
                    json!({
                        "tool": "cm-entropy",
                        "version": env!("CARGO_PKG_VERSION"),
                        "command": self.command,
                    }),
                );
                doc.insert("config".into(), self.config.clone());
                doc.insert(self.key.into(), self.table.to_json());
                doc.insert("summary".into(), self.summary.clone());
                if let Some(t) = self.wall_time {
                    doc.insert("footer".into(), json!({ "wall_time_s": t.as_secs_f64() }));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("values are finite or null");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.table.to_csv();
                if let Some(t) = self.wall_time {
                    let _ = writeln!(s, "# wall_time_s={}", t.as_secs_f64());
                }
                s
            }
            Format::Human => {
                let mut s = String::new();
                let _ = writeln!(s, "# {}", self.command);
                s.push_str(&self.human_table.as_ref().unwrap_or(&self.table).to_human());
                for note in &self.human_notes {
                    let _ = writeln!(s, "{note}");
                }
                if let Some(t) = self.wall_time {
                    let _ = writeln!(s, "# wall time {:.3} s", t.as_secs_f64());
                }
                s
            }
        }
    }
}

//! Table output as CSV (comment-line metadata, header row) or JSON
//! (`{"meta": …, "rows": […]}`).

use std::fmt;
use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
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

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// Shortest representation that parses back to the same bits; plain
/// notation in `[1e-5, 1e16)`, exponent notation outside.
pub fn fmt_num(x: f64) -> String {
    let m = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&m) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&fmt_num(*x)),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }
}

/// Write `table` with `meta` in the requested format.
pub fn write_table(
    out: &mut dyn Write,
    format: Format,
    meta: &Map<String, Value>,
    table: &Table,
) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            for (k, v) in meta {
                writeln!(out, "# {k}: {}", compact(v))?;
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| c.to_string()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        table
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(k, c)| (k.to_string(), c.json()))
                            .collect(),
                    )
                })
                .collect();
            write_json(out, meta, Value::Array(rows))?;
        }
    }
    Ok(())
}

/// `{"meta": meta, key: value}` for non-tabular output.
pub fn write_json(out: &mut dyn Write, meta: &Map<String, Value>, rows: Value) -> anyhow::Result<()> {
    let mut obj = Map::new();
    obj.insert("meta".into(), Value::Object(meta.clone()));
    obj.insert("rows".into(), rows);
    serde_json::to_writer_pretty(&mut *out, &Value::Object(obj))?;
    writeln!(out)?;
    Ok(())
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Serialize any value into the JSON `rows` slot.
pub fn to_value<T: Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_format_switches_to_exponent() {
        assert_eq!(fmt_num(120.0), "120");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(1e-300), "1e-300");
        assert_eq!(fmt_num(-3.5e20), "-3.5e20");
        assert_eq!(fmt_num(0.0), "0");
    }

    proptest! {
        #[test]
        fn formatting_round_trips(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = fmt_num(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}

//! Tabular results and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
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

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Scientific notation with 9 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        x.to_string()
    }
}

/// `x` rounded to 9 significant digits, or `null` if not finite.
pub fn num(x: f64) -> Value {
    fmt_num(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows under unit-labelled columns, plus structured extras that only the
/// JSON encoding carries.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub extras: Map<String, Value>,
}

impl Report {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn extra(&mut self, key: &str, value: Value) {
        self.extras.insert(key.to_string(), value);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, config: &RunConfig, seed: u64) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut results = Map::new();
        results.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.extras {
            results.insert(k.clone(), v.clone());
        }
        json!({
            "config_echo": config,
            "results": results,
            "provenance": {
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
            },
        })
    }

    pub fn write<W: Write>(
        &self,
        mut out: W,
        format: Format,
        config: &RunConfig,
        seed: u64,
    ) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out).map_err(std::io::Error::other),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(config, seed))?;
                out.write_all(b"\n")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(2.314e-55), "2.31400000e-55");
        assert_eq!(fmt_num(1.0), "1.00000000e0");
        assert_eq!(fmt_num(f64::NAN), "NaN");
        assert_eq!(num(1.234567891234), json!(1.23456789));
        assert_eq!(num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new(["E_eV", "label"]);
        r.push(vec![1e6.into(), "a".into()]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "E_eV,label\n1.00000000e6,a\n"
        );
    }

    #[test]
    fn json_layout() {
        let mut r = Report::new(["x_s"]);
        r.push(vec![2.0.into()]);
        r.extra("note", json!("hi"));
        let v = r.to_json(&RunConfig::default(), 7);
        assert_eq!(v["results"]["rows"][0]["x_s"], json!(2.0));
        assert_eq!(v["results"]["note"], json!("hi"));
        assert_eq!(v["provenance"]["seed"], json!(7));
        assert_eq!(v["config_echo"]["collapse"]["preset"], json!("adler"));
    }
}

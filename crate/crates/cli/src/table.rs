//! Tabular results rendered as CSV or JSON.
//!
//! CSV starts with the provenance comment lines, then a header row. Numbers
//! are printed in Rust's shortest round-trip form; JSON, which has no
//! representation for them, receives non-finite values as the strings
//! `"inf"`, `"-inf"` and `"nan"`.

use serde_json::{Map, Value};

use crate::provenance::Provenance;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => quote(s),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => finite_or_string(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

pub fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self, provenance: &Provenance) -> String {
        let mut out = provenance.csv_header();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows as objects keyed by column name.
    pub fn to_value(&self) -> Value {
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

    pub fn to_json(&self, provenance: &Provenance) -> String {
        let mut obj = Map::new();
        obj.insert("provenance".into(), provenance.to_value());
        obj.insert("rows".into(), self.to_value());
        pretty(&Value::Object(obj))
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance::new("test", &[])
    }

    #[test]
    fn csv_rendering() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.1.into(), Cell::Empty, "x,y".into()]);
        t.push(vec![f64::INFINITY.into(), 3usize.into(), true.into()]);
        let csv = t.to_csv(&prov());
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, ["a,b,c", "0.1,,\"x,y\"", "inf,3,true"]);
    }

    #[test]
    fn json_rendering_keeps_non_finite_values() {
        let mut t = Table::new(&["x"]);
        t.push(vec![f64::INFINITY.into()]);
        t.push(vec![f64::NEG_INFINITY.into()]);
        t.push(vec![0.25.into()]);
        let v: Value = serde_json::from_str(&t.to_json(&prov())).unwrap();
        let xs: Vec<&Value> = v["rows"].as_array().unwrap().iter().map(|r| &r["x"]).collect();
        assert_eq!(xs, [&Value::from("inf"), &Value::from("-inf"), &Value::from(0.25)]);
        assert_eq!(v["provenance"]["command"], "test");
    }
}

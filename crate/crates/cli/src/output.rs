//! CSV and JSON emission with fixed number formatting.

use serde_json::Value;

/// 17 significant digits in scientific notation, or `inf` / `-inf` / `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// JSON number, or the CSV literal as a string when not finite.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::String(fmt_f64(v))
    }
}

pub fn json_vec(vs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(vs.into_iter().map(json_f64).collect())
}

/// A CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Bool(bool),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Real(v) => fmt_f64(v),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            Cell::Int(n) => Value::from(n),
            Cell::Real(v) => json_f64(v),
            Cell::Bool(b) => Value::Bool(b),
        }
    }
}

/// Header plus rows, always with a header line and LF endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render()).collect();
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
                    let obj = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

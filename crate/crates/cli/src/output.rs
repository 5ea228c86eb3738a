//! Deterministic CSV and JSON rendering.
//!
//! Floats are printed like C's `%.12e`; JSON carries them as strings of the
//! same text, so the bytes never depend on a serializer's float printer.

use std::io::Write;

use serde_json::{Map, Value};

/// `printf("%.12e", x)`.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_e(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
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

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A table with leading metadata and trailing summary entries.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.meta.push((key.into(), value.into()));
        self
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.summary.push((key.into(), value.into()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k} = {}", v.render()).expect("in-memory write");
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns).expect("in-memory write");
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
            }
            w.flush().expect("in-memory write");
        }
        for (k, v) in &self.summary {
            writeln!(out, "# {k} = {}", v.render()).expect("in-memory write");
        }
        out
    }

    fn render_json(&self) -> Vec<u8> {
        let object = |entries: &[(String, Cell)]| -> Value {
            Value::Object(entries.iter().map(|(k, v)| (k.clone(), Value::String(v.render()))).collect())
        };
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), Value::String(v.render())))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), object(&self.meta));
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), object(&self.summary));
        let mut out = serde_json::to_vec_pretty(&Value::Object(top)).expect("serializable");
        out.push(b'\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_formatting() {
        assert_eq!(fmt_e(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e(-0.00012345), "-1.234500000000e-04");
        assert_eq!(fmt_e(6.02e123), "6.020000000000e+123");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(f64::NAN), "nan");
        assert_eq!(fmt_e(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_has_comments_around_the_table() {
        let mut r = Report::new(vec!["a".into(), "b".into()]);
        r.meta("scheme", "colloc");
        r.row(vec![Cell::Num(1.0), Cell::Text("x,y".into())]);
        r.summary("n", 3usize);
        let s = String::from_utf8(r.render(Format::Csv)).unwrap();
        assert_eq!(s, "# scheme = colloc\na,b\n1.000000000000e+00,\"x,y\"\n# n = 3\n");
    }

    #[test]
    fn json_numbers_are_strings() {
        let mut r = Report::new(vec!["xi".into()]);
        r.row(vec![Cell::Num(0.5)]);
        let v: Value = serde_json::from_slice(&r.render(Format::Json)).unwrap();
        assert_eq!(v["rows"][0]["xi"], Value::String("5.000000000000e-01".into()));
    }
}

//! Row tables and their CSV / JSON renderings.

use std::io::Write;

use indexmap::IndexMap;
use serde_json::value::RawValue;

/// Twelve significant digits, C-style exponent: `-1.23456789012e-03`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    /// Quasi-parity, written `+1` / `-1` in CSV.
    Parity(i32),
    Float(f64),
    Bool(bool),
    Missing,
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Parity(q) => format!("{q:+}"),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Parity(q) => q.to_string(),
            Cell::Float(v) if v.is_finite() => format_float(*v),
            Cell::Float(_) | Cell::Missing => "null".into(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Array of objects, one per row, keys in column order.
    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut objects = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut obj = IndexMap::new();
            for (name, cell) in self.columns.iter().zip(row) {
                let raw = RawValue::from_string(cell.json_text()).map_err(std::io::Error::other)?;
                obj.insert(*name, raw);
            }
            objects.push(obj);
        }
        serde_json::to_writer_pretty(&mut out, &objects).map_err(std::io::Error::other)?;
        out.write_all(b"\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(1.0), "1.00000000000e+00");
        assert_eq!(format_float(-0.000123), "-1.23000000000e-04");
        assert_eq!(format_float(0.832554611157698), "8.32554611158e-01");
        assert_eq!(format_float(6.02e123), "6.02000000000e+123");
        assert_eq!(format_float(0.0), "0.00000000000e+00");
    }

    #[test]
    fn csv_and_json_mirror() {
        let mut t = Table::new(&["q", "n", "energy", "zero"]);
        t.push(vec![Cell::Parity(1), Cell::Int(0), Cell::Float(1.0), Cell::Missing]);
        t.push(vec![Cell::Parity(-1), Cell::Int(0), Cell::Float(3.0), Cell::Bool(true)]);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "q,n,energy,zero\n+1,0,1.00000000000e+00,\n-1,0,3.00000000000e+00,true\n"
        );
        let mut json = Vec::new();
        t.write_json(&mut json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v[0]["q"], 1);
        assert_eq!(v[1]["energy"], 3.0);
        assert!(v[0]["zero"].is_null());
        let keys: Vec<&String> = v[0].as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 4);
    }
}

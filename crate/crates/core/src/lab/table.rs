//! Experiment records and their CSV form.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const SCHEMA_LINE: &str = "# schema=1";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Reals use 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Real values of one column, skipping empty cells.
    pub fn reals(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r[i] {
                Cell::Real(x) => Some(x),
                Cell::Int(n) => Some(n as f64),
                _ => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(SCHEMA_LINE);
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Int(n) => write!(out, "{n}").unwrap(),
                    Cell::Real(x) if x.is_finite() => out.push_str(&format_real(*x)),
                    Cell::Real(x) => {
                        return Err(Error::Audit(format!(
                            "non-finite value {x} in column `{}`",
                            self.columns[i]
                        )))
                    }
                    Cell::Text(s) => out.push_str(s),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["ell", "lambda", "note"]);
        t.push(vec![3u64.into(), 0.1.into(), Cell::Empty]);
        t.push(vec![4u64.into(), (1.0 / 3.0).into(), "x".into()]);
        let csv = t.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# schema=1");
        assert_eq!(lines[1], "ell,lambda,note");
        assert_eq!(lines[2], "3,1.0000000000000001e-1,");
        assert_eq!(lines[3], "4,3.3333333333333331e-1,x");
        assert_eq!(t.reals("lambda"), vec![0.1, 1.0 / 3.0]);
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, 123456.789, -2.5e17] {
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut t = Table::new(&["x"]);
        t.push(vec![f64::NAN.into()]);
        assert!(t.to_csv().is_err());
    }
}

//! CSV interchange: provenance-carrying curve tables and numeric
//! measurement files.
//!
//! Curve tables serialize as `#`-prefixed `key: value` meta lines followed
//! by a comma-separated header row and numeric rows. Values are written
//! with Rust's shortest round-trip float formatting and non-finite values
//! as `inf`/`-inf`/`nan`, so identical inputs always produce identical
//! bytes.

use crate::{Error, Result};
use std::fmt::Write as _;

/// Numeric table with ordered metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub headers: Vec<String>,
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            meta: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.headers.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write_to(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn parse_f64(cell: &str, line: usize) -> Result<f64> {
    match cell.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        other => other.parse().map_err(|_| Error::Csv {
            line,
            msg: format!("cannot parse `{other}` as a number"),
        }),
    }
}

/// Parsed numeric CSV: `# key: value` meta lines, one header row, numeric
/// rows. Errors carry 1-based line numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub meta: Vec<(String, String)>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvData {
    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut headers: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            match &headers {
                None => {
                    headers = Some(line.split(',').map(|h| h.trim().to_string()).collect());
                }
                Some(h) => {
                    let cells: Vec<&str> = line.split(',').collect();
                    if cells.len() != h.len() {
                        return Err(Error::Csv {
                            line: line_no,
                            msg: format!("expected {} columns, found {}", h.len(), cells.len()),
                        });
                    }
                    let row = cells
                        .iter()
                        .map(|c| parse_f64(c, line_no))
                        .collect::<Result<Vec<f64>>>()?;
                    rows.push(row);
                }
            }
        }
        let headers = headers.ok_or(Error::Csv {
            line: 1,
            msg: "file has no header row".into(),
        })?;
        Ok(Self {
            meta,
            headers,
            rows,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Index of a required column by header name.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Csv {
                line: 1,
                msg: format!(
                    "missing required column `{name}` (found: {})",
                    self.headers.join(", ")
                ),
            })
    }

    pub fn optional_column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Reads a square complex matrix from headerless CSV with `a+bi` cells.
pub fn read_complex_matrix(text: &str) -> Result<crate::matrix::ComplexMatrix> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                crate::matrix::parse_complex(cell).map_err(|e| Error::Csv {
                    line: line_no,
                    msg: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    crate::matrix::ComplexMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_table_round_trip_bytes() {
        let mut t = CurveTable::new(&["n", "value"]);
        t.push_meta("tool", "demo");
        t.push_row(vec![2.0, 0.125]);
        t.push_row(vec![3.0, f64::INFINITY]);
        t.push_row(vec![4.0, f64::NAN]);
        let s = t.to_csv_string();
        assert_eq!(s, "# tool: demo\nn,value\n2,0.125\n3,inf\n4,nan\n");
        let parsed = CsvData::parse(&s).unwrap();
        assert_eq!(parsed.meta_value("tool"), Some("demo"));
        assert_eq!(parsed.rows[1][1], f64::INFINITY);
        assert!(parsed.rows[2][1].is_nan());
    }

    #[test]
    fn shortest_float_formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12.283033686666302] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_errors_name_the_line() {
        let err = CsvData::parse("a,b\n1,2\n3,oops\n").unwrap_err();
        match err {
            Error::Csv { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("oops"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = CsvData::parse("a,b\n1,2,3\n").unwrap_err();
        assert!(matches!(err, Error::Csv { line: 2, .. }));
    }

    #[test]
    fn complex_matrix_csv() {
        let m = read_complex_matrix("1,0\n0,1\n").unwrap();
        assert_eq!(m.n(), 2);
        let m = read_complex_matrix("# comment\n1+2i,3\n-i,0.5\n").unwrap();
        assert_eq!(m.get(0, 0), num_complex::Complex64::new(1.0, 2.0));
        assert_eq!(m.get(1, 0), num_complex::Complex64::new(0.0, -1.0));
        let err = read_complex_matrix("1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
    }
}

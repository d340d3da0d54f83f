//! Row-major observation matrices and the plain-text data format.

use crate::error::{Error, Result};
use std::path::Path;

/// `n` observations of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dataset dimension must be >= 1".into()));
        }
        if values.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "{} values do not form rows of length {dim}",
                values.len()
            )));
        }
        Ok(Self { dim, values })
    }

    pub fn univariate(values: Vec<f64>) -> Self {
        Self { dim: 1, values }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(1);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }

    /// Raw row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Adds `shift` to every row.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: shift.len() });
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v + shift[i % self.dim])
            .collect();
        Ok(Self { dim: self.dim, values })
    }

    /// Parses one observation per line, fields separated by commas and/or
    /// whitespace. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut count = 0;
            for field in content.split(|c: char| c == ',' || c.is_whitespace()) {
                if field.is_empty() {
                    continue;
                }
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("not a number: {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: "non-finite value".into(),
                    });
                }
                values.push(v);
                count += 1;
            }
            match dim {
                None => dim = Some(count),
                Some(d) if d != count => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("expected {d} columns, found {count}"),
                    })
                }
                _ => {}
            }
        }
        match dim {
            None => Err(Error::InvalidInput("no observations in input".into())),
            Some(d) => Self::new(d, values),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

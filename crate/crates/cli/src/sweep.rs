//! Tabular results and their CSV form.

use std::fmt::Write;

/// A table of numbers with a `#`-prefixed metadata block.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub metadata: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn new(metadata: Vec<String>, columns: Vec<String>) -> Self {
        SweepResult {
            metadata,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Metadata lines, header, then one line per row. Numbers use Rust's
    /// shortest round-trip formatting, so output is reproducible bit for bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for m in &self.metadata {
            out.push_str(m);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

//! Table output in two flavors: CSV for machines, aligned columns for
//! people. Cells are plain strings; callers decide number formatting.

use std::io::{self, Write};

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let row: Vec<String> = cells.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{}", self.headers.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_aligned(&self, w: &mut impl Write) -> io::Result<()> {
        let mut widths: Vec<usize> = self.headers.iter().map(String::len).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let line = |w: &mut dyn Write, cells: &[String]| -> io::Result<()> {
            let mut parts = Vec::with_capacity(cells.len());
            for (i, cell) in cells.iter().enumerate() {
                parts.push(format!("{cell:>width$}", width = widths[i]));
            }
            writeln!(w, "{}", parts.join("  "))
        };
        line(w, &self.headers)?;
        for row in &self.rows {
            line(w, row)?;
        }
        Ok(())
    }

    pub fn write(&self, w: &mut impl Write, csv: bool) -> io::Result<()> {
        if csv {
            self.write_csv(w)
        } else {
            self.write_aligned(w)
        }
    }
}

/// Formats a float: full round-trip precision for CSV, six decimals for
/// aligned tables.
pub fn num(v: f64, csv: bool) -> String {
    if csv {
        format!("{v}")
    } else {
        format!("{v:.6}")
    }
}

//! Result tables and their CSV form.
//!
//! A CSV file starts with a block of `#` comment lines (code version, the full
//! configuration, and summary notes), followed by a header row and one row
//! per grid point.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug formatting is the shortest form that round-trips and
            // switches to an exponent for very small or large magnitudes.
            Cell::Num(x) => write!(f, "{x:?}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i32> for Cell {
    fn from(i: i32) -> Self {
        Cell::Int(i as i64)
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

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row, which must have one cell per column.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, `None` where a row has no number.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    /// Writes the comment block, the header, and all rows.
    pub fn write_csv<W: Write>(&self, mut writer: W, comments: &[String]) -> Result<()> {
        for block in comments {
            for line in block.lines() {
                if line.is_empty() {
                    writeln!(writer, "#")?;
                } else {
                    writeln!(writer, "# {line}")?;
                }
            }
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A CSV file as written by [`Table::write_csv`]: comment lines (without the
/// leading `# `) and the string-valued table.
#[derive(Clone, Debug, Default)]
pub struct CsvFile {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvFile {
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut comments = Vec::new();
        let mut body = String::new();
        let mut in_header = true;
        for line in BufReader::new(reader).lines() {
            let line = line?;
            if in_header {
                if let Some(rest) = line.strip_prefix('#') {
                    comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                    continue;
                }
                in_header = false;
            }
            body.push_str(&line);
            body.push('\n');
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self {
            comments,
            columns,
            rows,
        })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Config(format!("no column `{name}`; available: {}", self.columns.join(", "))))
    }

    /// `(x, y)` pairs from rows whose `filters` columns match exactly and
    /// whose `status` (if present) is `ok`. Rows with an empty `y` are skipped.
    pub fn series(&self, x: &str, y: &str, filters: &[(String, String)]) -> Result<Vec<(f64, f64)>> {
        let xi = self.index(x)?;
        let yi = self.index(y)?;
        let status = self.columns.iter().position(|c| c == "status");
        let filters = filters
            .iter()
            .map(|(k, v)| Ok((self.index(k)?, v.as_str())))
            .collect::<Result<Vec<_>>>()?;
        let parse = |s: &str, col: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("column `{col}` holds non-numeric value `{s}`")))
        };
        let mut out = Vec::new();
        for row in &self.rows {
            if status.is_some_and(|i| row[i] != "ok") {
                continue;
            }
            if filters.iter().any(|&(i, v)| !same_value(&row[i], v)) {
                continue;
            }
            if row[yi].is_empty() {
                continue;
            }
            out.push((parse(&row[xi], x)?, parse(&row[yi], y)?));
        }
        Ok(out)
    }
}

/// String equality, or numeric equality when both sides parse as numbers.
fn same_value(a: &str, b: &str) -> bool {
    a == b || matches!((a.parse::<f64>(), b.parse::<f64>()), (Ok(x), Ok(y)) if x == y)
}

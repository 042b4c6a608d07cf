//! Result tables and their CSV form.
//!
//! Layout: `#`-prefixed `key: value` metadata lines, one header row, then
//! data rows. Lines end in CRLF; numbers are written in scientific notation
//! with 17 significant digits, which round-trips every `f64` exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{0}")]
    Shape(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed number `{value}` in column `{column}`")]
    Number { column: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        ResultTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Rectangular shape, and a strictly increasing `t` column if present.
    pub fn validate(&self) -> Result<(), TableError> {
        if let Some((i, row)) = self.rows.iter().enumerate().find(|(_, r)| r.len() != self.columns.len()) {
            return Err(TableError::Shape(format!(
                "row {i} has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(t) = self.column("t") {
            if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(TableError::Shape(format!(
                    "time column not strictly increasing at row {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_table_to<W: Write>(table: &ResultTable, out: W) -> Result<(), TableError> {
    table.validate()?;
    let mut out = BufWriter::new(out);
    for (k, v) in &table.metadata {
        let line = format!("{k}: {v}");
        if line.contains(['\r', '\n']) {
            return Err(TableError::Shape(format!("metadata `{k}` spans several lines")));
        }
        write!(out, "# {line}\r\n")?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_number(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table(table: &ResultTable, path: &Path) -> Result<(), TableError> {
    write_table_to(table, File::create(path)?)
}

pub fn read_table_from<R: io::Read>(input: R) -> Result<ResultTable, TableError> {
    let mut reader = BufReader::new(input);
    let mut metadata = Vec::new();
    let mut line = String::new();
    let header = loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(TableError::Shape("missing header row".into()));
        }
        let trimmed = line.trim_end_matches(['\r', '\n']);
        match trimmed.strip_prefix("# ") {
            Some(meta) => {
                let (k, v) = meta.split_once(": ").unwrap_or((meta, ""));
                metadata.push((k.to_string(), v.to_string()));
            }
            None => break trimmed.to_string(),
        }
    };
    let columns: Vec<String> = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(header.as_bytes())
        .records()
        .next()
        .transpose()?
        .map(|r| r.iter().map(str::to_string).collect())
        .unwrap_or_default();
    let mut rows = Vec::new();
    let mut data = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    for record in data.records() {
        let record = record?;
        let row = record
            .iter()
            .zip(&columns)
            .map(|(v, c)| {
                v.parse::<f64>().map_err(|_| TableError::Number {
                    column: c.clone(),
                    value: v.to_string(),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let table = ResultTable {
        columns,
        rows,
        metadata,
    };
    table.validate()?;
    Ok(table)
}

pub fn read_table(path: &Path) -> Result<ResultTable, TableError> {
    read_table_from(File::open(path)?)
}

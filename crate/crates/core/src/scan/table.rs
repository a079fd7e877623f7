//! Column-schema result tables and CSV/JSON emission.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv_string(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits: enough to round-trip any f64.
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::json!(v),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown output format '{other}'"))),
        }
    }
}

/// Run provenance recorded in JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub model: String,
    pub seed: u64,
    pub grid: serde_json::Value,
    pub version: String,
}

impl RunMetadata {
    pub fn new(model: &str, seed: u64, grid: serde_json::Value) -> Self {
        RunMetadata {
            model: model.to_string(),
            seed,
            grid,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// An ordered set of rows under a fixed column schema.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity does not match the column schema"
        );
        self.rows.push(row);
    }

    /// Cell at (row, named column), for tests and downstream consumers.
    pub fn cell(&self, row: usize, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.get(row)?.get(c)
    }

    /// Convenience float accessor.
    pub fn float(&self, row: usize, column: &str) -> Option<f64> {
        match self.cell(row, column)? {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.columns)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(|c| c.csv_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_json<W: io::Write>(&self, mut w: W, meta: &RunMetadata) -> io::Result<()> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json_value()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "metadata": meta,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)
    }
}

/// Write the table to `path` ("-" for stdout) in the requested format.
pub fn emit(table: &Table, format: OutputFormat, path: &Path, meta: &RunMetadata) -> Result<()> {
    let io_err = |source: io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut sink: Box<dyn Write> = if path == Path::new("-") {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(path).map_err(io_err)?)
    };
    match format {
        OutputFormat::Csv => table.write_csv(&mut sink).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: io::Error::other(e),
        })?,
        OutputFormat::Json => table.write_json(&mut sink, meta).map_err(io_err)?,
    }
    Ok(())
}

fn parse_float(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse '{field}' as a number")))
}

/// Read a two-column CSV (header required) into pairs, by column names.
pub fn read_two_column_csv(path: &Path, col_a: &str, col_b: &str) -> Result<Vec<(f64, f64)>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("cannot read CSV header: {e}")))?
        .clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse(format!("missing column '{name}' in CSV header")))
    };
    let ia = find(col_a)?;
    let ib = find(col_b)?;
    let mut out = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("CSV record {}: {e}", n + 2)))?;
        let a = parse_float(rec.get(ia).unwrap_or(""), n + 2)?;
        let b = parse_float(rec.get(ib).unwrap_or(""), n + 2)?;
        out.push((a, b));
    }
    Ok(out)
}

/// Placeholder cells for a failed row: NaN floats serialize as "NaN" in CSV
/// and null in JSON.
pub(crate) fn nan_cells(n: usize) -> Vec<Cell> {
    std::iter::repeat(Cell::Float(f64::NAN)).take(n).collect()
}

//! Append-only metric streams.
//!
//! Both writers put a schema tag on the first line of the file, write the
//! column header once and flush after every record so a crashed run still
//! leaves complete rows behind.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const METRICS_SCHEMA: &str = "uavppo.metrics/1";
pub const EVAL_SCHEMA: &str = "uavppo.eval/1";
pub const TRACE_SCHEMA: &str = "uavppo.trace/1";
pub const SWEEP_SCHEMA: &str = "uavppo.sweep/1";

/// Create `dir`, refusing to reuse a non-empty directory unless `overwrite` is set.
pub fn prepare_output_dir(dir: &Path, overwrite: bool) -> Result<()> {
    if dir.exists() {
        let non_empty = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?.next().is_some();
        if non_empty {
            if !overwrite {
                return Err(Error::State(format!(
                    "output directory {} already exists and is not empty; pass --overwrite to replace it",
                    dir.display()
                )));
            }
            std::fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if path.exists() {
        return Err(Error::State(format!("refusing to overwrite {}", path.display())));
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// JSON-lines stream; the first line is `{"schema": ..., ...header}`.
pub struct JsonlWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl JsonlWriter {
    pub fn create(path: &Path, schema: &str, header: serde_json::Value) -> Result<Self> {
        let mut line = serde_json::Map::new();
        line.insert("schema".into(), schema.into());
        if let serde_json::Value::Object(fields) = header {
            line.extend(fields);
        }
        let mut w = Self {
            path: path.to_path_buf(),
            out: create(path)?,
        };
        w.write(&serde_json::Value::Object(line))?;
        Ok(w)
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        serde_json::to_writer(&mut self.out, record).map_err(|source| Error::Json {
            path: self.path.clone(),
            source,
        })?;
        self.out.write_all(b"\n").map_err(|e| Error::io(&self.path, e))?;
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// CSV stream with a `#schema=` comment line followed by a single header row.
pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, schema: &str, header: &[String]) -> Result<Self> {
        let mut out = create(path)?;
        writeln!(out, "#schema={schema}").map_err(|e| Error::io(path, e))?;
        writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            out,
            columns: header.len(),
        })
    }

    pub fn write_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.columns {
            return Err(Error::Shape(format!(
                "{}: row has {} fields, header has {}",
                self.path.display(),
                row.len(),
                self.columns
            )));
        }
        let line: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        writeln!(self.out, "{}", line.join(",")).map_err(|e| Error::io(&self.path, e))?;
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Shortest representation that parses back to the same `f64`; integers print without a fraction.
pub fn format_number(v: f64) -> String {
    format!("{v}")
}

/// Parse a CSV written by [`CsvWriter`] into its header and numeric rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::State(format!("{} has no header", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::State(format!("{}: bad number {f:?}: {e}", path.display())))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

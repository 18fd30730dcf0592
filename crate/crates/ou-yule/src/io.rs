//! CSV and JSON artifact I/O.
//!
//! Every artifact starts with a provenance comment (`# seed=..., version=...,
//! config=...`) so a file is enough to reproduce the run that made it.
//! Floats are printed with 17 significant digits, which round-trips every
//! f64 exactly; reruns of the same configuration are byte-identical.
//! Writes go through a temporary sibling file and a rename, so readers
//! never observe a half-written artifact.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Run provenance stamped into every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub config: String,
}

pub const SCHEMA_VERSION: u32 = 1;

pub fn crate_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

impl Provenance {
    pub fn comment_line(&self) -> String {
        format!(
            "# seed={}, version={}, config={}",
            self.seed,
            crate_version(),
            self.config
        )
    }
}

/// 17 significant digits: enough to reconstruct the exact f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a CSV document: provenance comment, column header, then rows.
pub fn csv_string(provenance: &Provenance, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&provenance.comment_line());
    out.push('\n');
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let mut first = true;
        for &v in row {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{}", format_float(v));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Writes via a temporary sibling and an atomic rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let mut tmp: PathBuf = dir.map(Path::to_path_buf).unwrap_or_default();
    let name = path
        .file_name()
        .ok_or_else(|| Error::Parse(format!("not a file path: {}", path.display())))?;
    tmp.push(format!(".{}.{stamp}.tmp", name.to_string_lossy()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_csv(
    path: &Path,
    provenance: &Provenance,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    write_atomic(path, csv_string(provenance, columns, rows).as_bytes())
}

/// Wraps a payload with schema and provenance fields.
pub fn json_envelope(provenance: &Provenance, payload: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "version": crate_version(),
        "seed": provenance.seed,
        "config": provenance.config,
        "result": payload,
    })
}

pub fn write_json(path: &Path, provenance: &Provenance, payload: serde_json::Value) -> Result<()> {
    let doc = json_envelope(provenance, payload);
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Parse(format!("json encode: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// A parsed numeric CSV: leading comments, column names, and rows.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    /// Column by case-insensitive name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut comments = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            comments.push(comment.trim().to_string());
            continue;
        }
        match &columns {
            None => {
                columns = Some(line.split(',').map(|c| c.trim().to_string()).collect());
            }
            Some(cols) => {
                let row: Vec<f64> = line
                    .split(',')
                    .map(|tok| {
                        tok.trim().parse::<f64>().map_err(|_| {
                            Error::Parse(format!("line {}: bad float {tok:?}", lineno + 1))
                        })
                    })
                    .collect::<Result<_>>()?;
                if row.len() != cols.len() {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} fields, got {}",
                        lineno + 1,
                        cols.len(),
                        row.len()
                    )));
                }
                rows.push(row);
            }
        }
    }
    let columns = columns.ok_or_else(|| Error::Parse("no header row".to_string()))?;
    Ok(CsvTable {
        comments,
        columns,
        rows,
    })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    parse_csv(&std::fs::read_to_string(path)?)
}

/// Extracts `(t, x1, x2)` columns from a path-pair table, by name when
/// present, positionally otherwise.
pub fn pair_columns(table: &CsvTable) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let named = (
        table.column("t"),
        table.column("x1"),
        table.column("x2"),
    );
    if let (Some(t), Some(x1), Some(x2)) = named {
        return Ok((t, x1, x2));
    }
    if table.columns.len() < 3 {
        return Err(Error::Parse(
            "path-pair table needs columns t,x1,x2".to_string(),
        ));
    }
    let col = |i: usize| table.rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    Ok((col(0), col(1), col(2)))
}

//! Files written by the subcommands.
//!
//! Every CSV opens with `# nlgauge schema=<n> config_sha256=<hex>` followed
//! by the column row. Floats are written in shortest round-trip form, so a
//! repeated run produces byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ScenarioConfig, SCHEMA_VERSION};
use crate::error::Result;
use crate::evolution::Diagnostics;

/// In-memory CSV table, written in one go so files are never half-formed.
#[derive(Clone, Debug)]
pub struct Csv {
    hash: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(hash: &str, columns: &[&str]) -> Self {
        Self { hash: hash.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(hash: &str, columns: Vec<String>) -> Self {
        Self { hash: hash.to_string(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let header = format!("# nlgauge schema={SCHEMA_VERSION} config_sha256={}\n", self.hash);
        let mut w = csv::Writer::from_writer(header.into_bytes());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are UTF-8")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

pub fn cell(v: impl Display) -> String {
    v.to_string()
}

/// Formats a float cell: plain decimals in `[1e-4, 1e6)`, exponent form
/// otherwise. Both are shortest round-trip.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub norm: f64,
    pub linear_energy: f64,
    pub max_abs: f64,
    pub floored_cells: usize,
}

impl From<&Diagnostics> for DiagnosticRow {
    fn from(d: &Diagnostics) -> Self {
        Self { t: d.t, norm: d.norm, linear_energy: d.linear_energy, max_abs: d.max_abs, floored_cells: d.floored_cells }
    }
}

pub const DIAGNOSTIC_COLUMNS: [&str; 5] = ["t", "norm", "linear_energy", "max_abs", "floored_cells"];

pub fn diagnostics_csv(hash: &str, rows: &[DiagnosticRow]) -> Csv {
    let mut csv = Csv::new(hash, &DIAGNOSTIC_COLUMNS);
    for r in rows {
        csv.push(vec![num(r.t), num(r.norm), num(r.linear_energy), num(r.max_abs), cell(r.floored_cells)]);
    }
    csv
}

/// Summary of one `simulate` run. Metrics are finite unless `abort_reason`
/// is set.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config_sha256: String,
    pub wall_clock_seconds: f64,
    pub diagnostics: Vec<DiagnosticRow>,
    pub final_metrics: BTreeMap<String, f64>,
    pub abort_reason: Option<String>,
}

/// Creates the output directory and writes `config.resolved.toml` into it.
pub fn prepare_dir(dir: &Path, cfg: &ScenarioConfig) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.resolved.toml"), cfg.to_toml())?;
    Ok(dir.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_quoting() {
        let mut csv = Csv::new("abc", &["a", "b"]);
        csv.push(vec![num(0.1), cell("x,y")]);
        csv.push(vec![num(2.5e-13), num(0.0)]);
        assert_eq!(
            csv.render(),
            format!("# nlgauge schema={SCHEMA_VERSION} config_sha256=abc\na,b\n0.1,\"x,y\"\n2.5e-13,0\n")
        );
    }
}

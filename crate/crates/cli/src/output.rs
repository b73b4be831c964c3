//! Deterministic CSV and JSON output: comma-delimited, '\n' line endings,
//! shortest round-trip float formatting, and a config-hash header comment
//! on every file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

/// Shortest round-trip decimal representation, locale-independent.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numeric(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.header.len());
        self.rows.push(row.iter().map(|v| fmt_f64(*v)).collect());
    }
}

pub fn write_csv(
    path: &Path,
    subcommand: &str,
    config_hash: &str,
    table: &CsvTable,
) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let file =
        File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# invlab {} v{}", subcommand, env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# config-hash: sha256:{config_hash}")?;
    writeln!(w, "{}", table.header.join(","))?;
    for row in &table.rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config_hash: &'a str,
    config: &'a C,
    results: &'a R,
}

/// Write `<out stem>.summary.json` next to the CSV.
pub fn write_summary<C: Serialize, R: Serialize>(
    csv_path: &Path,
    subcommand: &str,
    config_hash: &str,
    config: &C,
    results: &R,
) -> anyhow::Result<std::path::PathBuf> {
    let path = summary_path(csv_path);
    let summary = Summary {
        tool: "invlab",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config_hash,
        config,
        results,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn summary_path(csv_path: &Path) -> std::path::PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    csv_path.with_file_name(format!("{stem}.summary.json"))
}

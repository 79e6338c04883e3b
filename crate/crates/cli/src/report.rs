//! Plain-text reports (fixed section order) and deterministic CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Accumulates the five standard sections and prints them in order, whether
/// or not the command filled each one.
#[derive(Default)]
pub struct Report {
    pub problem: Vec<String>,
    pub classification: Vec<String>,
    pub method: Vec<String>,
    pub results: Vec<String>,
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let sections = [
            ("PROBLEM", &self.problem),
            ("CLASSIFICATION", &self.classification),
            ("METHOD", &self.method),
            ("RESULTS", &self.results),
            ("DIAGNOSTICS", &self.diagnostics),
        ];
        for (title, lines) in sections {
            let _ = writeln!(out, "== {title} ==");
            for line in lines {
                let _ = writeln!(out, "{line}");
            }
        }
        out
    }
}

/// All floats in CSV output go through one formatter so that identical runs
/// produce byte-identical files.
pub fn num(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn write_csv(out_dir: &Option<PathBuf>, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let dir: &Path = out_dir.as_deref().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

//! Report types and their on-disk form (JSON, CSV with 17 significant digits).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One quantitative assertion: `value relation limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            limit,
            pass: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            limit,
            pass: value >= limit,
        }
    }
}

/// A failing corpus sample with what is needed to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Also written under plotdata/.
    pub plot: bool,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot: false,
        }
    }

    pub fn plotted(mut self) -> Self {
        self.plot = true;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Output of one part of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            pass: true,
            checks: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn fail(&mut self, f: Failure) {
        self.pass = false;
        self.failures.push(f);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn find(&self, check: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == check)
    }
}

/// The deterministic part of a run: no timestamps or wall times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub seed: u64,
    pub pass: bool,
    pub params: ExperimentConfig,
    pub sections: Vec<Section>,
    pub artifacts: Vec<String>,
}

impl CheckReport {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionTiming {
    pub name: String,
    pub seconds: f64,
}

/// Run facts that change between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub check: String,
    pub started_unix: f64,
    pub wall_seconds: f64,
    pub sections: Vec<SectionTiming>,
    pub threads: usize,
    pub version: String,
}

impl RunMetadata {
    pub fn seconds(&self, section: &str) -> Option<f64> {
        self.sections.iter().find(|s| s.name == section).map(|s| s.seconds)
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes report.json, metadata.json, one CSV per table and plotdata/*.csv.
/// Returns the artifact paths relative to `dir`, sorted.
pub fn write_outputs(dir: &Path, report: &mut CheckReport, tables: &[Table], meta: &RunMetadata) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut artifacts = Vec::new();
    for t in tables {
        let bytes = t.to_csv()?;
        let rel = PathBuf::from(format!("{}.csv", t.name));
        write(&dir.join(&rel), &bytes)?;
        artifacts.push(rel);
        if t.plot {
            let plot_dir = dir.join("plotdata");
            fs::create_dir_all(&plot_dir).map_err(|e| Error::Io(format!("{}: {e}", plot_dir.display())))?;
            let rel = PathBuf::from("plotdata").join(format!("{}.csv", t.name));
            write(&dir.join(&rel), &bytes)?;
            artifacts.push(rel);
        }
    }
    artifacts.sort();
    report.artifacts = artifacts.iter().map(|p| p.display().to_string()).collect();
    let json = serde_json::to_vec_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    write(&dir.join("report.json"), &json)?;
    let meta_json = serde_json::to_vec_pretty(meta).map_err(|e| Error::Io(e.to_string()))?;
    write(&dir.join("metadata.json"), &meta_json)?;
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let mut t = Table::new("x", &["k", "v", "ok"]);
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE];
        for (k, v) in vals.iter().enumerate() {
            t.push(vec![k.into(), (*v).into(), true.into()]);
        }
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert!(!text.contains('\r'));
        for (line, v) in text.lines().skip(1).zip(vals) {
            let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn checks_and_sections() {
        let mut s = Section::new("s");
        s.check(Check::at_most("a", 1.0, 2.0));
        assert!(s.pass);
        s.check(Check::at_least("b", 1.0, 2.0));
        assert!(!s.pass);
        assert!(!Check::at_most("nan", f64::NAN, 1.0).pass);
    }
}

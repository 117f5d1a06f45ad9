//! Experiment runner behind the CLI: a suite evaluates to a report, tables
//! and timing metadata, then everything is written to an output directory.

pub mod config;
pub mod corpus;
pub mod report;
mod suites;

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use config::{ExperimentConfig, Suite};
pub use report::{Check, CheckReport, Failure, RunMetadata, Section, SectionTiming, Table};

use crate::error::Result;

pub struct Evaluation {
    pub report: CheckReport,
    pub tables: Vec<Table>,
    pub metadata: RunMetadata,
}

/// Section names of a suite in evaluation order.
pub fn section_names(suite: Suite) -> Vec<&'static str> {
    suites::plan(suite).into_iter().map(|(n, _)| n).collect()
}

pub fn evaluate(cfg: &ExperimentConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let suite = cfg.suite()?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let wall = Instant::now();
    let mut sections = Vec::new();
    let mut timings = Vec::new();
    let mut tables = Vec::new();
    for (name, run) in suites::plan(suite) {
        let clock = Instant::now();
        let mut section = run(cfg).map_err(|e| e.context(format!("{suite}/{name}")))?;
        let seconds = clock.elapsed().as_secs_f64();
        log::info!("{suite}/{name}: {} in {seconds:.2} s", if section.pass { "pass" } else { "FAIL" });
        timings.push(SectionTiming {
            name: name.to_string(),
            seconds,
        });
        tables.append(&mut section.tables);
        sections.push(section);
    }
    let report = CheckReport {
        check: suite.name().to_string(),
        seed: cfg.seed,
        pass: sections.iter().all(|s| s.pass),
        params: cfg.clone(),
        sections,
        artifacts: Vec::new(),
    };
    let metadata = RunMetadata {
        check: suite.name().to_string(),
        started_unix: started,
        wall_seconds: wall.elapsed().as_secs_f64(),
        sections: timings,
        threads: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(Evaluation {
        report,
        tables,
        metadata,
    })
}

/// Evaluates and writes report.json, metadata.json and the CSV tables to `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Evaluation> {
    let mut ev = evaluate(cfg)?;
    report::write_outputs(out, &mut ev.report, &ev.tables, &ev.metadata)?;
    Ok(ev)
}

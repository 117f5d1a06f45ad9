use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperlab::runner::{self, ExperimentConfig, Suite};
use hyperlab::{Error, Result};

#[derive(Parser)]
#[command(name = "hyperlab", version, about = "Run one verification suite and write its report")]
struct Cli {
    #[command(subcommand)]
    suite: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment config; suite defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config; default out/<suite>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corpus seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    Curvature(Common),
    Bilaplacian(Common),
    Evolution(Common),
    Convexity(Common),
    GaussianDecay(Common),
    Commutator(Common),
    Carleman(Common),
    CarlemanHeat(Common),
    CarlemanQlog(Common),
    Mollifier(Common),
    Asymptotics(Common),
    Kinematics(Common),
}

impl Command {
    fn split(&self) -> (Suite, &Common) {
        match self {
            Command::Curvature(c) => (Suite::Curvature, c),
            Command::Bilaplacian(c) => (Suite::Bilaplacian, c),
            Command::Evolution(c) => (Suite::Evolution, c),
            Command::Convexity(c) => (Suite::Convexity, c),
            Command::GaussianDecay(c) => (Suite::GaussianDecay, c),
            Command::Commutator(c) => (Suite::Commutator, c),
            Command::Carleman(c) => (Suite::Carleman, c),
            Command::CarlemanHeat(c) => (Suite::CarlemanHeat, c),
            Command::CarlemanQlog(c) => (Suite::CarlemanQlog, c),
            Command::Mollifier(c) => (Suite::Mollifier, c),
            Command::Asymptotics(c) => (Suite::Asymptotics, c),
            Command::Kinematics(c) => (Suite::Kinematics, c),
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let (suite, common) = cli.suite.split();
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("--jobs: {e}")))?;
    }
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::for_suite(suite),
    };
    match cfg.check {
        Some(c) if c != suite => {
            return Err(Error::Config(format!(
                "check: config names '{c}' but the subcommand is '{suite}'"
            )))
        }
        _ => cfg.check = Some(suite),
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(suite.name()));
    let ev = runner::run(&cfg, &out)?;
    for s in &ev.report.sections {
        println!("{:<24} {}", s.name, if s.pass { "pass" } else { "FAIL" });
        for c in s.checks.iter().filter(|c| !c.pass) {
            println!("    {} = {:e} (limit {:e})", c.name, c.value, c.limit);
        }
        for f in s.failures.iter().take(5) {
            println!("    seed {} index {}: {}", f.seed, f.index, f.detail);
        }
    }
    println!(
        "{suite}: {} in {:.2} s, report in {}",
        if ev.report.pass { "PASS" } else { "FAIL" },
        ev.metadata.wall_seconds,
        out.display()
    );
    Ok(ev.report.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

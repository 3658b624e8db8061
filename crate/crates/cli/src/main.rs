use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hetc_core::report::{write_artifacts, RunReport};
use hetc_core::sweep::{run_sweep, sweep_csv};
use hetc_core::{verify, Error, ExperimentConfig};

/// Closed-loop simulator for adaptive hybrid event-triggered backstepping control.
#[derive(Parser)]
#[command(name = "hetc-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write trace, events, summary and optional plots.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write SVG plots.
        #[arg(long)]
        plots: bool,
    },
    /// Run the built-in numerical verification suites.
    Verify,
    /// Run one simulation per value of a scalar config key.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Dotted config key, or one of T, Psi, Phi, Upsilon.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// TOML config file, overlaid on its preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset used when no config file is given.
    #[arg(long, default_value = "paper_sec4")]
    preset: String,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig> {
        let cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p),
            None => ExperimentConfig::preset(&self.preset),
        };
        cfg.map_err(describe)
    }
}

fn describe(e: Error) -> anyhow::Error {
    match e {
        Error::ConfigInvalid(issues) => {
            let lines: Vec<String> = issues.iter().map(|i| format!("  {}: {}", i.field, i.reason)).collect();
            anyhow::anyhow!("ConfigInvalid\n{}", lines.join("\n"))
        }
        other => other.into(),
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("HETC_SIM_THREADS") {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("HETC_SIM_THREADS={v} is not a count"))?)),
        Err(_) => Ok(None),
    }
}

fn run(source: &Source, out: Option<PathBuf>, plots: bool) -> Result<()> {
    let cfg = source.load()?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let exp = cfg.build().map_err(describe)?;
    let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let plots = plots || cfg.output.plots;
    let (trace, failure) = match exp.run() {
        Ok(t) => (t, None),
        Err(f) => (*f.trace, Some(f.error)),
    };
    write_artifacts(&dir, &cfg, &trace, plots).with_context(|| format!("writing artifacts to {}", dir.display()))?;
    let s = &trace.summary;
    println!("{}", RunReport::new(&cfg, s).to_json());
    if let Some(e) = failure {
        bail!("RunFailed: {e} (partial artifacts in {})", dir.display());
    }
    Ok(())
}

fn sweep(source: &Source, param: &str, values: &[f64], out: Option<PathBuf>) -> Result<()> {
    let cfg = source.load()?;
    let rows = run_sweep(&cfg, param, values, threads_from_env()?);
    let table = sweep_csv(&rows);
    match out {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            let p = dir.join("sweep.csv");
            std::fs::write(&p, &table).with_context(|| format!("writing {}", p.display()))?;
        }
        None => print!("{table}"),
    }
    let failed = rows.iter().filter(|r| !r.ok).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { source, out, plots } => run(&source, out, plots),
        Command::Verify => {
            let report = verify::run_all();
            print!("{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(anyhow::anyhow!("verification failed"))
            }
        }
        Command::Sweep { source, param, values, out } => sweep(&source, &param, &values, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

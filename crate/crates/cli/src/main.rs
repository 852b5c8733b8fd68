//! `lagcheb`: run a transfer-operator task described by a JSON problem file
//! and emit a CSV table (or a JSON mirror of the run).

mod config;
mod error;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use lagcheb::geometry::{DEFAULT_BOUNDARY_SAMPLES, MIN_BOUNDARY_SAMPLES};

use config::Config;
use error::{config_error, CliError};
use tasks::{default_search, Run, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Inclusive `MIN:MAX:STEP`.
#[derive(Debug, Clone, PartialEq)]
struct NRange(Vec<usize>);

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected MIN:MAX:STEP, got `{s}`"));
        };
        let parse = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}"));
        let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
        if lo == 0 || step == 0 || hi < lo {
            return Err(format!("need 1 ≤ MIN ≤ MAX and STEP ≥ 1, got `{s}`"));
        }
        Ok(NRange((lo..=hi).step_by(step).collect()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "lagcheb", version, about = "Spectral data of transfer operators by Lagrange interpolation")]
struct Cli {
    /// Problem file (JSON); an emitted JSON mirror is also accepted.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// A single basis size.
    #[arg(long, conflicts_with = "n_range")]
    n: Option<usize>,
    /// Basis sizes MIN:MAX:STEP (inclusive).
    #[arg(long, value_name = "MIN:MAX:STEP")]
    n_range: Option<NRange>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// 1-based position in the descending-modulus ordering.
    #[arg(long, value_name = "K")]
    eigen_index: Option<usize>,
    /// Boundary samples for ellipse geometry.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Seed for the Monte Carlo task.
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve(cli: &Cli, config: &Config) -> Result<Run, CliError> {
    let spec = config.run.clone().unwrap_or_default();
    let task = cli
        .task
        .or(spec.task)
        .ok_or_else(|| CliError::Usage("no task: pass --task or set run.task in the config".into()))?;
    let mut ns = match (cli.n, &cli.n_range) {
        (Some(n), _) => vec![n],
        (None, Some(NRange(v))) => v.clone(),
        (None, None) => spec.n.unwrap_or_default(),
    };
    ns.sort_unstable();
    ns.dedup();
    if task.needs_n() {
        if ns.is_empty() {
            return Err(CliError::Usage("no basis size: pass --n or --n-range, or set run.n".into()));
        }
        if ns[0] == 0 {
            return Err(config_error("basis sizes must be at least 1"));
        }
    }
    let eigen_index = cli.eigen_index.or(spec.eigen_index).unwrap_or(2);
    if eigen_index == 0 {
        return Err(CliError::Usage("--eigen-index is 1-based".into()));
    }
    let samples = cli.samples.or(spec.samples).unwrap_or(DEFAULT_BOUNDARY_SAMPLES);
    if samples < MIN_BOUNDARY_SAMPLES {
        return Err(CliError::Usage(format!("--samples must be at least {MIN_BOUNDARY_SAMPLES}")));
    }
    Ok(Run {
        task,
        ns: if task.needs_n() { ns } else { Vec::new() },
        eigen_index,
        samples,
        seed: cli.seed.or(spec.seed).unwrap_or(0),
        search: config.search.unwrap_or_else(default_search),
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| config_error(format!("cannot read {}: {e}", cli.config.display())))?;
    let config = Config::parse(&text)?;
    let run = resolve(cli, &config)?;
    let table = tasks::execute(&config, &run)?;
    let rendered = match cli.format {
        Format::Csv => output::to_csv(&table)?,
        Format::Json => output::to_mirror(&config, &run, &table)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let err = CliError::Usage(first.to_owned());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_range_is_inclusive() {
        assert_eq!(NRange::from_str("2:42:10").unwrap().0, vec![2, 12, 22, 32, 42]);
        assert_eq!(NRange::from_str("3:4:5").unwrap().0, vec![3]);
        for bad in ["0:4:1", "5:4:1", "1:4:0", "1:4", "a:b:c"] {
            assert!(NRange::from_str(bad).is_err(), "{bad}");
        }
    }
}

//! `tetraweight --job job.json [--out DIR] [--threshold T] [--seed S] [--nodes N] [--timings]`
//!
//! Exit status: 0 when every row is below the threshold, 1 when some row is
//! not, 2 on configuration or computation errors.

mod job;
mod run;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use tetraweight::report::{failures, sort_records, write_csv, write_json, Record, ReportError};

use job::{ConfigError, Overrides};
use run::RunError;

#[derive(Debug, Parser)]
#[command(name = "tetraweight", version, about = "Run tetrahedral-weight verification jobs")]
struct Args {
    /// Job description (JSON, "schema": 1).
    #[arg(long)]
    job: PathBuf,
    /// Directory for the CSV and JSON reports.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Pass threshold on rel_residual, overriding the job.
    #[arg(long)]
    threshold: Option<f64>,
    /// Seed, overriding the job.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size, overriding the job.
    #[arg(long)]
    nodes: Option<usize>,
    /// Record wall-clock milliseconds in the reports (breaks byte-identical output).
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("writing {path}: {source}")]
    Report {
        path: String,
        #[source]
        source: ReportError,
    },
}

fn write_reports(dir: &Path, csv_name: &str, json_name: &str, rows: &[Record]) -> Result<(), CliError> {
    let open = |name: &str| {
        let path = dir.join(name);
        std::fs::create_dir_all(dir)
            .and_then(|_| File::create(&path))
            .map(BufWriter::new)
            .map_err(|e| CliError::Report { path: path.display().to_string(), source: e.into() })
    };
    let wrap = |name: &str, source| CliError::Report { path: dir.join(name).display().to_string(), source };
    write_csv(open(csv_name)?, rows).map_err(|e| wrap(csv_name, e))?;
    write_json(open(json_name)?, rows).map_err(|e| wrap(json_name, e))?;
    Ok(())
}

fn run(args: &Args) -> Result<bool, CliError> {
    let job = job::read_job(&args.job)?;
    let plan = job.plan(Overrides { threshold: args.threshold, seed: args.seed, nodes: args.nodes })?;
    let mut rows = run::execute(&plan, args.timings)?;
    sort_records(&mut rows);
    write_reports(&args.out, &plan.csv_name, &plan.json_name, &rows)?;
    let bad = failures(&rows, plan.threshold);
    for r in &bad {
        eprintln!(
            "FAIL {} {} {} rel_residual={:e} threshold={:e} grid={}",
            r.command, r.model, r.param_digest, r.rel_residual, plan.threshold, r.grid
        );
    }
    println!(
        "{}: {} rows, {} below threshold {:e}",
        plan.command.name(),
        rows.len(),
        rows.len() - bad.len(),
        plan.threshold
    );
    Ok(bad.is_empty())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use descent_cli::commands::{run, Command, Options};
use descent_cli::model::parse_site;
use descent_cli::report::{Check, Report};

/// Verify finite sites, bundles, and descent for quotient stacks.
#[derive(Debug, Parser)]
#[command(name = "desc", version)]
struct Cli {
    /// One of check-group, check-action, check-bundle, check-cover,
    /// check-sheaf, glue-morphisms, glue-object, verify-stack, classify.
    command: String,
    /// Site file to load.
    site: PathBuf,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random samples per randomized check.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    /// Cap on exhaustive enumerations.
    #[arg(long, default_value_t = 1 << 16)]
    bound: usize,
    /// Write a JSON report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn emit(report: &Report, path: Option<&PathBuf>) -> ExitCode {
    if let Some(path) = path {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.status.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let site_name = cli.site.display().to_string();
    let command: Command = match cli.command.parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let site = match parse_site(&cli.site) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{site_name}:{e}");
            let report = Report::new(
                command.name(),
                &site_name,
                vec![Check::error("load", e.kind(), e.to_string())],
            );
            return emit(&report, cli.report.as_ref());
        }
    };
    let opts = Options {
        seed: cli.seed,
        budget: cli.budget,
        bound: cli.bound,
    };
    let mut report = run(command, &site, &site_name, opts);
    if cli.timing {
        report.timing_ms = Some(started.elapsed().as_millis() as u64);
    }
    println!("{report}");
    emit(&report, cli.report.as_ref())
}

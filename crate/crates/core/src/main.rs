use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use isolab::cli::{self, verify, Experiment, Format, RunConfig};

/// Length spectra, Dirichlet eigenvalues and Hadamard rates of mushroom
/// billiard pairs.
#[derive(Debug, Parser)]
#[command(name = "isolab", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON configuration; `verify-all` defaults to the bundled running
    /// example.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the report and data tables.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Format of the data tables; the report is always JSON.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for every randomized step, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ISOLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("ISOLAB_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn load(args: &Args) -> Result<RunConfig, cli::CliError> {
    let needs = args.experiment.seed_needs();
    match &args.config {
        Some(path) => Ok(cli::parse_config(path, args.seed, needs)?),
        None if args.experiment == Experiment::VerifyAll => {
            let mut cfg = RunConfig::running_example();
            if let Some(s) = args.seed {
                cfg.override_seed(s);
            }
            Ok(cfg)
        }
        None => Err(cli::CliError::Usage(format!(
            "{} needs --config <path>",
            args.experiment.name()
        ))),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = load(&args).and_then(|cfg| {
        let mut report = cli::run(args.experiment, &cfg, args.format)?;
        report.emit(&args.out)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for line in verify::summary_lines(&report.steps) {
                println!("{line}");
            }
            for note in &report.notes {
                println!("note: {note}");
            }
            println!(
                "{}: {} (report in {})",
                args.experiment.name(),
                report.status.label(),
                args.out.join("report.json").display()
            );
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

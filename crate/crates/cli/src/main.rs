mod evolve;
mod metric;
mod source;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edecay::Error;

#[derive(Debug, Parser)]
#[command(name = "edecay", version, about = "Cramér and energy distances along Fokker-Planck flows")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance or Gini index between densities.
    Metric(metric::MetricArgs),
    /// Run a one-dimensional solver or an exact Gaussian flow.
    Evolve(evolve::EvolveArgs),
    /// Run the acceptance suite.
    Suite(suite::SuiteArgs),
}

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::StabilityViolation { .. }
        | Error::NegativeDensityBeyondTolerance { .. }
        | Error::InsufficientPoints { .. }
        | Error::IncompatiblePrediction(_)
        | Error::Io(_) => EXIT_RUNTIME,
        _ => EXIT_INVALID,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn write_out(dir: &std::path::Path, name: &str, text: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(Error::InvalidParameter {
                name: "threads",
                reason: "must be at least 1".into(),
            });
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(Error::Unsupported(e.to_string()));
        }
    }
    match &cli.command {
        Command::Metric(args) => match metric::run_metric(args) {
            Ok(report) => {
                let (name, text) = match args.format {
                    metric::OutputFormat::Json => (
                        "metric.json",
                        serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                    ),
                    metric::OutputFormat::Csv => ("metric.csv", report.to_csv()),
                };
                print!("{text}");
                if let Some(dir) = &cli.out {
                    if let Err(e) = write_out(dir, name, &text) {
                        return fail(e);
                    }
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Evolve(args) => {
            let mut cfg = match &args.config {
                Some(path) => match evolve::RunConfig::load(path) {
                    Ok(c) => c,
                    Err(e) => return fail(e),
                },
                None => evolve::RunConfig::default(),
            };
            cfg.apply(args, cli.out.as_ref());
            match evolve::run_evolve(&cfg) {
                Ok(summary) => {
                    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Suite(args) => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("edecay-suite"));
            match suite::run(args, &out) {
                Ok(report) => {
                    let passed = report.criteria.iter().filter(|c| c.passed).count();
                    println!("{passed} of {} criteria passed in {:.1} s", report.criteria.len(), report.seconds);
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAILED)
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}

//! The `suite` subcommand.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use clap::Args;
use edecay::decay::suite::{run_suite_with, SuiteConfig, SuiteReport};
use edecay::decay::write_traces_csv;
use edecay::Error;

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Reduced resolutions and widened tolerances.
    #[arg(long)]
    pub quick: bool,
    /// Criterion id or key fragment; repeat to select several.
    #[arg(long)]
    pub only: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SuiteArgs {
    pub fn config(&self) -> SuiteConfig {
        let mut cfg = SuiteConfig {
            quick: self.quick,
            only: self.only.clone(),
            ..SuiteConfig::default()
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg
    }
}

pub fn run(args: &SuiteArgs, out: &Path) -> Result<SuiteReport, Error> {
    let cfg = args.config();
    let report = run_suite_with(&cfg, |c| eprintln!("{}", c.summary_line()));
    if report.criteria.is_empty() {
        return Err(Error::InvalidParameter {
            name: "only",
            reason: format!("no criterion matches {:?}", cfg.only),
        });
    }
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let open = |name: &str| -> Result<BufWriter<File>, Error> {
        let p = out.join(name);
        Ok(BufWriter::new(File::create(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?))
    };
    report.write_json(open("report.json")?)?;
    write_traces_csv(&report.traces, open("traces.csv")?)?;
    Ok(report)
}

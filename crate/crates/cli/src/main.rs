mod commands;
mod exit;

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

/// LPPL bubble diagnostics, t_c forecasts, post-analysis and SHA-2 commitments.
#[derive(Debug, Parser)]
#[command(name = "bubblescope", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a `date,close` CSV and echo it in canonical form.
    Ingest(IngestArgs),
    /// Fit every grid window and write scan.json.
    Scan(PipelineArgs),
    /// Scan, bootstrap and write forecast.json plus the canonical forecast document.
    Forecast(ForecastArgs),
    /// Drawdown, up-day fraction, derivative and bubble-index CSVs.
    Post(PostArgs),
    /// Fingerprint a document with SHA-256 and SHA-512.
    Commit(CommitArgs),
    /// Check a document against a commitment record.
    Verify(VerifyArgs),
    /// Validate, show or extend the master ledger.
    Ledger(LedgerArgs),
    /// Write a synthetic LPPL price series.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct AssetArgs {
    #[arg(long, default_value = "")]
    pub asset: String,
    #[arg(long, default_value = "")]
    pub ticker: String,
    /// Data source tag, e.g. Y or B.
    #[arg(long, default_value = "")]
    pub source: String,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[command(flatten)]
    pub asset: AssetArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[command(flatten)]
    pub asset: AssetArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 20)]
    pub n_starts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub convergence_tol: f64,
    #[arg(long = "grid.dt1", default_value_t = 7)]
    pub dt1: u32,
    #[arg(long = "grid.dt2", default_value_t = 7)]
    pub dt2: u32,
    #[arg(long = "grid.min-len", default_value_t = 91)]
    pub min_len: u32,
    #[arg(long = "grid.max-len", default_value_t = 1092)]
    pub max_len: u32,
    /// Admissible alpha range `lo,hi`.
    #[arg(long = "filter.alpha", default_value = "0.1,0.9")]
    pub alpha: String,
    /// Admissible omega range `lo,hi`.
    #[arg(long = "filter.omega", default_value = "4,25")]
    pub omega: String,
    #[arg(long = "filter.tc-horizon", default_value_t = 183)]
    pub tc_horizon: u32,
    /// Accept fits with B >= 0.
    #[arg(long = "filter.allow-positive-b")]
    pub allow_positive_b: bool,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, default_value_t = 10)]
    pub n_boot: usize,
    /// Index, Equity, Commodity or Forex.
    #[arg(long, default_value = "Index")]
    pub category: String,
    /// Document date; defaults to the last observation date.
    #[arg(long)]
    pub created_on: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct PostArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Forecast date; the drawdown region starts here.
    #[arg(long)]
    pub t2: NaiveDate,
    /// Up-day fraction windows in return observations.
    #[arg(long, value_delimiter = ',', default_value = "30,60,90")]
    pub window_days: Vec<usize>,
    /// Derivative windows in calendar days.
    #[arg(long, value_delimiter = ',', default_value = "120,180")]
    pub sg_window_days: Vec<u32>,
    /// Existing scan.json for the bubble index; otherwise data up to t2 is scanned.
    #[arg(long)]
    pub scan: Option<PathBuf>,
    #[command(flatten)]
    pub asset: AssetArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 20)]
    pub n_starts: usize,
}

#[derive(Debug, Args)]
pub struct CommitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Document name recorded in the ledger; defaults to the file name.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub committed_on: NaiveDate,
    #[arg(long)]
    pub reveal_on: NaiveDate,
    /// Write `<name>.commit` here.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also append the record as a new ledger version dated `committed_on`.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// File holding one ledger-format record line.
    #[arg(long)]
    pub record: PathBuf,
}

#[derive(Debug, Args)]
pub struct LedgerArgs {
    #[arg(long)]
    pub ledger: PathBuf,
    /// Record files to add as a new version.
    #[arg(long, value_delimiter = ',')]
    pub append: Vec<PathBuf>,
    /// Date of the new version.
    #[arg(long)]
    pub date: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value = "2010-01-04")]
    pub start: NaiveDate,
    /// Calendar span in days.
    #[arg(long, default_value_t = 400)]
    pub days: i64,
    /// Skip Saturdays and Sundays.
    #[arg(long)]
    pub business_days: bool,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = -0.06, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 0.008, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.45)]
    pub alpha: f64,
    #[arg(long, default_value_t = 7.5)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    pub phi: f64,
    /// Critical time in days after `start`.
    #[arg(long, default_value_t = 445.0)]
    pub tc: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub asset: AssetArgs,
}

fn main() {
    let cli = Cli::parse();
    let code = match commands::run(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    };
    std::process::exit(code);
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_and_filter_flags_parse() {
        let cli = Cli::try_parse_from([
            "bubblescope",
            "scan",
            "--input",
            "x.csv",
            "--output-dir",
            "o",
            "--grid.dt1",
            "14",
            "--filter.alpha",
            "0.2,0.8",
        ])
        .unwrap();
        let Command::Scan(args) = cli.command else { panic!("scan expected") };
        assert_eq!(args.dt1, 14);
        assert_eq!(args.alpha, "0.2,0.8");
    }
}

//! `sparse-rates`: grid scans of information rates for the sparse Gaussian
//! linear channel.

use clap::Parser;
use sparse_rates_cli::{
    emit, parse_grid, run_scan, CliError, Format, Scenario, ScanConfig, Units,
};
use std::path::PathBuf;

/// Information-rate grid scans for the sparse Gaussian linear channel.
#[derive(Debug, Parser)]
#[command(name = "sparse-rates", version)]
struct Args {
    /// Quantity to compute at each (q, snr_db) cell.
    #[arg(long, value_enum)]
    scenario: Scenario,

    /// Sparsity rate of the source, in (0,1).
    #[arg(long)]
    p: f64,

    /// Sampling-rate grid: a comma list "0.2,0.5" or a range "a:b:step".
    #[arg(long, default_value = "0.5")]
    q: String,

    /// SNR grid in dB, same syntax as --q.
    #[arg(long = "snr-db", default_value = "10")]
    snr_db: String,

    /// Eavesdropper sampling rate (wiretap scenarios only).
    #[arg(long)]
    q2: Option<f64>,

    /// Silenced-user fraction (mac scenario only).
    #[arg(long)]
    alpha: Option<f64>,

    /// Problem dimension for the Monte-Carlo oracles.
    #[arg(long)]
    n: Option<usize>,

    /// Monte-Carlo trials (oracles) or sampled laws (memoryless-scan).
    #[arg(long, default_value_t = 200)]
    trials: usize,

    /// RNG seed for every stochastic scenario.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output units.
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    units: Units,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &Args) -> Result<bool, CliError> {
    let cfg = ScanConfig {
        scenario: args.scenario,
        p: args.p,
        q_grid: parse_grid(&args.q)?,
        snr_db_grid: parse_grid(&args.snr_db)?,
        q2: args.q2,
        alpha: args.alpha,
        units: args.units,
        seed: args.seed,
        trials: args.trials,
        n: args.n,
        format: args.format,
    };
    let table = run_scan(&cfg)?;
    emit(&table, args.format, args.out.as_deref())?;
    Ok(table.diagnostics.is_empty())
}

fn main() {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => {}
        Ok(false) => {
            eprintln!("error (compute): some cells failed; see diagnostics");
            std::process::exit(CliError::Compute(String::new()).exit_code());
        }
        Err(e) => {
            eprintln!("error ({}): {}", e.category(), e.message());
            std::process::exit(e.exit_code());
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod run;

/// Optimize a retirement glidepath for the probability of avoiding ruin.
///
/// The directory must contain `control.txt` and `gp.txt`; the optimal glidepath is written to
/// `output.txt` in the same directory.
#[derive(Debug, Parser)]
#[command(name = "glidepath", version)]
pub struct Args {
    /// Directory holding control.txt and gp.txt.
    pub directory: PathBuf,

    /// Master seed for simulation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker count (default: available parallelism). The dynamic program uses four threads per worker.
    #[arg(long)]
    pub workers: Option<usize>,

    /// Write the final glidepath as CSV (t,alpha) to this path, and per-iteration diagnostics
    /// next to it with a `_diagnostics` suffix.
    #[arg(long, value_name = "PATH")]
    pub export_csv: Option<PathBuf>,

    /// Optimize the mortality-weighted objective using this lifetable (one probability per line, p_0 first).
    #[arg(long, value_name = "LIFETABLE")]
    pub random_horizon: Option<PathBuf>,

    /// Rescale lifetable probabilities that do not sum to 1.
    #[arg(long, requires = "random_horizon")]
    pub renormalize: bool,

    /// Write control.txt and gp.txt for a preset scenario (1-8) into the directory and exit.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u8).range(1..=8))]
    pub scenario: Option<u8>,

    /// Starting glidepath written with --scenario.
    #[arg(long, default_value = "constant", requires = "scenario",
          value_parser = ["rising", "declining", "constant", "random-1", "random-2"])]
    pub start: String,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run::run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

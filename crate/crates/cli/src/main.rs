//! `entdist`: run the entanglement-distribution experiments from the shell.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solver failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "entdist", version, about, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Flat `key = value` file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Pair {
    /// First channel, e.g. `depol:0.65`, `gad:0.3,0.1`, `id`.
    #[arg(long)]
    left: String,
    /// Second channel.
    #[arg(long)]
    right: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Auto,
    Schmidt,
    TwoSided,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PPT test on the Choi matrix of one channel.
    EbCheck {
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        common: Common,
    },
    /// SDP lower bound on the output PT eigenvalue of `left ⊗ right`.
    #[command(alias = "sdp-bound")]
    EaSdp {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        common: Common,
    },
    /// Grid search for the input minimizing the output PT eigenvalue.
    OptimalInput {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_enum, default_value_t = FormArg::Auto)]
        form: FormArg,
        #[command(flatten)]
        common: Common,
    },
    /// Grid search and SDP bound over a two-parameter family grid.
    Sweep {
        /// Family of the first channel (`depol`, `ad`, `pf`, `bf`, `gad`).
        #[arg(long)]
        left: String,
        /// Family of the second channel; `gad` with `gad` sweeps two
        /// identical copies over (gamma, n).
        #[arg(long)]
        right: String,
        /// `lo:hi:step` grid of the first parameter.
        #[arg(long)]
        param1: String,
        /// `lo:hi:step` grid of the second parameter.
        #[arg(long)]
        param2: String,
        /// Input-state grid step.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_enum, default_value_t = FormArg::Auto)]
        form: FormArg,
        #[command(flatten)]
        common: Common,
    },
    /// Edge source (`right ∘ left`) versus midway source (`left ⊗ right`).
    Compare {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized test of the edge-versus-midway inequality.
    Conjecture1 {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// SDP bound along the GAD singlet boundary curve.
    Conjecture2 {
        #[arg(long, default_value_t = 0.001)]
        n_step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Find `A, B` with `A K_i B = K_iᵀ` for a Kraus-rank ≤ 3 channel.
    TransposeSim {
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::EbCheck { common, .. }
            | Command::EaSdp { common, .. }
            | Command::OptimalInput { common, .. }
            | Command::Sweep { common, .. }
            | Command::Compare { common, .. }
            | Command::Conjecture1 { common, .. }
            | Command::Conjecture2 { common, .. }
            | Command::TransposeSim { common, .. } => common,
        }
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let workers = cli
        .command
        .common()
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

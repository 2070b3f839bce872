mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Exact computations on colored shift spaces and a product counterexample.
#[derive(Debug, Parser)]
#[command(name = "shiftlab", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Allow requests beyond the resource caps.
    #[arg(long, global = true)]
    pub force: bool,
    /// JSON object of flag values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Shift {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    /// `squares`, `prefix`, or a path to a family JSON file.
    #[arg(long)]
    pub family: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact F_n, G_n, |B_n| table with entropy estimates.
    Count {
        #[command(flatten)]
        shift: Shift,
        #[arg(long)]
        n: usize,
        /// Compare |B_n| with enumeration for n up to this length.
        #[arg(long)]
        brute_check: Option<usize>,
    },
    /// The summability condition 1 + p·Σ q^{-r(n)} <= q.
    Condition {
        #[command(flatten)]
        shift: Shift,
        #[arg(long, default_value_t = 1000)]
        cutoff: u64,
    },
    /// Gap indices N_k and the ratios k/N_k.
    Gaps {
        #[arg(long)]
        family: String,
        #[arg(long)]
        kmax: u64,
    },
    /// Glue allowed words read from a JSON array of word strings.
    Glue {
        #[command(flatten)]
        shift: Shift,
        #[arg(long, value_enum)]
        mode: commands::GlueMode,
        #[arg(long)]
        segments: PathBuf,
    },
    /// Checks the three decomposition conditions and compares entropies.
    CtCheck {
        #[command(flatten)]
        shift: Shift,
        #[arg(long = "M")]
        big_m: u64,
        #[arg(long)]
        nmax: usize,
        /// Longest enumerated word for the exhaustive condition checks.
        #[arg(long, default_value_t = 6)]
        len: usize,
    },
    /// The color-merging factor map between two shifts.
    Factor {
        #[arg(long)]
        from_p: u32,
        #[arg(long)]
        to_p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Check that the image of B_n is exactly the target B_n.
        #[arg(long)]
        verify: bool,
    },
    /// Intrinsic ergodicity verdict with its supporting data.
    Dichotomy {
        #[command(flatten)]
        shift: Shift,
    },
    /// Lists words of length n in lexicographic order.
    Enumerate {
        #[command(flatten)]
        shift: Shift,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "allowed")]
        class: commands::WordClassArg,
    },
    /// The product system: explicit gluing and the refutation certificate.
    Counterexample {
        #[command(subcommand)]
        action: Counterexample,
    },
}

#[derive(Debug, Subcommand)]
pub enum Counterexample {
    /// Glue windows at radius eps from a JSON array of {window, alpha, beta}.
    Glue {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Certificate that no mistake function g gives almost specification.
    Refute {
        #[arg(long, value_parser = ["sqrt", "log", "zero"])]
        g: String,
        #[arg(long, default_value = "1")]
        eps0: String,
    },
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("shiftlab: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = config::init_threads() {
        eprintln!("shiftlab: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome),
        Err(f) => {
            eprintln!("shiftlab: {f}");
            ExitCode::from(f.code())
        }
    }
}

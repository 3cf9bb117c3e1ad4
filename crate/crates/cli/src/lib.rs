//! The `dcs` command line: classify distance spaces, check comparison
//! functions, and run certified fixed-point iteration on JSON instances.
//!
//! Exit codes: 0 when the verdict is affirmative (or the run converged),
//! 1 when it is negative, 2 on usage or validation errors.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::Format;

#[derive(Debug, Parser)]
#[command(name = "dcs", version, about = "Fixed points in generalized distance spaces")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Seed for every sampled check; overrides `options.seed` in the instance.
    #[arg(long, env = "DCS_SEED", global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Axioms, taxonomy, W3 and bounded-ball witnesses of a space.
    Classify {
        instance: String,
        /// Ball radius for the witness; default: every realized distance
        /// (finite) or 1 (analytic).
        #[arg(long)]
        radius: Option<String>,
    },
    /// Comparison, Φ, Boyd–Wong, Pasicki and Matkowski verdicts.
    CheckFn { file: String },
    /// Monotone envelope `sup_{0<u≤t} φ(u)`.
    Envelope { file: String },
    /// Pointwise maximum of all functions in the given files.
    Combine {
        #[arg(required = true)]
        files: Vec<String>,
    },
    /// Verify the mode hypothesis and iterate.
    Solve {
        instance: String,
        #[command(flatten)]
        run: RunArgs,
        /// Write `n,a_n,c_n` gap rows to this file.
        #[arg(long)]
        gaps_csv: Option<String>,
    },
    /// Brute-force fixed-point set of a finite map.
    Oracle { instance: String },
    /// Build `d*` or `d_*` and check what it inherits from `d`.
    Derive {
        instance: String,
        #[arg(long, value_enum)]
        kind: DeriveKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Solve for `f^l` and lift the fixed point back to `f`.
    Power {
        instance: String,
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeriveKind {
    Star,
    OrbitMax,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// banach | nonlinear | extended | iterated | quasi; default: the
    /// instance's mode block.
    #[arg(long)]
    pub mode: Option<String>,
    /// Start point: a label or index (finite) or a number (analytic).
    #[arg(long = "from", allow_hyphen_values = true)]
    pub from: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    /// Contraction constant for banach mode.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Extra iterations for iterated mode.
    #[arg(long)]
    pub n: Option<usize>,
    /// Iterate even when a premise fails (result is uncertified).
    #[arg(long)]
    pub force: bool,
    /// Accept comparison functions outside Φ.
    #[arg(long)]
    pub allow_non_phi: bool,
}

/// Parses `argv` (program name first) and runs the command, writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(rendered) => {
            let _ = out.write_all(rendered.text.as_bytes());
            if rendered.affirmative {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

//! sl4: eigenvalues of fourth-order Sturm-Liouville problems from the
//! command line. Problems come from strict TOML files or the built-in
//! registry; results go to a sectioned text report plus CSV files.

mod commands;
mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// One error type per exit code: 1 config, 2 inconclusive classification,
/// 3 numerical failure, 4 invariant violation.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Inconclusive(String),
    Numerical(String),
    Invariant(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Inconclusive(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Inconclusive(m)
            | CliError::Numerical(m)
            | CliError::Invariant(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sl4",
    version,
    about = "eigenvalue computations for fourth-order Sturm-Liouville problems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify each endpoint (regular / lim2 / lim3 / lim4)
    Classify(RunArgs),
    /// Compute eigenvalues: oscillation counting (regular) or a truncation sweep (singular)
    Solve(RunArgs),
    /// Compare psi-relaxed vs Dirichlet conditions at a truncation point
    Interlace(RunArgs),
    /// Green's kernel dump and Hilbert-Schmidt distances along a cut schedule
    Greens(RunArgs),
    /// Locate the interval length whose k-th eigenvalue equals --lambda-star
    Spurious(RunArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Problem file (TOML; see README for the schema)
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Built-in problem: hinged|clamped|free-beam|quartic-well|euler-family:C=<val>
    #[arg(long)]
    pub builtin: Option<String>,
    /// Eigenvalue index or inclusive range, e.g. 0 or 0..4
    #[arg(long, default_value = "0..2")]
    pub k: String,
    /// Target eigenvalue for the spurious-eigenvalue search
    #[arg(long)]
    pub lambda_star: Option<f64>,
    /// Truncation schedule: [left:|right:]linear:START:STEP:COUNT, geom:START:COUNT or explicit:P1,P2,...
    #[arg(long)]
    pub schedule: Option<String>,
    /// Relative tolerance for eigenvalue location / sweep convergence
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Directory for CSV output (default: current directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recorded in reports for reproducibility bookkeeping
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let args: &RunArgs = match &cli.cmd {
        Cmd::Classify(a) | Cmd::Solve(a) | Cmd::Interlace(a) | Cmd::Greens(a)
        | Cmd::Spurious(a) => a,
    };
    let loaded = config::load(&args.problem, &args.builtin)?;
    let report = match &cli.cmd {
        Cmd::Classify(_) => commands::cmd_classify(&loaded, args)?,
        Cmd::Solve(_) => commands::cmd_solve(&loaded, args)?,
        Cmd::Interlace(_) => commands::cmd_interlace(&loaded, args)?,
        Cmd::Greens(_) => commands::cmd_greens(&loaded, args)?,
        Cmd::Spurious(_) => commands::cmd_spurious(&loaded, args)?,
    };
    print!("{}", report.render());
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}

//! Command-line front end: problem files in, solve/classify reports out.
//!
//! Exit codes are a stable contract: 0 success, 1 corpus or derivative-check
//! failure, 2 usage/parse errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod problem_file;
pub mod report;

use commands::SolveOptions;

#[derive(Parser)]
#[command(
    name = "lmm",
    version,
    about = "Finds critical points of equality-constrained minimization problems and \
             classifies them with the second-order test"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file (vars/objective/constraint/box lines)
    path: PathBuf,
    /// Number of multistart seeds
    #[arg(long)]
    starts: Option<usize>,
    /// Seed of the deterministic multistart scramble
    #[arg(long)]
    seed: Option<u64>,
    /// Stationarity tolerance on the residual infinity norm
    /// (deduplication widens accordingly)
    #[arg(long)]
    tol: Option<f64>,
    /// Emit a machine-readable JSON report
    #[arg(long)]
    json: bool,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            starts: self.starts,
            seed: self.seed,
            tol: self.tol,
            json: self.json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find and classify the critical points of a problem
    Solve(SolveArgs),
    /// Solve, then rank the critical points by objective value (with the
    /// caveats that ranking deserves)
    Rank(SolveArgs),
    /// Built-in example problems with known answers
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Compare exact derivatives against finite differences at a point
    CheckGrad {
        /// Problem file
        path: PathBuf,
        /// Evaluation point, comma-separated: "v1,v2,..."
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List case ids with one-line summaries
    List,
    /// Verify every case end to end (exit 1 on any failure)
    Run {
        /// Override the multistart seed of every case
        #[arg(long)]
        seed: Option<u64>,
        /// Emit a machine-readable JSON report
        #[arg(long)]
        json: bool,
    },
    /// Print a case as a problem file
    Export {
        /// Case id (see `corpus list`)
        id: String,
    },
}

/// Parses the command line and runs the command; returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => commands::cmd_solve(&args.path, &args.options()),
        Command::Rank(args) => commands::cmd_rank(&args.path, &args.options()),
        Command::Corpus { action } => match action {
            CorpusAction::List => commands::cmd_corpus_list(),
            CorpusAction::Run { seed, json } => commands::cmd_corpus_run(seed, json),
            CorpusAction::Export { id } => commands::cmd_corpus_export(&id),
        },
        Command::CheckGrad { path, point } => commands::cmd_check_grad(&path, &point),
    }
}

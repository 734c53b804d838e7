use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use gaudin_cli::config::RunConfig;
use gaudin_cli::{execute, CliError, CommandKind};

/// Numerical verification of the open XXZ Gaudin model with non-diagonal
/// boundaries: operator identities, Bethe roots, eigen checks, and the
/// determinant representations of partition functions and scalar products.
#[derive(Parser)]
#[command(name = "gaudin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// R-matrix and K-matrix identities: QYBE, unitarity, reflection
    /// equations, the classical limit, and transfer commutativity.
    CheckAlgebra(CommonArgs),
    /// Solve both Bethe-equation sets and write the roots file.
    SolveBethe(CommonArgs),
    /// Check loaded roots against every Gaudin Hamiltonian.
    VerifyEigen(CommonArgs),
    /// Determinant / recursion / brute-force comparisons of partition
    /// functions and scalar products.
    VerifyScalar(CommonArgs),
    /// Run every suite selected in the configuration.
    All(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (key = value sections); defaults to the built-in
    /// two-site instance.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Roots file to write (solve-bethe) or read (verify-*).
    #[arg(long)]
    roots: Option<PathBuf>,
    /// Override the master RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report file (JSON lines, appended).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the human summary; the machine report is still written.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GAUDIN_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::CheckAlgebra(a) => (CommandKind::CheckAlgebra, a),
        Command::SolveBethe(a) => (CommandKind::SolveBethe, a),
        Command::VerifyEigen(a) => (CommandKind::VerifyEigen, a),
        Command::VerifyScalar(a) => (CommandKind::VerifyScalar, a),
        Command::All(a) => (CommandKind::All, a),
    };
    match run(kind, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(kind: CommandKind, args: &CommonArgs) -> Result<ExitCode, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
        config.solver.seed = seed;
    }
    if let Some(roots) = &args.roots {
        config.roots_path = roots.clone();
    }
    if let Some(out) = &args.out {
        config.report_path = out.clone();
    }
    config.validate()?;

    let started = Instant::now();
    let outcome = execute(kind, &config)?;
    let elapsed = started.elapsed();
    outcome.report.write_jsonl(&config.report_path)?;
    if !args.quiet {
        if let Some(table) = &outcome.root_summary {
            print!("{table}");
        }
        outcome.report.print_summary(elapsed);
    }
    Ok(if outcome.report.failures() > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

//! Verification pipelines and reporting for the open-boundary XXZ Gaudin
//! crates: configuration loading, the four check suites, Bethe-root
//! persistence, and machine-readable JSON-lines reports.

pub mod config;
pub mod report;
pub mod suites;

use std::fmt::Write as _;

use thiserror::Error;

use config::RunConfig;
use report::VerificationReport;

#[derive(Debug, Error)]
pub enum CliError {
    /// Usage and configuration problems (exit code 2).
    #[error("config error: {0}")]
    Config(String),
    /// Filesystem problems writing or reading artifacts (exit code 2).
    #[error("io error: {0}")]
    Io(String),
    /// A check could not be evaluated (exit code 1).
    #[error("check error: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

/// Which pipeline a subcommand runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    CheckAlgebra,
    SolveBethe,
    VerifyEigen,
    VerifyScalar,
    All,
}

/// The result of one pipeline run: the report plus any extra human output
/// (the solve-bethe root table).
pub struct Outcome {
    pub report: VerificationReport,
    pub root_summary: Option<String>,
}

pub fn execute(kind: CommandKind, config: &RunConfig) -> Result<Outcome, CliError> {
    let mut report = VerificationReport::default();
    let mut root_summary = None;
    match kind {
        CommandKind::CheckAlgebra => {
            report.extend(suites::algebra_suite(config)?);
        }
        CommandKind::SolveBethe => {
            let (records, solved) = suites::bethe_suite(config);
            report.extend(records);
            suites::write_roots(&config.roots_path, &solved, &config.params)?;
            root_summary = Some(root_table(&solved));
        }
        CommandKind::VerifyEigen => {
            let sets = suites::load_roots(&config.roots_path, &config.params)?;
            report.extend(suites::gaudin_records(config)?);
            report.extend(suites::eigen_suite(config, &sets)?);
        }
        CommandKind::VerifyScalar => {
            let sets = suites::load_roots(&config.roots_path, &config.params)?;
            report.extend(suites::scalar_suite(config, &sets)?);
        }
        CommandKind::All => {
            if config.suites.algebra {
                report.extend(suites::algebra_suite(config)?);
            }
            let mut sets = Vec::new();
            if config.suites.bethe {
                let (records, solved) = suites::bethe_suite(config);
                report.extend(records);
                suites::write_roots(&config.roots_path, &solved, &config.params)?;
                root_summary = Some(root_table(&solved));
                sets = solved.into_iter().flat_map(|(_, s)| s).collect();
            } else if config.suites.eigen || config.suites.scalar {
                sets = suites::load_roots(&config.roots_path, &config.params)?;
            }
            if config.suites.eigen {
                report.extend(suites::gaudin_records(config)?);
                report.extend(suites::eigen_suite(config, &sets)?);
            }
            if config.suites.scalar {
                report.extend(suites::scalar_suite(config, &sets)?);
            }
        }
    }
    report.finalize();
    Ok(Outcome {
        report,
        root_summary,
    })
}

fn root_table(
    solved: &[(
        gaudin_core::bethe::Kind,
        Vec<gaudin_core::bethe::BetheRootSet>,
    )],
) -> String {
    let mut out = String::new();
    for (kind, sets) in solved {
        let _ = writeln!(out, "kind {} root sets:", kind.index());
        if sets.is_empty() {
            let _ = writeln!(out, "  (none converged)");
        }
        for (i, set) in sets.iter().enumerate() {
            let roots: Vec<String> = set
                .roots
                .iter()
                .map(|v| format!("{:+.12}{:+.12}i", v.re, v.im))
                .collect();
            let _ = writeln!(
                out,
                "  #{i:02} residual {:.3e}  roots [{}]",
                set.residual_norm,
                roots.join(", ")
            );
        }
    }
    out
}

//! `nmcond`: certify primitives, run the protocols, execute attack suites and
//! query the distribution oracle from JSON experiment configs.
//!
//! Exit status is 0 on success, 1 when a contract or baseline is violated and
//! 2 on usage errors.

mod certify;
mod config;
mod oracle;
mod output;
mod report;
mod run;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "nmcond", version, about = "Non-malleable condensers and privacy amplification at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; files are replaced atomically.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Clone, Default)]
pub struct ModeFlags {
    /// Enumerate every source point and tape.
    #[arg(long, conflicts_with = "trials")]
    pub exact: bool,
    /// Seeded sampling with this many trials.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verifier in the config's registry manifest.
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Seeded protocol runs, honest or under one script.
    Run {
        #[command(flatten)]
        common: Common,
        /// Master seed in hex; overrides the config.
        #[arg(long)]
        seed: Option<String>,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Run the attack suite and compare against committed baselines.
    AttackSuite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<String>,
        #[command(flatten)]
        mode: ModeFlags,
        /// Fail when a script has no committed baseline.
        #[arg(long)]
        strict_baselines: bool,
    },
    /// Evaluate the config's distribution-oracle queries.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strict_baselines: bool,
    },
    /// Render JSON reports as text tables.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Violation(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(anyhow::anyhow!(msg.into()))
    }

    /// Library errors: profile and fixed-point violations are contract
    /// failures, everything else is a usage problem.
    pub fn lib(e: nmcond::Error) -> Self {
        match e {
            nmcond::Error::Profile(_) | nmcond::Error::FixedPoint(_) => CliError::Violation(e.to_string()),
            other => CliError::Usage(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify { common } => certify::cmd_certify(&common.config, &common.out),
        Command::Run { common, seed, mode } => run::cmd_run(&common.config, &common.out, seed.as_deref(), &mode),
        Command::AttackSuite { common, seed, mode, strict_baselines } => {
            suite::cmd_attack_suite(&common.config, &common.out, seed.as_deref(), &mode, strict_baselines)
        }
        Command::Oracle { common, strict_baselines } => {
            oracle::cmd_oracle(&common.config, &common.out, strict_baselines)
        }
        Command::Report { files } => report::cmd_report(&files),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! `pvscale` command-line front end.
//!
//! Exit codes: `0` success, `1` a certificate failed, `2` configuration or
//! input error, `3` numerical failure (including a noise-dominated
//! scaling-limit measurement).

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::{parse_assignment, parse_file, ClaimSelection, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "pvscale", version, about = "Principal-value operators, bound certificates and scaling-limit studies")]
pub struct Cli {
    /// Plain-text `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override one config key; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate H, I or I_lambda of a catalog function on a y grid (CSV).
    Apply,
    /// Run bound certificates (JSON).
    Certify {
        /// Claim name, or `all`; overrides the `claim` key.
        #[arg(long)]
        claim: Option<String>,
    },
    /// Measure the I_lambda -> antiderivative convergence rate (CSV + JSON).
    LimitStudy,
    /// List the built-in test functions.
    Catalog,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(pvscale_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0} certificate(s) failed")]
    CertificateFailed(usize),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CertificateFailed(_) => 1,
            CliError::Config(_) | CliError::Input(_) | CliError::Write { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<pvscale_core::Error> for CliError {
    fn from(e: pvscale_core::Error) -> Self {
        use pvscale_core::Error as E;
        match e {
            E::NonFiniteIntegrand { .. } | E::DegenerateFit(_) => CliError::Numerical(e.to_string()),
            other => CliError::Input(other),
        }
    }
}

/// Builds the resolved configuration from the file, `--set` pairs and the
/// subcommand's own flags, in that order.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut pairs = match &cli.config {
        Some(p) => parse_file(p)?,
        None => Vec::new(),
    };
    for s in &cli.set {
        let kv = parse_assignment(s).ok_or_else(|| ConfigError::Syntax {
            path: "--set".to_string(),
            line: 0,
            text: s.clone(),
        })?;
        pairs.push(kv);
    }
    if let Command::Certify { claim: Some(c) } = &cli.command {
        pairs.push(("claim".to_string(), c.clone()));
    }
    let mut cfg = RunConfig::default();
    cfg.apply(&pairs)?;
    Ok(cfg)
}

/// A finished artifact: file name (used with `output_dir`) and contents.
pub struct Artifact {
    pub name: &'static str,
    pub body: String,
}

fn emit(cfg: &RunConfig, artifacts: &[Artifact], stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
            for a in artifacts {
                let path = dir.join(a.name);
                fs::write(&path, &a.body).map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
            }
        }
        None => {
            // Only the primary artifact goes to stdout.
            if let Some(a) = artifacts.first() {
                stdout
                    .write_all(a.body.as_bytes())
                    .map_err(|source| CliError::Write { path: "stdout".to_string(), source })?;
            }
        }
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let outcome = match &cli.command {
        Command::Apply => commands::apply(&cfg)?,
        Command::Certify { .. } => commands::certify(&cfg, matches!(cfg.claim, ClaimSelection::All))?,
        Command::LimitStudy => commands::limit_study(&cfg)?,
        Command::Catalog => commands::catalog(&cfg)?,
    };
    for line in &outcome.summary {
        let _ = writeln!(stderr, "{line}");
    }
    emit(&cfg, &outcome.artifacts, stdout)?;
    match outcome.status {
        commands::Status::Ok => Ok(()),
        commands::Status::CertificatesFailed(n) => Err(CliError::CertificateFailed(n)),
        commands::Status::NoiseDominated(msg) => Err(CliError::Numerical(msg)),
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version are not errors.
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::CertificateFailed(2).exit_code(), 1);
        assert_eq!(CliError::Config(ConfigError::UnknownKey("k".into())).exit_code(), 2);
        assert_eq!(CliError::from(pvscale_core::Error::UnknownFunction("f".into())).exit_code(), 2);
        assert_eq!(CliError::from(pvscale_core::Error::DegenerateFit(1)).exit_code(), 3);
        assert_eq!(CliError::Numerical("noise".into()).exit_code(), 3);
    }
}

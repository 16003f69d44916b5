//! Command-line driver for the `gl3ff` library: solves Bethe equations,
//! tabulates form factors, runs the oracle and identity suites, and evaluates
//! the local-operator ratio. Outputs are JSON or CSV, and a fixed `rng_seed`
//! reproduces them byte for byte.

pub mod catalog;
pub mod config;
pub mod error;
pub mod ff;
pub mod identities;
pub mod local_op;
pub mod report;
pub mod solve;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gl3ff::Complex64;

use config::{check_local_op, Format, LocalOpBlock, RunConfig};
use error::{CliError, CliResult, EXIT_CHECK_FAILED, EXIT_NUMERICAL, EXIT_PASS};
use report::{digest, Report};

#[derive(Debug, Parser)]
#[command(name = "gl3ff", version, about = "Form factors of GL(3) monodromy-matrix entries, with a spin-chain oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `rng_seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Replaces every check tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bethe roots of the configured sector.
    Solve,
    /// Form factors of the configured kinds over the z-grid.
    Ff(StatePair),
    /// Oracle comparisons; exit status 1 if any record fails.
    Verify,
    /// Oracle-free identities on random and on-shell inputs.
    Identities,
    /// The local-operator ratio at one point.
    LocalOp(LocalOpArgs),
}

/// Left (`C`) and right (`B`) states, read from roots files. A missing file
/// means the vacuum.
#[derive(Debug, Clone, Args)]
pub struct StatePair {
    #[arg(long)]
    pub left: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub left_index: usize,
    #[arg(long)]
    pub right: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub right_index: usize,
}

#[derive(Debug, Clone, Args)]
pub struct LocalOpArgs {
    #[command(flatten)]
    pub states: StatePair,
    /// Site m, counted from 1.
    #[arg(long)]
    pub site: Option<usize>,
    #[arg(long)]
    pub alpha: Option<usize>,
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_im: Option<f64>,
}

/// The two chains checked by `verify` when no config is given.
pub fn desk_configs() -> Vec<(String, RunConfig)> {
    vec![("L2".to_string(), RunConfig::desk(2, 11)), ("L3".to_string(), RunConfig::desk(3, 5))]
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) -> CliResult<()> {
    if let Some(s) = cli.seed {
        cfg.rng_seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.task.tol = Some(t);
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = &cli.out {
        cfg.output.path = Some(p.clone());
    }
    cfg.validate()
}

fn load(cli: &Cli) -> CliResult<Vec<(String, RunConfig)>> {
    let mut cfgs = match &cli.config {
        Some(p) => vec![(String::new(), RunConfig::from_path(p)?)],
        None if matches!(cli.command, Command::Verify) => desk_configs(),
        None => vec![(String::new(), RunConfig::desk(2, 11))],
    };
    for (_, cfg) in &mut cfgs {
        apply_overrides(cli, cfg)?;
    }
    Ok(cfgs)
}

fn sink(cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn local_op_block(args: &LocalOpArgs, cfg: &RunConfig) -> CliResult<LocalOpBlock> {
    let base = cfg.task.local_op.clone();
    let pick = |flag: Option<usize>, from: Option<usize>, name: &str| {
        flag.or(from).ok_or_else(|| CliError::config(format!("local-op needs --{name} or task.local_op.{name}")))
    };
    let z_base = base.as_ref().map(|b| b.z_eval);
    let z_eval = match (args.z_re, args.z_im, z_base) {
        (None, None, Some(z)) => z,
        (re, im, z) => {
            let z = z.unwrap_or_default();
            Complex64::new(re.unwrap_or(z.re), im.unwrap_or(z.im))
        }
    };
    let op = LocalOpBlock {
        site: pick(args.site, base.as_ref().map(|b| b.site), "site")?,
        alpha: pick(args.alpha, base.as_ref().map(|b| b.alpha), "alpha")?,
        beta: pick(args.beta, base.as_ref().map(|b| b.beta), "beta")?,
        z_eval,
    };
    check_local_op(&op, cfg.model.length)?;
    Ok(op)
}

/// Runs one parsed command line and returns the process exit status.
/// Diagnostics go to standard error.
pub fn execute(cli: &Cli) -> u8 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gl3ff: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<u8> {
    let cfgs = load(cli)?;
    let (_, cfg) = &cfgs[0];
    let cfg_digest = digest(&cfgs.iter().map(|(_, c)| c).collect::<Vec<_>>());
    let format = cfg.output.format;
    match &cli.command {
        Command::Solve => {
            let out = solve::run(cfg, cfg_digest)?;
            out.write(format, &mut *sink(cfg)?)?;
            Ok(EXIT_PASS)
        }
        Command::Ff(states) => {
            let left = ff::load_roots(states.left.as_deref(), states.left_index)?;
            let right = ff::load_roots(states.right.as_deref(), states.right_index)?;
            let out = ff::run(cfg, cfg_digest, left, right)?;
            out.write(format, &mut *sink(cfg)?)?;
            Ok(if out.numerical_failure() { EXIT_NUMERICAL } else { EXIT_PASS })
        }
        Command::Verify | Command::Identities => {
            let name = if matches!(cli.command, Command::Verify) { "verify" } else { "identities" };
            let mut report = Report::new(name, cfg_digest);
            for (prefix, c) in &cfgs {
                if matches!(cli.command, Command::Verify) {
                    verify::run(c, prefix, &mut report)?;
                } else {
                    identities::run(c, &mut report)?;
                }
            }
            report.write(format, &mut *sink(cfg)?)?;
            Ok(if report.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::LocalOp(args) => {
            let op = local_op_block(args, cfg)?;
            let left = ff::load_roots(args.states.left.as_deref(), args.states.left_index)?;
            let right = ff::load_roots(args.states.right.as_deref(), args.states.right_index)?;
            let out = local_op::run(cfg, cfg_digest, &op, &left, &right)?;
            out.write(format, &mut *sink(cfg)?)?;
            Ok(EXIT_PASS)
        }
    }
}

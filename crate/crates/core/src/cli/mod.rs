//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 check failure, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    run_reduce, run_sweep, run_trajectory, run_verify, summarize, Bound, CheckResult, SweepRow, TrajectorySummary,
    VerificationReport,
};
pub use scenario::{ActionForm, Format, Numerics, Scenario, SweepSpec};

use crate::dynamics::TurningPolicy;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qsep", version, about = "Quantum reduced actions for separable potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the residual checks and write a verification report
    Verify(CommonArgs),
    /// Integrate the quantum law of motion
    Trajectory(CommonArgs),
    /// Reduce a tensor action to six gammas
    Reduce(CommonArgs),
    /// Trajectories for a seeded family of random gammas
    Sweep(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML)
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; must exist
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub tp_policy: Option<PolicyArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    Reflect,
    Transmit,
}

impl From<PolicyArg> for TurningPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Reflect => TurningPolicy::Reflect,
            PolicyArg::Transmit => TurningPolicy::Transmit,
        }
    }
}

/// Load the scenario and apply flag overrides.
pub fn prepare(args: &CommonArgs) -> Result<Scenario, CliError> {
    let mut sc = Scenario::load(&args.config)?;
    if let Some(seed) = args.seed {
        sc.seed = seed;
        sc.fit.seed = seed;
    }
    if let Some(out) = &args.out {
        sc.out_dir = out.clone();
    }
    if let Some(f) = args.format {
        sc.format = f;
    }
    if let Some(p) = args.tp_policy {
        if let Some((_, cfg)) = sc.motion.as_mut() {
            cfg.tp_policy = [p.into(); 3];
        }
    }
    if !sc.out_dir.is_dir() {
        return Err(CliError::Config(format!(
            "output.dir: {} does not exist or is not a directory",
            sc.out_dir.display()
        )));
    }
    Ok(sc)
}

fn execute(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::Verify(args) => {
            let sc = prepare(args)?;
            let report = run_verify(&sc)?;
            commands::write_verify(&report, &sc.out_dir, sc.format)?;
            for c in &report.checks {
                log::info!("{}: {:.3e} ({})", c.name, c.value, if c.passed { "pass" } else { "FAIL" });
            }
            if report.passed {
                Ok(0)
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(CliError::Check(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Trajectory(args) => {
            let sc = prepare(args)?;
            let (tr, summary) = run_trajectory(&sc)?;
            commands::write_trajectory(&tr, &summary, &sc.out_dir)?;
            Ok(0)
        }
        Command::Reduce(args) => {
            let sc = prepare(args)?;
            let report = run_reduce(&sc)?;
            commands::write_reduce(&report, &sc.out_dir, sc.format)?;
            match report.gammas() {
                Some(g) => log::info!("separable, gammas {g:?}"),
                None => log::info!("not separable, best residual {:.3e}", report.residual),
            }
            Ok(0)
        }
        Command::Sweep(args) => {
            let sc = prepare(args)?;
            let rows = run_sweep(&sc)?;
            commands::write_sweep(&rows, &sc.out_dir, sc.format)?;
            Ok(0)
        }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qsep: {e}");
            e.exit_code()
        }
    }
}

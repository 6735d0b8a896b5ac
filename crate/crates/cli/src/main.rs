use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use oaqec::{emit, run, Command, Format, Job, Overrides};

/// Operator algebra error correction: conservation and correctability tests,
/// recovery channels, and their applications.
///
/// Matrix files are {"rows": r, "cols": c, "data": [[re, im], ...]} (row-major)
/// or nested real arrays. Stochastic matrices use the column convention:
/// entry (i, j) is the probability of going from j to i, so columns sum to one.
///
/// Exit status: 0 on success, 2 when the tested condition fails, 1 on input errors.
#[derive(Parser)]
#[command(name = "oaqec", version)]
struct Cli {
    /// Pass/fail threshold on residual norms [default: 1e-8].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative rank cutoff for subspace computations [default: 1e-10].
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Seed for the randomized block decomposition [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Inputs {
    /// Input file as name=path; repeat a name for list inputs.
    #[arg(short, long = "input", value_parser = pair)]
    inputs: Vec<(String, String)>,
}

#[derive(Args)]
struct RecoverInputs {
    #[command(flatten)]
    inputs: Inputs,
    /// Write the recovery channel file here.
    #[arg(long)]
    recovery_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Run a JSON manifest {"command", "inputs", "options"}.
    Run { manifest: PathBuf },
    /// Block structure of the algebra generated by `generators` (optional `projector`).
    Decompose(Inputs),
    /// Conservation test: `channel`, `generators`, optional `projector`.
    Conserve(Inputs),
    /// Correctability test: `channel`, `generators`, optional `projector`.
    Correct(Inputs),
    /// Largest correctable algebra: `channel`, optional `projector`.
    MaxCorrectable(Inputs),
    /// Transpose-channel recovery: `channel`, optional `projector` and `generators`.
    Recover(RecoverInputs),
    /// Checks a recovery: `recovery`, `channel`, `generators`, optional `projector`.
    Verify(Inputs),
    /// Confusability classes of `stochastic` and verdicts for `observables`.
    Classical(Inputs),
    /// Correctable algebra after teleportation with `unitaries` and optional `stochastic` flag noise.
    Teleport(Inputs),
    /// Information flow of `unitary` on system (x) apparatus with apparatus state `apparatus`.
    Flow(Inputs),
}

fn pair(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("expected name=path, got {s}"))?;
    Ok((k.to_string(), v.to_string()))
}

fn job(cli: Cli) -> Result<Job> {
    let mut over = Overrides {
        tol: cli.tol,
        rank_tol: cli.rank_tol,
        seed: cli.seed,
        format: cli.format,
        out: cli.out,
        recovery_out: None,
    };
    let (command, inputs) = match cli.command {
        Sub::Run { manifest } => return Job::from_manifest(&manifest, over),
        Sub::Decompose(i) => (Command::Decompose, i),
        Sub::Conserve(i) => (Command::Conserve, i),
        Sub::Correct(i) => (Command::Correct, i),
        Sub::MaxCorrectable(i) => (Command::MaxCorrectable, i),
        Sub::Recover(r) => {
            over.recovery_out = r.recovery_out;
            (Command::Recover, r.inputs)
        }
        Sub::Verify(i) => (Command::Verify, i),
        Sub::Classical(i) => (Command::Classical, i),
        Sub::Teleport(i) => (Command::Teleport, i),
        Sub::Flow(i) => (Command::Flow, i),
    };
    Job::from_pairs(command, &inputs.inputs, over)
}

fn main() -> ExitCode {
    let result = job(Cli::parse()).and_then(|job| {
        let (status, report) = run(&job)?;
        if let Some(text) = emit(&report, &job)? {
            print!("{text}");
        }
        Ok(status)
    });
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use detmodes_cli::commands::{
    cmd_grashof, cmd_simulate, cmd_twin, cmd_validate, format_report, write_json,
};
use detmodes_cli::sweep::{cmd_sweep, SweepSpec};
use detmodes_cli::{CliError, RunConfig};

/// Reaction-diffusion simulations and determining-modes diagnostics.
///
/// Exit codes: 0 success, 1 validation failure, 2 runtime error or
/// divergence, 3 configuration error.
#[derive(Parser)]
#[command(name = "detmodes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural properties P1-P6 of the configured model.
    Validate { config: PathBuf },
    /// Integrate the reference system and write its trajectory.
    Simulate {
        config: PathBuf,
        /// Output directory, overriding `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run the reference and perturbed twin and evaluate the mode split.
    Twin {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Grashof report as JSON.
    Grashof {
        config: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep of twin experiments.
    Sweep { spec: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { config } => {
            let report = cmd_validate(&RunConfig::load(&config)?)?;
            print!("{}", format_report(&report));
            if !report.passes() {
                let failed: Vec<String> =
                    report.failures().iter().map(|p| format!("{p:?}")).collect();
                return Err(CliError::Validation(failed.join(", ")));
            }
        }
        Command::Simulate {
            config,
            out,
            resume,
        } => {
            let cfg = RunConfig::load(&config)?;
            let out = out.unwrap_or_else(|| cfg.output.directory.clone());
            let summary = cmd_simulate(&cfg, &out, resume.as_deref())?;
            println!(
                "simulated to t = {} ({} steps, {} rows, {} positivity warnings) in {}",
                summary.t,
                summary.step,
                summary.rows,
                summary.positivity_warnings.len(),
                out.display()
            );
        }
        Command::Twin { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let out = out.unwrap_or_else(|| cfg.output.directory.clone());
            let outcome = cmd_twin(&cfg, &out)?;
            let v = &outcome.verdict;
            println!(
                "(M, N) = ({}, {}), verdict {:?}, tail P-sum {:e}, tail Q-sum {:e}",
                v.m, v.n, v.determining.verdict, v.determining.p_sum_tail, v.determining.q_sum_tail
            );
            let check = outcome.gronwall?;
            println!(
                "Gronwall: g = {:e}, Gamma = {:e}, {} envelope violations",
                check.gronwall_gamma,
                check.gamma_upper,
                check.violations().len()
            );
        }
        Command::Grashof { config, out } => {
            let report = cmd_grashof(&RunConfig::load(&config)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
        }
        Command::Sweep { spec } => {
            let spec = SweepSpec::load(&spec)?;
            let rows = cmd_sweep(&spec)?;
            let failed = rows.iter().filter(|r| r.verdict.is_none()).count();
            println!(
                "{} cells, {} failed; summary in {}",
                rows.len(),
                failed,
                spec.root()?.join("summary.csv").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use clap::{Args, Parser, Subcommand, ValueEnum};
use isostokes_cli::commands::{self, RunOptions};
use isostokes_cli::report::Report;
use isostokes_cli::spec::{Overrides, Problem, ProblemSpec, SpecError};
use isostokes_cli::write_outputs;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_SPEC: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Stokes matrices, connection data and isomonodromic deformations of dY/dz = (Λ + A/z) Y.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stokes rays, labels, sectors, branch cuts and crossing-locus samples.
    Rays(Opts),
    /// Connection coefficients and Stokes matrices (formula and direct matching).
    Stokes(Opts),
    /// Transport along the spec's paths with constancy and decay tables.
    Deform(Opts),
    /// Levelt normal form data at the coalescing group points.
    Levelt(Opts),
    /// Integrability residuals and vanishing conditions.
    Check(Opts),
}

#[derive(Args)]
struct Opts {
    /// Problem definition (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory; overrides the spec's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Agreement tolerance for coherence and constancy verdicts.
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation order of the formal and Levelt series.
    #[arg(long)]
    order: Option<usize>,
    /// Shift of the exponents applied before the connection formula.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Run the direct-matching oracle.
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    oracle: Toggle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn load(opts: &Opts) -> Result<Problem, SpecError> {
    let overrides = Overrides {
        tol: opts.tol,
        order: opts.order,
        gamma: opts.gamma,
        out: opts.out.clone(),
    };
    ProblemSpec::load(&opts.spec)?.validate(&overrides)
}

fn emit<T: Serialize>(problem: &Problem, report: &Report<T>, tables: &[(&str, Vec<u8>)]) -> ExitCode {
    match write_outputs(&problem.output_dir, report, tables) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write to {}: {e}", problem.output_dir.display());
            return ExitCode::from(EXIT_SPEC);
        }
    }
    let mut failed = false;
    for stage in report.stages.iter().filter(|s| s.status == isostokes_cli::report::StageStatus::Failed) {
        failed = true;
        eprintln!("stage failed: {}: {}", stage.name, stage.detail.as_deref().unwrap_or(""));
    }
    if failed {
        ExitCode::from(EXIT_NUMERICAL)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Rays(opts) | Command::Stokes(opts) | Command::Deform(opts) | Command::Levelt(opts) | Command::Check(opts)) = &cli.command;
    let problem = match load(opts) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SPEC);
        }
    };
    let run = RunOptions {
        oracle: opts.oracle == Toggle::On,
    };
    let outcome = match &cli.command {
        Command::Rays(_) => {
            let r = commands::cmd_rays(&problem, run);
            Ok(emit(&problem, &r, &commands::rays_tables(&r.results)))
        }
        Command::Stokes(_) => Ok(emit(&problem, &commands::cmd_stokes(&problem, run), &[])),
        Command::Deform(_) => commands::cmd_deform(&problem, run).map(|r| emit(&problem, &r, &commands::decay_table(&r.results))),
        Command::Levelt(_) => commands::cmd_levelt(&problem, run).map(|r| emit(&problem, &r, &[])),
        Command::Check(_) => Ok(emit(&problem, &commands::cmd_check(&problem, run), &[])),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_SPEC)
    })
}

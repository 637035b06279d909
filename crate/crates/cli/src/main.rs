//! `pph`: batch verification for probabilistic metric spaces.

mod commands;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _};
use clap::{Parser, Subcommand};
use serde_json::json;

use probmetric::distfn::DEFAULT_LEVY_TOL;
use probmetric::TriangleFn;

use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "pph", version, about = "Verify probabilistic metric spaces and the probabilistic Hausdorff metric")]
struct Cli {
    /// Tolerance for Lévy-distance bisection and convergence tests.
    #[arg(long, global = true, default_value_t = DEFAULT_LEVY_TOL)]
    tol: f64,
    /// Triangle function: min, w, prod or convmin.
    #[arg(long, global = true)]
    tau: Option<TriangleFn>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Where to write the command's artifact (plot data or space file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Strictly decreasing positive dilation levels, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    eps_grid: Option<Vec<f64>>,
    /// Strictly decreasing positive Cauchy levels, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    t_grid: Option<Vec<f64>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a space file against PM1-PM4.
    Validate { space: PathBuf },
    /// Excesses and Hausdorff distance between two sets of points.
    Hausdorff {
        space: PathBuf,
        /// Labels of the first set, comma separated.
        #[arg(short = 'a', long = "set-a", value_delimiter = ',', required = true)]
        a: Vec<String>,
        /// Labels of the second set, comma separated.
        #[arg(short = 'b', long = "set-b", value_delimiter = ',', required = true)]
        b: Vec<String>,
    },
    /// Cauchy test, limit set, chain and convergence series for a set sequence.
    Limit { space: PathBuf, sets: PathBuf },
    /// Build an E-space from paired samples.
    Espace { samples: PathBuf },
    /// Triangle-function, Lévy-metric and random-normed-space suites.
    Axioms {
        /// Number of seeded random probe functions.
        #[arg(long, default_value_t = 5)]
        probes: usize,
        /// CSV of probe vectors for the random-normed-space axioms.
        #[arg(long)]
        rn_probes: Option<PathBuf>,
        /// CSV of vertices whose convex hull is dilated.
        #[arg(long)]
        vertices: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

/// Settings shared by every command.
#[derive(Debug)]
pub struct Context {
    pub tol: f64,
    pub tau: Option<TriangleFn>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub eps_grid: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub max_triples: Option<usize>,
}

fn check_grid(name: &str, grid: &Option<Vec<f64>>) -> anyhow::Result<()> {
    if let Some(g) = grid {
        if g.is_empty() || g.iter().any(|x| !(*x > 0.0 && x.is_finite())) || g.windows(2).any(|w| w[1] >= w[0]) {
            bail!("--{name} must be strictly decreasing positive numbers, got {g:?}");
        }
    }
    Ok(())
}

fn context(cli: &Cli) -> anyhow::Result<Context> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        bail!("--tol must be positive, got {}", cli.tol);
    }
    check_grid("eps-grid", &cli.eps_grid)?;
    check_grid("t-grid", &cli.t_grid)?;
    let max_triples = match std::env::var("PPH_MAX_TRIPLES") {
        Ok(v) => Some(v.trim().parse().with_context(|| format!("PPH_MAX_TRIPLES must be a nonnegative integer, got {v:?}"))?),
        Err(_) => None,
    };
    Ok(Context {
        tol: cli.tol,
        tau: cli.tau,
        seed: cli.seed,
        out: cli.out.clone(),
        eps_grid: cli.eps_grid.clone(),
        t_grid: cli.t_grid.clone(),
        max_triples,
    })
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let ctx = context(&cli)?;
    let (checks, artifacts) = match &cli.command {
        Command::Validate { space } => commands::validate(&ctx, space)?,
        Command::Hausdorff { space, a, b } => commands::hausdorff(&ctx, space, a, b)?,
        Command::Limit { space, sets } => commands::limit(&ctx, space, sets)?,
        Command::Espace { samples } => commands::espace(&ctx, samples)?,
        Command::Axioms { probes, rn_probes, vertices, trials } => {
            commands::axioms(&ctx, *probes, rn_probes.as_deref(), vertices.as_deref(), *trials)?
        }
    };
    let config = json!({
        "tol": ctx.tol,
        "tau": ctx.tau,
        "seed": ctx.seed,
        "out": ctx.out,
        "eps_grid": ctx.eps_grid,
        "t_grid": ctx.t_grid,
        "max_triples": ctx.max_triples,
    });
    let command = std::env::args().skip(1).collect();
    Ok(Report::new(command, config, ctx.seed, checks, artifacts))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            println!("{text}");
            ExitCode::from(report.exit_status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

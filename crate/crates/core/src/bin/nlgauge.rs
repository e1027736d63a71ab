//! `nlgauge` command-line front end.
//!
//! ```text
//! nlgauge simulate     scenario.toml [--out DIR]
//! nlgauge gauge-check  scenario.toml [--out DIR]
//! nlgauge convergence  scenario.toml [--out DIR]
//! nlgauge mixture-demo scenario.toml [--out DIR]
//! nlgauge sweep        scenario.toml [--out DIR]
//! ```
//!
//! Exit codes: 0 success, 2 config error, 3 numerical abort, 4 threshold
//! exceeded, 1 i/o failure. `NLGAUGE_WORKERS` bounds the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlgauge::cli::config::ScenarioConfig;
use nlgauge::cli::{self, CliError};

#[derive(Parser)]
#[command(name = "nlgauge", version, about = "Nonlinear gauge transformations of the Schrodinger equation")]
struct Cli {
    /// Worker threads for parallel runs; defaults to the number of cores.
    #[arg(long, env = "NLGAUGE_WORKERS", global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write diagnostics, report and snapshots.
    Simulate(Common),
    /// Compare direct integration of the gauge family with the conjugated linear flow.
    GaugeCheck(Common),
    /// Measure the observed order over the `[convergence]` time steps.
    Convergence(Common),
    /// Evolve two decompositions of one mixture and compare expectations.
    MixtureDemo(Common),
    /// Run the Cartesian product of the `[sweep]` parameters.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Simulate(c)
        | Command::GaugeCheck(c)
        | Command::Convergence(c)
        | Command::MixtureDemo(c)
        | Command::Sweep(c) => c,
    };
    let cfg = ScenarioConfig::from_path(&common.config)?;
    let dir = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    match cli.command {
        Command::Simulate(_) => {
            let r = cli::simulate(&cfg, &dir)?;
            for (k, v) in &r.final_metrics {
                println!("{k:>14} = {v:.10e}");
            }
        }
        Command::GaugeCheck(_) => {
            let r = cli::gauge_check(&cfg, &dir)?;
            for l in &r.levels {
                println!("dt = {:.3e}  deviation = {:.3e}", l.dt, l.deviation);
            }
            println!("slope = {:.3}", r.slope);
            for (label, v) in &r.equivalence {
                println!("{label:>15} = {v:.3e}");
            }
        }
        Command::Convergence(_) => {
            let r = cli::convergence(&cfg, &dir)?;
            for i in 0..r.dt.len() {
                println!("dt = {:.3e}  error = {:.3e}  order = {:.3}", r.dt[i], r.error[i], r.order[i]);
            }
        }
        Command::MixtureDemo(_) => {
            let r = cli::mixture_demo(&cfg, &dir)?;
            println!("final divergence = {:.3e}  peak = {:.3e}", r.final_divergence, r.peak_divergence);
        }
        Command::Sweep(_) => {
            let r = cli::sweep(&cfg, &dir)?;
            let failed = r.rows.iter().filter(|row| row.error.is_some()).count();
            println!("{} runs, {failed} failed", r.rows.len());
        }
    }
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Drives a TOML scenario through the same runner as the `nlgauge` binary,
//! writing into a temporary directory.
//!
//! `cargo run --example scenario_run -- scenarios/sweep_dg.toml`

use nlgauge::cli::{self, config::ScenarioConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "scenarios/free_gaussian.toml".into());
    let cfg = match ScenarioConfig::from_path(path.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let dir = std::env::temp_dir().join(format!("nlgauge-{}", &cfg.hash()[..12]));
    println!("config {path}  sha256 {}", cfg.hash());
    let outcome = if cfg.sweep.is_some() {
        cli::sweep(&cfg, &dir).map(|r| {
            for row in &r.rows {
                println!("{:?} -> {:?} {:?}", row.values, row.metrics.get("norm_drift"), row.error);
            }
        })
    } else {
        cli::simulate(&cfg, &dir).map(|r| println!("{:#?}", r.final_metrics))
    };
    match outcome {
        Ok(()) => println!("outputs in {}", dir.display()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Construction, Family, ScenarioConfig, SCHEMA_VERSION};
use super::output::{cell, num, diagnostics_csv, prepare_dir, write_json, Csv, DiagnosticRow, RunReport};
use super::{CliError, CliResult};
use crate::ensembles::{decomposition_divergence, equivalent_decompositions, ObservableSet};
use crate::error::Result;
use crate::evolution::{conjugated_evolve, evolve, EvolveOptions, Trajectory};
use crate::field::{write_snapshot, Grid, WaveFunction};
use crate::observables::{equivalence_table_check, BorelBin, EquivalenceRow, LinearProjection};

fn integrate(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let grid = cfg.build_grid()?;
    let psi = cfg.build_initial(&grid)?;
    let params = cfg.build_params(&grid)?;
    evolve(&psi, &params, &cfg.evolve_options())
}

fn final_metrics(traj: &Trajectory) -> BTreeMap<String, f64> {
    let first = traj.diagnostics[0];
    let last = *traj.diagnostics.last().expect("trajectory records the initial state");
    BTreeMap::from([
        ("t".to_string(), last.t),
        ("norm".to_string(), last.norm),
        ("norm_drift".to_string(), (last.norm - first.norm).abs()),
        ("linear_energy".to_string(), last.linear_energy),
        ("max_abs".to_string(), last.max_abs),
        ("dt".to_string(), traj.dt),
        ("steps".to_string(), traj.steps as f64),
    ])
}

/// Runs the scenario without touching the filesystem.
pub fn simulate_in_memory(cfg: &ScenarioConfig) -> CliResult<(Trajectory, BTreeMap<String, f64>)> {
    let traj = integrate(cfg)?;
    let metrics = final_metrics(&traj);
    Ok((traj, metrics))
}

/// Writes `diagnostics.csv`, `report.json`, `config.resolved.toml` and, if
/// enabled, one `snapshot_NNNNN.gfld` per record.
pub fn simulate(cfg: &ScenarioConfig, dir: &Path) -> CliResult<RunReport> {
    prepare_dir(dir, cfg)?;
    let hash = cfg.hash();
    let start = Instant::now();
    let outcome = integrate(cfg);
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        config_sha256: hash.clone(),
        wall_clock_seconds: 0.0,
        diagnostics: Vec::new(),
        final_metrics: BTreeMap::new(),
        abort_reason: None,
    };
    let result = match outcome {
        Ok(traj) => {
            report.diagnostics = traj.diagnostics.iter().map(DiagnosticRow::from).collect();
            report.final_metrics = final_metrics(&traj);
            diagnostics_csv(&hash, &report.diagnostics).write(&dir.join("diagnostics.csv"))?;
            if cfg.output.snapshots {
                for (k, psi) in traj.states.iter().enumerate() {
                    let file = fs::File::create(dir.join(format!("snapshot_{k:05}.gfld")))?;
                    write_snapshot(psi, BufWriter::new(file))?;
                }
            }
            Ok(())
        }
        Err(e) => {
            let e = CliError::from(e);
            report.abort_reason = Some(e.to_string());
            Err(e)
        }
    };
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    write_json(&dir.join("report.json"), &report)?;
    result.map(|()| report)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelDeviation {
    pub dt: f64,
    /// Largest relative L2 deviation over the recorded times.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeCheckReport {
    pub schema_version: u32,
    pub config_sha256: String,
    pub levels: Vec<LevelDeviation>,
    /// Least-squares slope of `ln deviation` against `ln dt`; `NaN` when
    /// fewer than two levels have a nonzero deviation.
    pub slope: f64,
    /// Largest deviation per equivalence-table row at the first level.
    pub equivalence: BTreeMap<String, f64>,
    pub passed: bool,
}

fn trajectory_deviation(direct: &Trajectory, oracle: &Trajectory) -> Result<Vec<(f64, f64)>> {
    direct
        .times
        .iter()
        .zip(direct.states.iter().zip(&oracle.states))
        .map(|(&t, (a, b))| Ok((t, a.distance(b)? / b.norm())))
        .collect()
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Direct integration of the gauge family against the conjugated linear
/// flow at each `[gauge_check]` level, plus the equivalence table at the
/// first level. Writes `gauge_check.csv` and `gauge_check.json`.
pub fn gauge_check(cfg: &ScenarioConfig, dir: &Path) -> CliResult<GaugeCheckReport> {
    if cfg.equation.family != Family::Gauge {
        return Err(CliError::Config("gauge-check needs equation.family = \"gauge\"".into()));
    }
    let grid = cfg.build_grid()?;
    let params = cfg.build_params(&grid)?;
    let n = cfg.build_gauge(&grid)?;
    let potential = cfg.build_potential(&grid)?;
    let (hbar, mass) = (cfg.equation.hbar, cfg.equation.mass);
    let psi = cfg.build_initial(&grid)?;
    let psi0 = n.apply(&psi, 0.0)?;
    let check = cfg.gauge_check.clone().unwrap_or_default();
    let dt = cfg.integrator.dt;
    let levels = check.levels.clone().unwrap_or_else(|| vec![dt, dt / 2.0, dt / 4.0]);
    if levels.is_empty() || levels.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(CliError::Config("gauge_check.levels: need positive time steps".into()));
    }
    prepare_dir(dir, cfg)?;
    let runs = levels
        .par_iter()
        .map(|&level| {
            let opts = EvolveOptions { dt: level, ..cfg.evolve_options() };
            let direct = evolve(&psi0, &params, &opts)?;
            let oracle = conjugated_evolve(&psi0, &n, potential.as_ref(), hbar, mass, &opts)?;
            trajectory_deviation(&direct, &oracle)
        })
        .collect::<Result<Vec<_>>>()?;
    let level_devs: Vec<LevelDeviation> = levels
        .iter()
        .zip(&runs)
        .map(|(&dt, r)| LevelDeviation { dt, deviation: r.iter().map(|p| p.1).fold(0.0, f64::max) })
        .collect();
    let slope = fit_slope(&level_devs.iter().map(|l| (l.dt, l.deviation)).collect::<Vec<_>>());

    let observables = ObservableSet::default_set(&grid, cfg.seed)?;
    let projections: Vec<LinearProjection> = observables.items().iter().map(|e| e.inner().clone()).collect();
    let bins = BorelBin::tiling(&grid, 0, 10)?;
    let opts = EvolveOptions { dt: levels[0], ..cfg.evolve_options() };
    let table = equivalence_table_check(&psi, &n, &projections, &bins, potential.as_ref(), hbar, mass, &opts)?;

    let hash = cfg.hash();
    let mut csv = Csv::new(&hash, &["t", "row_label", "deviation"]);
    for (&(t, dev), row) in runs[0].iter().zip(&table.rows) {
        csv.push(vec![num(t), cell("trajectory"), num(dev)]);
        for (label, v) in EquivalenceRow::LABELS.iter().zip(row.values()) {
            csv.push(vec![num(row.t), cell(label), num(v)]);
        }
    }
    csv.write(&dir.join("gauge_check.csv"))?;

    let mut failures = Vec::new();
    if let Some(tol) = check.tolerance {
        if !(level_devs[0].deviation <= tol) {
            failures.push(format!("deviation {:e} at dt = {:e} exceeds {tol:e}", level_devs[0].deviation, levels[0]));
        }
    }
    if let (Some(order), Some(spread)) = (check.order, check.order_tolerance) {
        if !((slope - order).abs() <= spread) {
            failures.push(format!("slope {slope:.3} outside {order} +- {spread}"));
        }
    }
    let report = GaugeCheckReport {
        schema_version: SCHEMA_VERSION,
        config_sha256: hash,
        levels: level_devs,
        slope,
        equivalence: EquivalenceRow::LABELS.iter().map(|l| l.to_string()).zip(table.max()).collect(),
        passed: failures.is_empty(),
    };
    write_json(&dir.join("gauge_check.json"), &report)?;
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Threshold(failures.join("; ")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub config_sha256: String,
    pub reference_dt: f64,
    pub dt: Vec<f64>,
    /// Relative L2 distance of the final state to the reference run.
    pub error: Vec<f64>,
    /// `ln(e_(i-1) / e_i) / ln(dt_(i-1) / dt_i)`; `NaN` for the first level.
    pub order: Vec<f64>,
}

/// Runs the scenario at every `[convergence]` level and at the reference
/// step. Writes `convergence.csv` and `convergence.json`.
pub fn convergence(cfg: &ScenarioConfig, dir: &Path) -> CliResult<ConvergenceReport> {
    let conv = cfg
        .convergence
        .clone()
        .ok_or_else(|| CliError::Config("convergence.levels: need at least 3 levels, got 0".into()))?;
    if conv.levels.len() < 3 {
        return Err(CliError::Config(format!("convergence.levels: need at least 3 levels, got {}", conv.levels.len())));
    }
    let finest = conv.levels.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference_dt = conv.reference_dt.unwrap_or(finest / 4.0);
    if !(reference_dt > 0.0) || conv.levels.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(CliError::Config("convergence: time steps must be positive".into()));
    }
    let grid = cfg.build_grid()?;
    let psi = cfg.build_initial(&grid)?;
    let params = cfg.build_params(&grid)?;
    prepare_dir(dir, cfg)?;
    let steps: Vec<f64> = std::iter::once(reference_dt).chain(conv.levels.iter().cloned()).collect();
    let finals = steps
        .par_iter()
        .map(|&dt| {
            let opts = EvolveOptions { dt, ..cfg.evolve_options() }.stride(usize::MAX);
            Ok(evolve(&psi, &params, &opts)?.last().clone())
        })
        .collect::<Result<Vec<WaveFunction>>>()?;
    let reference = &finals[0];
    let error = finals[1..]
        .iter()
        .map(|s| Ok(s.distance(reference)? / reference.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let mut order = vec![f64::NAN];
    for i in 1..error.len() {
        order.push((error[i - 1] / error[i]).ln() / (conv.levels[i - 1] / conv.levels[i]).ln());
    }
    let hash = cfg.hash();
    let mut csv = Csv::new(&hash, &["dt", "error", "order"]);
    for i in 0..error.len() {
        let o = if order[i].is_nan() { String::new() } else { num(order[i]) };
        csv.push(vec![num(conv.levels[i]), num(error[i]), o]);
    }
    csv.write(&dir.join("convergence.csv"))?;
    let report = ConvergenceReport {
        schema_version: SCHEMA_VERSION,
        config_sha256: hash,
        reference_dt,
        dt: conv.levels.clone(),
        error,
        order,
    };
    write_json(&dir.join("convergence.json"), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct MixtureReport {
    pub schema_version: u32,
    pub config_sha256: String,
    pub observable_ids: Vec<String>,
    pub final_divergence: f64,
    pub peak_divergence: f64,
}

fn mixture_pair(cfg: &ScenarioConfig, grid: &Grid) -> Result<(WaveFunction, WaveFunction)> {
    let m = cfg.mixture.clone().unwrap_or_default();
    let d = grid.dims();
    match m.construction {
        Construction::Colliding => {
            let at = |x: f64| {
                let mut v = vec![0.0; d];
                v[0] = x;
                v
            };
            Ok((
                WaveFunction::gaussian(grid, &at(-m.separation / 2.0), m.sigma, &at(m.momentum))?,
                WaveFunction::gaussian(grid, &at(m.separation / 2.0), m.sigma, &at(-m.momentum))?,
            ))
        }
        Construction::TwoMode => {
            let q = std::f64::consts::TAU / grid.lengths()[0];
            let a = WaveFunction::from_fn(grid, |x| (1.0 + 0.5 * (q * x[0]).cos()).into())?.normalized()?;
            let b = WaveFunction::from_fn(grid, |x| {
                num_complex::Complex64::from_polar(1.0 - 0.5 * (q * x[0]).cos(), q * x[0])
            })?
            .normalized()?;
            Ok((a, b))
        }
    }
}

/// Evolves the two decompositions `{phi1, phi2}` and `{phi+, phi-}` of one
/// mixture under the configured equation. Writes `mixture.csv` and
/// `mixture.json`.
pub fn mixture_demo(cfg: &ScenarioConfig, dir: &Path) -> CliResult<MixtureReport> {
    let m = cfg.mixture.clone().unwrap_or_default();
    let grid = cfg.build_grid()?;
    let params = cfg.build_params(&grid)?;
    let (a, b) = mixture_pair(cfg, &grid)?;
    let (mut e, mut ep) = equivalent_decompositions(&a, &b)?;
    let mut observables = match m.k_cut {
        Some(k) => ObservableSet::standard(&grid, cfg.seed, k)?,
        None => ObservableSet::default_set(&grid, cfg.seed)?,
    };
    if m.conjugate {
        let n = cfg.build_gauge(&grid)?;
        e = e.map(|s| n.apply(s, 0.0))?;
        ep = ep.map(|s| n.apply(s, 0.0))?;
        observables = observables.conjugated(&n)?;
    }
    prepare_dir(dir, cfg)?;
    let series = decomposition_divergence(&e, &ep, &params, &cfg.evolve_options(), &observables)?;
    let hash = cfg.hash();
    let mut csv = Csv::new(&hash, &["t", "observable_id", "expectation_e", "expectation_eprime", "abs_diff"]);
    for r in &series.records {
        for (id, &(x, y)) in series.ids.iter().zip(&r.expectations) {
            csv.push(vec![num(r.t), cell(id), num(x), num(y), num((x - y).abs())]);
        }
    }
    csv.write(&dir.join("mixture.csv"))?;
    let report = MixtureReport {
        schema_version: SCHEMA_VERSION,
        config_sha256: hash,
        observable_ids: series.ids.clone(),
        final_divergence: series.final_divergence(),
        peak_divergence: series.peak(),
    };
    write_json(&dir.join("mixture.json"), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub run: usize,
    pub values: Vec<String>,
    /// `None` on success.
    pub error: Option<String>,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub config_sha256: String,
    pub parameters: Vec<String>,
    pub rows: Vec<SweepRow>,
}

const SWEEP_METRICS: [&str; 5] = ["t", "norm", "norm_drift", "linear_energy", "max_abs"];

/// Cartesian product of the `[sweep]` parameters, each point run as an
/// independent `simulate` on the rayon pool. Failed points are recorded
/// in their row. Writes `sweep.csv` and `sweep.json`.
pub fn sweep(cfg: &ScenarioConfig, dir: &Path) -> CliResult<SweepReport> {
    let params = cfg.sweep.clone().map(|s| s.parameters).unwrap_or_default();
    let keys: Vec<String> = params.keys().cloned().collect();
    if let Some((k, _)) = params.iter().find(|(_, v)| v.is_empty()) {
        return Err(CliError::Config(format!("sweep.parameters.{k}: empty value list")));
    }
    let mut points: Vec<Vec<toml::Value>> = vec![Vec::new()];
    for k in &keys {
        points = points
            .into_iter()
            .flat_map(|p| {
                params[k].iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    let mut template = cfg.clone();
    template.sweep = None;
    prepare_dir(dir, cfg)?;
    let rows: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .map(|(run, values)| {
            let outcome = keys
                .iter()
                .zip(values)
                .try_fold(template.clone(), |c, (k, v)| c.with_override(k, v))
                .and_then(|c| integrate(&c));
            let (error, metrics) = match outcome {
                Ok(traj) => (None, final_metrics(&traj)),
                Err(e) => (Some(e.to_string()), BTreeMap::new()),
            };
            SweepRow { run, values: values.iter().map(|v| v.to_string()).collect(), error, metrics }
        })
        .collect();
    let hash = cfg.hash();
    let mut columns = vec!["run".to_string()];
    columns.extend(keys.iter().cloned());
    columns.push("status".into());
    columns.extend(SWEEP_METRICS.iter().map(|s| s.to_string()));
    columns.push("message".into());
    let mut csv = Csv::with_columns(&hash, columns);
    for r in &rows {
        let mut line = vec![cell(r.run)];
        line.extend(r.values.iter().map(cell));
        line.push(cell(if r.error.is_none() { "ok" } else { "error" }));
        line.extend(SWEEP_METRICS.iter().map(|m| r.metrics.get(*m).map(|v| num(*v)).unwrap_or_default()));
        line.push(cell(r.error.clone().unwrap_or_default()));
        csv.push(line);
    }
    csv.write(&dir.join("sweep.csv"))?;
    let report = SweepReport { schema_version: SCHEMA_VERSION, config_sha256: hash, parameters: keys, rows };
    write_json(&dir.join("sweep.json"), &report)?;
    Ok(report)
}

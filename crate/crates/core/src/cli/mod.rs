//! Batch commands behind the `mhd2d` binary. Each command writes its report
//! to the given sink and returns a process exit code.

mod config;
pub mod suites;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::estimates::{
    phi, psi_from_series, serrin_integral, EnergyColumns, EstimateSeries, GronwallEnvelope, COLUMNS,
};
use crate::lp::{
    bernstein_ratio, build_partition, decompose, log_sobolev_ratio, optimal_band_count, time_integrated_ratio,
    LpError,
};
use crate::snapshot::Snapshot;
use crate::solver::{run, SolverError};
use crate::spectral::{norm_lp, norm_sobolev, ScalarField};

pub use config::{RunConfig, KEYS};
pub use suites::{Check, Criterion, Runs, Suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {reason}")]
    Input { path: PathBuf, reason: String },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

fn output_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn input_err(path: &Path, reason: impl ToString) -> CliError {
    CliError::Input {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// What [`run_to_dir`] left behind.
#[derive(Debug)]
pub struct RunReport {
    pub steps: usize,
    pub snapshots: usize,
    pub summary: String,
    /// Set when the solver aborted; a `FAILED` marker was written.
    pub failed: Option<SolverError>,
}

pub fn snapshot_name(step: usize) -> String {
    format!("snap_{step:07}.mhd2")
}

fn fmt(v: f64) -> String {
    format!("{v:.10e}")
}

/// Runs the configured scenario and writes snapshots, `series.csv` and
/// `summary.txt` to the output directory. Outputs of an aborted run are kept
/// next to a `FAILED` marker holding the error.
pub fn run_to_dir(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(output_err(dir))?;
    let out = run(&cfg.scenario(), cfg.grid()?, &cfg.solver()?, cfg.t_end, cfg.snapshot_every)
        .map_err(|e| CliError::Config(e.to_string()))?;

    for (i, state) in out.trajectory.states().iter().enumerate() {
        let path = dir.join(snapshot_name(i * cfg.snapshot_every));
        Snapshot::of_state(state)
            .save(&path)
            .map_err(|e| CliError::Output {
                path: path.clone(),
                source: io::Error::other(e.to_string()),
            })?;
    }
    let csv = dir.join("series.csv");
    fs::write(&csv, out.series.to_csv_string()).map_err(output_err(&csv))?;

    let summary = summarize(cfg, &out);
    let path = dir.join("summary.txt");
    fs::write(&path, &summary).map_err(output_err(&path))?;
    let marker = dir.join("FAILED");
    if let Some(e) = &out.failure {
        fs::write(&marker, format!("{e}\n")).map_err(output_err(&marker))?;
    } else if marker.exists() {
        fs::remove_file(&marker).map_err(output_err(&marker))?;
    }
    Ok(RunReport {
        steps: out.totals.steps,
        snapshots: out.trajectory.len(),
        summary,
        failed: out.failure,
    })
}

fn summarize(cfg: &RunConfig, out: &crate::solver::RunOutput) -> String {
    let series = &out.series;
    let traj = &out.trajectory;
    let t_last = traj.states().last().map_or(0.0, |s| s.t);
    let col = |name| series.column(name).unwrap_or_default();
    let ratio = |name| {
        let c = col(name);
        match (c.first(), c.last()) {
            (Some(a), Some(b)) if *a != 0.0 => b / a,
            _ => f64::NAN,
        }
    };
    let phi_end = phi(traj, t_last).unwrap_or(f64::NAN);
    let psi_end = psi_from_series(series).last().copied().unwrap_or(f64::NAN);
    let serrin = serrin_integral(traj, f64::INFINITY, 2.0).unwrap_or(f64::NAN);
    let defect = EnergyColumns::from_series(series)
        .relative_final_defect()
        .unwrap_or(f64::NAN);
    let c_fit = GronwallEnvelope::from_series(series, 0.0).map_or(f64::NAN, |g| g.c_fit);
    let lines = [
        ("scenario", cfg.scenario.to_string()),
        ("grid_n", cfg.grid_n.to_string()),
        ("dt", fmt(cfg.dt)),
        ("steps", out.totals.steps.to_string()),
        ("t_final", fmt(out.final_state.t)),
        ("status", if out.failure.is_some() { "FAILED" } else { "ok" }.to_string()),
        ("phi", fmt(phi_end)),
        ("psi", fmt(psi_end)),
        ("serrin_inf_2", fmt(serrin)),
        ("energy_defect_rel", fmt(defect)),
        ("gronwall_c", fmt(c_fit)),
        ("floor_steps", out.totals.floor_steps.to_string()),
        ("u_L2_ratio", fmt(ratio("u_L2"))),
        ("e_kin_ratio", fmt(ratio("e_kin"))),
        ("e_mag_ratio", fmt(ratio("e_mag"))),
        ("momentum_iterations", out.totals.momentum_iterations.to_string()),
        ("pressure_iterations", out.totals.pressure_iterations.to_string()),
        ("cfl_warnings", out.totals.cfl_warnings.to_string()),
    ];
    lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

pub fn cmd_run(config_path: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = RunConfig::load(config_path)?;
    let report = run_to_dir(&cfg)?;
    let dir = cfg.output_dir.display();
    let _ = write!(out, "{}", report.summary);
    let _ = writeln!(out, "wrote {} snapshots and series.csv to {dir}", report.snapshots);
    Ok(match report.failed {
        Some(e) => {
            let _ = writeln!(out, "FAILED after {} steps: {e}", report.steps);
            EXIT_ABORT
        }
        None => EXIT_PASS,
    })
}

/// Runs one suite, or every suite for `"all"`, printing one line per criterion.
pub fn cmd_verify(suite: &str, config_path: Option<&Path>, out: &mut dyn Write) -> Result<i32, CliError> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let cfg = match config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut runs = Runs::new(&cfg)?;
    let mut all = true;
    for s in suites {
        for c in s.run(&mut runs) {
            all &= c.passed();
            let _ = writeln!(out, "{c}");
        }
    }
    Ok(if all { EXIT_PASS } else { EXIT_FAIL })
}

fn load_snapshots(input: &Path) -> Result<Vec<Snapshot>, CliError> {
    let paths: Vec<PathBuf> = if input.is_dir() {
        let mut p: Vec<PathBuf> = fs::read_dir(input)
            .map_err(|e| input_err(input, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "mhd2"))
            .collect();
        p.sort();
        p
    } else {
        vec![input.to_path_buf()]
    };
    if paths.is_empty() {
        return Err(input_err(input, "no .mhd2 snapshots"));
    }
    let mut snaps = paths
        .iter()
        .map(|p| Snapshot::load(p).map_err(|e| input_err(p, e)))
        .collect::<Result<Vec<_>, _>>()?;
    snaps.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(snaps)
}

fn pick<'a>(snap: &'a Snapshot, field: Option<&str>, path: &Path) -> Result<&'a ScalarField, CliError> {
    match field {
        Some(name) => snap.require(name).map_err(|e| input_err(path, e)),
        None => snap
            .fields
            .first()
            .map(|(_, f)| f)
            .ok_or_else(|| input_err(path, "snapshot has no fields")),
    }
}

/// Arguments of [`cmd_lp`].
#[derive(Debug, Clone)]
pub struct LpArgs {
    pub input: PathBuf,
    pub q_min: i32,
    pub q_max: i32,
    /// Sobolev exponent of the logarithmic probes.
    pub q: f64,
    /// Field to analyse; the first one in the snapshot by default.
    pub field: Option<String>,
    /// Where to write the band decomposition of the last snapshot.
    pub bands: Option<PathBuf>,
}

fn cell(r: Result<f64, LpError>) -> String {
    match r {
        Ok(v) => fmt(v),
        Err(_) => "degenerate".into(),
    }
}

/// Band norms, Bernstein ratios and logarithmic Sobolev ratios of a snapshot
/// or a directory of snapshots, as CSV rows `time,quantity,q,value`.
pub fn cmd_lp(args: &LpArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let snaps = load_snapshots(&args.input)?;
    let field = args.field.as_deref();
    let grid = snaps[0].grid;
    if snaps.iter().any(|s| s.grid != grid) {
        return Err(input_err(&args.input, "snapshots on different grids"));
    }
    let part = build_partition(grid, args.q_min, args.q_max).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.q.is_nan() || args.q <= 2.0 {
        return Err(CliError::Usage(format!("--q must exceed 2, got {}", args.q)));
    }
    let mut rows = vec!["time,quantity,q,value".to_string()];
    let mut series = Vec::new();
    let mut last_bands = None;
    for snap in &snaps {
        let f = pick(snap, field, &args.input)?;
        let t = fmt(snap.time);
        let bands = decompose(f, &part);
        for (q, band) in &bands.bands {
            rows.push(format!("{t},band_L2,{q},{}", fmt(norm_lp(band, 2.0).unwrap_or(f64::NAN))));
            rows.push(format!("{t},band_Linf,{q},{}", fmt(band.max_abs())));
            rows.push(format!("{t},bernstein_p2,{q},{}", cell(bernstein_ratio(f, &part, *q, 2.0))));
        }
        let grad = f.spectrum().weighted_energy(|kx, ky| kx * kx + ky * ky).sqrt() * std::f64::consts::TAU;
        let w1q = norm_sobolev(f, 1, args.q).unwrap_or(f64::NAN);
        let constant = grad <= 1e-12 * f.max_abs().max(1e-300);
        let ratio = if constant {
            "degenerate".into()
        } else {
            cell(log_sobolev_ratio(f, args.q))
        };
        rows.push(format!("{t},log_sobolev,,{ratio}"));
        let n_opt = if constant {
            "degenerate".into()
        } else {
            optimal_band_count(w1q, grad, args.q).map_or("degenerate".into(), |n| n.to_string())
        };
        rows.push(format!("{t},optimal_N,,{n_opt}"));
        series.push((snap.time, f.clone()));
        last_bands = Some((snap.time, bands));
    }
    if series.len() >= 2 {
        let (s, t) = (series[0].0, series[series.len() - 1].0);
        rows.push(format!(
            "{},time_integrated,,{}",
            fmt(t),
            cell(time_integrated_ratio(&series, s, t, args.q))
        ));
    }
    if let (Some(path), Some((time, bands))) = (&args.bands, last_bands) {
        let mut snap = Snapshot::new(time, grid).with_field("low", bands.low);
        for (q, band) in bands.bands {
            snap = snap.with_field(format!("band_q{q}"), band);
        }
        snap.save(path).map_err(|e| CliError::Output {
            path: path.clone(),
            source: io::Error::other(e.to_string()),
        })?;
    }
    for r in rows {
        let _ = writeln!(out, "{r}");
    }
    Ok(EXIT_PASS)
}

fn monotone_flag(v: &[f64]) -> &'static str {
    if v.len() < 2 {
        "-"
    } else if v.windows(2).all(|w| w[1] >= w[0]) {
        "up"
    } else if v.windows(2).all(|w| w[1] <= w[0]) {
        "down"
    } else {
        "-"
    }
}

fn report_row(name: &str, v: &[f64]) -> String {
    let min = v.iter().copied().fold(f64::NAN, f64::min);
    let max = v.iter().copied().fold(f64::NAN, f64::max);
    let last = v.last().copied().unwrap_or(f64::NAN);
    format!(
        "{name:<16} {:>18} {:>18} {:>18} {:>5}",
        fmt(min),
        fmt(max),
        fmt(last),
        monotone_flag(v)
    )
}

/// Fixed-width min/max/final table of a series file with monotonicity flags.
/// Ψ, rebuilt from the series, is appended and must be nondecreasing.
pub fn cmd_report(series_path: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let file = fs::File::open(series_path).map_err(|e| input_err(series_path, e))?;
    let series = EstimateSeries::read_csv(io::BufReader::new(file)).map_err(|e| input_err(series_path, e))?;
    let _ = writeln!(
        out,
        "{:<16} {:>18} {:>18} {:>18} {:>5}",
        "column", "min", "max", "final", "trend"
    );
    for name in COLUMNS {
        let _ = writeln!(out, "{}", report_row(name, &series.column(name).unwrap_or_default()));
    }
    let psi = psi_from_series(&series);
    let _ = writeln!(out, "{}", report_row("Psi", &psi));
    let e = EnergyColumns::from_series(&series);
    let total = e.total_energy();
    let _ = writeln!(out, "{}", report_row("E_total", &total));
    let ratio = match (e.e_kin.first(), e.e_kin.last()) {
        (Some(a), Some(b)) if *a != 0.0 => b / a,
        _ => f64::NAN,
    };
    let _ = writeln!(out, "e_kin final/initial = {}", fmt(ratio));
    let _ = writeln!(out, "Psi nondecreasing = {}", psi.windows(2).all(|w| w[1] >= w[0]));
    Ok(EXIT_PASS)
}

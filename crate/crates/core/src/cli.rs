//! Subcommand implementations behind the `tbl` binary.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::analysis::{m_series, window_scan, AnomalyWindow, Verdict, WindowScan};
use crate::bound::{drift_exceeds_budget, drift_length, sweep_bound_curve, BoundCurve};
use crate::config::{preset, BetaGrid, RunConfig};
use crate::error::{Error, Result};
use crate::io;
use crate::sim::{run_simulation, run_simulation_with_threads, SimulationRun};

/// Environment variable capping the simulation worker count.
pub const THREADS_ENV: &str = "TBL_THREADS";

/// Loads a preset or a TOML file. A file wins over a preset of the same run.
pub fn load_config(preset_name: Option<&str>, path: Option<&Path>) -> Result<RunConfig> {
    match (path, preset_name) {
        (Some(p), _) => RunConfig::from_toml(&fs::read_to_string(p).map_err(with_path(p))?),
        (None, Some(name)) => preset(name),
        (None, None) => Err(Error::Config("pass --config PATH or --preset NAME".into())),
    }
}

fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {}", path.display(), e)))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(with_path(path))?))
}

/// Writes `<out>/<label>.csv` (and `.json` when asked) for every config.
pub fn cmd_bounds(configs: &[RunConfig], grid: &BetaGrid, out: &Path, json: bool) -> Result<Vec<(BoundCurve<f64>, PathBuf)>> {
    if configs.is_empty() {
        return Err(Error::Config("no curve requested".into()));
    }
    let betas = grid.points();
    let curves = configs
        .iter()
        .map(|c| sweep_bound_curve(&c.curve_inputs()?, &betas, c.curve_label()))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(out)?;
    let mut written = Vec::with_capacity(curves.len());
    for curve in curves {
        let path = out.join(format!("{}.csv", curve.label));
        io::write_curve_csv(&curve, create(&path)?)?;
        if json {
            let jpath = out.join(format!("{}.json", curve.label));
            serde_json::to_writer_pretty(create(&jpath)?, &io::curve_json(&curve))
                .map_err(|e| Error::Io(e.into()))?;
        }
        written.push((curve, path));
    }
    Ok(written)
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("{} must be a positive integer, got '{}'", THREADS_ENV, v))),
        Err(_) => Ok(None),
    }
}

/// Runs the simulation and writes `coincidences.csv` plus a
/// `coincidences.json` sidecar with the config and run metadata.
pub fn cmd_simulate(config: &RunConfig, seed: Option<u64>, out: &Path) -> Result<(SimulationRun, PathBuf)> {
    let mut config = config.clone();
    if let (Some(seed), Some(sim)) = (seed, config.simulation.as_mut()) {
        sim.seed = seed;
    }
    let sim_config = config.simulation_config()?;
    let run = match thread_cap()? {
        Some(n) => run_simulation_with_threads(&sim_config, n)?,
        None => run_simulation(&sim_config)?,
    };

    fs::create_dir_all(out)?;
    let csv_path = out.join("coincidences.csv");
    io::write_coincidence_csv(&run.tables, create(&csv_path)?)?;
    let sidecar = json!({
        "config": config,
        "metadata": run.metadata,
    });
    serde_json::to_writer_pretty(create(&out.join("coincidences.json"))?, &sidecar)
        .map_err(|e| Error::Io(e.into()))?;
    Ok((run, csv_path))
}

pub struct AnalysisReport {
    pub scan: WindowScan,
    pub output: PathBuf,
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let count = |v: Verdict| self.scan.verdicts.iter().filter(|(_, x)| *x == v).count();
        writeln!(f, "bins: {}", self.scan.verdicts.len())?;
        for v in [Verdict::ViolatesUpper, Verdict::Consistent, Verdict::Inconclusive, Verdict::ViolatesLower] {
            writeln!(f, "  {}: {}", v, count(v))?;
        }
        writeln!(f, "anomaly windows: {}", self.scan.anomalies.len())?;
        for AnomalyWindow {
            center,
            first_bin,
            last_bin,
            bins,
        } in &self.scan.anomalies
        {
            writeln!(f, "  centre {:.3} s ({} bins, {:.3}..{:.3} s)", center, bins, first_bin, last_bin)?;
        }
        write!(f, "M series written to {}", self.output.display())
    }
}

/// Reads a coincidence CSV, writes `<out>/m_series.csv` and scans for
/// windows where the violation disappears.
pub fn cmd_analyze(input: &Path, out: &Path, period: f64, n_sigma: f64) -> Result<AnalysisReport> {
    if !(n_sigma > 0.0) {
        return Err(Error::Config(format!("n-sigma must be positive, got {}", n_sigma)));
    }
    let tables = io::read_coincidence_csv(File::open(input).map_err(with_path(input))?)?;
    if tables.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    let series = m_series(&tables)?;
    let scan = window_scan(&series, period, n_sigma)?;
    let rows: Vec<_> = series.iter().copied().zip(scan.verdicts.iter().map(|(_, v)| *v)).collect();

    fs::create_dir_all(out)?;
    let output = out.join("m_series.csv");
    io::write_m_series_csv(&rows, create(&output)?)?;
    Ok(AnalysisReport { scan, output })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftReport {
    /// Meters.
    pub drift: f64,
    /// Meters.
    pub budget: f64,
    pub exceeds: bool,
}

impl fmt::Display for DriftReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget_um = (self.budget * 1e9).round() / 1e3;
        write!(f, "{:.3} mm, ", self.drift.abs() * 1e3)?;
        if self.exceeds {
            write!(f, "exceeds {} µm budget: feedback required", budget_um)
        } else {
            write!(f, "within {} µm budget", budget_um)
        }
    }
}

pub fn cmd_drift(config: &RunConfig) -> Result<DriftReport> {
    let (budget, tolerance) = config.drift_budget()?;
    Ok(DriftReport {
        drift: drift_length(&budget),
        budget: tolerance,
        exceeds: drift_exceeds_budget(&budget, tolerance)?,
    })
}

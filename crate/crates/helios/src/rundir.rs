//! Run directories: `run.json`, `trace.csv` and `snapshots/t_<step>.csv`.

use std::fs;
use std::path::{Path, PathBuf};

use helios_core::{CurveStats, EvolutionConfig, EvolutionRun, PeriodicGrid, Snapshot, StepDiagnostics, TimeStep};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::format::{read_curve, read_table, write_curve, write_table};

pub const RUN_FILE: &str = "run.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
const TRACE_HEADER: [&str; 6] = ["t", "min_h", "max_h", "lipschitz", "area", "taylor_max"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DtEcho {
    Fixed(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub n_points: usize,
    pub epsilon: f64,
    pub dt: DtEcho,
    pub t_end: f64,
    pub save_every: usize,
    pub cfl_safety: f64,
}

impl From<&EvolutionConfig> for ConfigEcho {
    fn from(c: &EvolutionConfig) -> Self {
        Self {
            n_points: c.n_points,
            epsilon: c.epsilon,
            dt: match c.dt {
                TimeStep::Fixed(dt) => DtEcho::Fixed(dt),
                TimeStep::Auto => DtEcho::Keyword("auto".into()),
            },
            t_end: c.t_end,
            save_every: c.save_every,
            cfl_safety: c.cfl_safety,
        }
    }
}

impl ConfigEcho {
    fn to_config(&self) -> Result<EvolutionConfig> {
        let dt = match &self.dt {
            DtEcho::Fixed(dt) => TimeStep::Fixed(*dt),
            DtEcho::Keyword(k) if k == "auto" => TimeStep::Auto,
            DtEcho::Keyword(k) => return Err(CliError::Format(format!("run.json: bad dt '{k}'"))),
        };
        Ok(EvolutionConfig {
            epsilon: self.epsilon,
            dt,
            t_end: self.t_end,
            n_points: self.n_points,
            save_every: self.save_every,
            cfl_safety: self.cfl_safety,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub steps: usize,
    pub final_time: f64,
    pub initial_lipschitz: f64,
    pub final_lipschitz: f64,
    pub final_min_h: f64,
    pub final_max_h: f64,
    pub final_area: f64,
    /// Largest `G(h) eta - 1` seen over the run.
    pub taylor_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub file: String,
    pub step: usize,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ConfigEcho,
    pub summary: Summary,
    pub snapshots: Vec<SnapshotEntry>,
}

pub fn snapshot_name(step: usize) -> String {
    format!("t_{step:08}.csv")
}

fn summary(run: &EvolutionRun) -> Summary {
    let first = run.steps.first().expect("non-empty run");
    let last = run.steps.last().expect("non-empty run");
    Summary {
        steps: run.steps.len() - 1,
        final_time: last.t,
        initial_lipschitz: first.stats.lipschitz_norm,
        final_lipschitz: last.stats.lipschitz_norm,
        final_min_h: last.stats.min_h,
        final_max_h: last.stats.max_h,
        final_area: last.stats.area,
        taylor_max: run.steps.iter().map(|s| s.taylor_max).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Writes `run` into `dir`, creating it if needed. Returns the manifest.
pub fn write_run(dir: &Path, run: &EvolutionRun) -> Result<RunManifest> {
    let snap_dir = dir.join(SNAPSHOT_DIR);
    fs::create_dir_all(&snap_dir).map_err(|e| CliError::io(&snap_dir, e))?;

    let rows: Vec<Vec<Option<f64>>> = run
        .steps
        .iter()
        .map(|s| {
            vec![
                Some(s.t),
                Some(s.stats.min_h),
                Some(s.stats.max_h),
                Some(s.stats.lipschitz_norm),
                Some(s.stats.area),
                Some(s.taylor_max),
            ]
        })
        .collect();
    write_table(&dir.join(TRACE_FILE), &TRACE_HEADER, &rows)?;

    let grid = PeriodicGrid::new(run.config.n_points)?;
    let mut entries = Vec::with_capacity(run.snapshots.len());
    for snap in &run.snapshots {
        let name = snapshot_name(snap.step);
        write_curve(&snap_dir.join(&name), grid.nodes(), &snap.eta)?;
        entries.push(SnapshotEntry {
            file: format!("{SNAPSHOT_DIR}/{name}"),
            step: snap.step,
            time: snap.time,
        });
    }

    let manifest = RunManifest {
        config: ConfigEcho::from(&run.config),
        summary: summary(run),
        snapshots: entries,
    };
    let path = dir.join(RUN_FILE);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Format(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(RUN_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

/// Reads a run directory back into an [`EvolutionRun`].
///
/// Every float is stored with 17 significant digits, so the result equals the
/// run that was written.
pub fn read_run(dir: &Path) -> Result<EvolutionRun> {
    let manifest = read_manifest(dir)?;
    let config = manifest.config.to_config()?;

    let trace_path = dir.join(TRACE_FILE);
    let (header, cols) = read_table(&trace_path)?;
    if header != TRACE_HEADER {
        return Err(CliError::Format(format!(
            "{}: expected header {}",
            trace_path.display(),
            TRACE_HEADER.join(",")
        )));
    }
    let steps = (0..cols[0].len())
        .map(|i| StepDiagnostics {
            t: cols[0][i],
            stats: CurveStats {
                lipschitz_norm: cols[3][i],
                min_h: cols[1][i],
                max_h: cols[2][i],
                area: cols[4][i],
                cone_half_angle: cols[3][i].atan(),
            },
            taylor_max: cols[5][i],
        })
        .collect();

    let snapshots = manifest
        .snapshots
        .iter()
        .map(|entry| {
            let path: PathBuf = dir.join(&entry.file);
            let eta = read_curve(&path)?;
            if eta.len() != config.n_points {
                return Err(CliError::Format(format!(
                    "{}: {} rows, expected {}",
                    path.display(),
                    eta.len(),
                    config.n_points
                )));
            }
            Ok(Snapshot {
                step: entry.step,
                time: entry.time,
                eta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if snapshots.is_empty() {
        return Err(CliError::Format(format!("{}: no snapshots", dir.join(RUN_FILE).display())));
    }
    Ok(EvolutionRun {
        config,
        steps,
        snapshots,
    })
}

//! Run configuration files (TOML).
//!
//! ```toml
//! [grid]
//! n_points = 128
//!
//! [initial]
//! kind = "fourier"          # fourier | file | corner
//! cos_k = { 0 = 0.0, 2 = 0.3 }
//! sin_k = { 2 = 0.2 }
//! mollify_eps = 1e-3        # optional, any kind
//!
//! [evolution]
//! epsilon = 0.0
//! dt = "auto"               # or a number
//! t_end = 1.0
//! save_every = 100
//! cfl_safety = 0.5
//!
//! [output]
//! directory = "runs/wavy"
//! formats = ["csv", "gnuplot"]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use helios_core::diagnostics::{CornerKind, CornerSetup};
use helios_core::{EvolutionConfig, PeriodicGrid, TimeStep};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::format::read_curve;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub initial: InitialSection,
    pub evolution: EvolutionSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    Fourier,
    File,
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CornerShape {
    Acute,
    Obtuse,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    /// Mode number (as a string key) to coefficient; key 0 is the constant.
    #[serde(default)]
    pub cos_k: BTreeMap<String, f64>,
    #[serde(default)]
    pub sin_k: BTreeMap<String, f64>,
    /// Curve CSV, relative to the config file.
    pub path: Option<PathBuf>,
    pub corner: Option<CornerShape>,
    pub opening_angle: Option<f64>,
    pub mollify_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum DtSetting {
    Fixed(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(default)]
    pub epsilon: f64,
    pub dt: DtSetting,
    pub t_end: f64,
    #[serde(default = "default_save_every")]
    pub save_every: usize,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
}

fn default_save_every() -> usize {
    100
}

fn default_cfl() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Gnuplot,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv]
}

fn corner_setup(shape: CornerShape, angle: f64, n: usize) -> CornerSetup {
    let kind = match shape {
        CornerShape::Acute => CornerKind::Acute,
        CornerShape::Obtuse => CornerKind::Obtuse,
    };
    CornerSetup::new(kind, angle, 1.0).with_resolution(n)
}

/// A parsed config together with the directory it was loaded from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.evolution_config()?;
        cfg.check_initial()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Self::parse(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base })
    }

    pub fn evolution_config(&self) -> Result<EvolutionConfig> {
        let e = &self.evolution;
        let dt = match &e.dt {
            DtSetting::Fixed(v) => TimeStep::Fixed(*v),
            DtSetting::Keyword(k) if k == "auto" => TimeStep::Auto,
            DtSetting::Keyword(k) => {
                return Err(CliError::Config(format!(
                    "evolution.dt must be a number or \"auto\", got \"{k}\""
                )))
            }
        };
        let cfg = EvolutionConfig {
            epsilon: e.epsilon,
            dt,
            t_end: e.t_end,
            n_points: self.grid.n_points,
            save_every: e.save_every,
            cfl_safety: e.cfl_safety,
        };
        cfg.validate().map_err(|err| CliError::Config(err.to_string()))?;
        Ok(cfg)
    }

    fn modes(map: &BTreeMap<String, f64>, name: &str, n: usize) -> Result<Vec<(usize, f64)>> {
        map.iter()
            .map(|(k, v)| {
                let k: usize = k.parse().map_err(|_| {
                    CliError::Config(format!("initial.{name}: key '{k}' is not a mode number"))
                })?;
                if 2 * k >= n {
                    return Err(CliError::Config(format!(
                        "initial.{name}: mode {k} is not resolved by {n} points"
                    )));
                }
                if !v.is_finite() {
                    return Err(CliError::Config(format!("initial.{name}.{k} is not finite")));
                }
                Ok((k, *v))
            })
            .collect()
    }

    fn check_initial(&self) -> Result<()> {
        let i = &self.initial;
        let n = self.grid.n_points;
        let stray = |what: &str| {
            Err(CliError::Config(format!(
                "initial.{what} is not used by kind = {:?}",
                i.kind
            )))
        };
        if i.kind != InitialKind::Fourier && !(i.cos_k.is_empty() && i.sin_k.is_empty()) {
            return stray("cos_k/sin_k");
        }
        if i.kind != InitialKind::File && i.path.is_some() {
            return stray("path");
        }
        if i.kind != InitialKind::Corner && (i.corner.is_some() || i.opening_angle.is_some()) {
            return stray("corner/opening_angle");
        }
        match i.kind {
            InitialKind::Fourier => {
                Self::modes(&i.cos_k, "cos_k", n)?;
                Self::modes(&i.sin_k, "sin_k", n)?;
            }
            InitialKind::File => {
                if i.path.is_none() {
                    return Err(CliError::Config("initial.path is required for kind = file".into()));
                }
            }
            InitialKind::Corner => {
                let (Some(shape), Some(angle)) = (i.corner, i.opening_angle) else {
                    return Err(CliError::Config(
                        "initial.corner and initial.opening_angle are required for kind = corner"
                            .into(),
                    ));
                };
                corner_setup(shape, angle, n)
                    .validate()
                    .map_err(|e| CliError::Config(format!("initial: {e}")))?;
            }
        }
        if let Some(eps) = i.mollify_eps {
            if eps.is_nan() || eps <= 0.0 {
                return Err(CliError::Config("initial.mollify_eps must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.output.formats.contains(&format)
    }
}

impl LoadedConfig {
    /// Output directory, relative paths resolved against the config file.
    pub fn output_dir(&self) -> PathBuf {
        self.base.join(&self.config.output.directory)
    }

    /// Initial log-radius samples.
    pub fn initial_eta(&self) -> Result<Vec<f64>> {
        let cfg = &self.config;
        let n = cfg.grid.n_points;
        let grid = PeriodicGrid::new(n)?;
        let i = &cfg.initial;
        let eta = match i.kind {
            InitialKind::Fourier => {
                let cos = RunConfig::modes(&i.cos_k, "cos_k", n)?;
                let sin = RunConfig::modes(&i.sin_k, "sin_k", n)?;
                grid.sample(|a| {
                    cos.iter().map(|(k, c)| c * (*k as f64 * a).cos()).sum::<f64>()
                        + sin.iter().map(|(k, s)| s * (*k as f64 * a).sin()).sum::<f64>()
                })
            }
            InitialKind::File => {
                let path = self.base.join(i.path.as_ref().expect("checked on parse"));
                let eta = read_curve(&path)?;
                if eta.len() != n {
                    return Err(CliError::Config(format!(
                        "{} has {} rows but grid.n_points = {n}",
                        path.display(),
                        eta.len()
                    )));
                }
                eta
            }
            InitialKind::Corner => {
                let setup = corner_setup(
                    i.corner.expect("checked on parse"),
                    i.opening_angle.expect("checked on parse"),
                    n,
                );
                let eps = i.mollify_eps.unwrap_or(setup.mollify_eps);
                // Corners always go through the mollifier.
                return Ok(grid.mollify(&setup.raw_profile(&grid), eps)?);
            }
        };
        match i.mollify_eps {
            Some(eps) => Ok(grid.mollify(&eta, eps)?),
            None => Ok(eta),
        }
    }
}

//! Command-line front end.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helios_core::diagnostics::PressureField;
use helios_core::evolution::{sweep_level, validate_levels};
use helios_core::{
    apply_dtn, dtn_oracle_collocation, invariant_suite, reconstruct_pressure, simulate,
    BoundaryCurve, CheckStatus, Error, OperatorSet, PeriodicGrid, SweepReport,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, Result};
use crate::format::{read_boundary_data, read_curve, write_curve, write_rows, write_table};
use crate::gnuplot;
use crate::rundir::{read_run, write_run};
use crate::symmetry::symmetry_checks;

/// Exit status when `verify` finds a failing check.
pub const EXIT_CHECK_FAILED: u8 = 3;

pub const PRESSURE_NONNEG_TOL: f64 = 1e-8;
pub const PRESSURE_MISFIT_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "helios", version, about = "Hele-Shaw flow with point injection on star-shaped domains")]
pub struct Cli {
    /// Also write gnuplot scripts next to the CSV outputs.
    #[arg(long, global = true)]
    pub emit_gnuplot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the interface described by a TOML config and write a run directory.
    Simulate {
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply the Dirichlet-to-Neumann operator of a curve to boundary data.
    Dtn {
        /// Curve CSV (`alpha,eta[,h]`).
        curve: PathBuf,
        /// Boundary data CSV (`alpha,g`).
        data: PathBuf,
        /// Add a `G_oracle` column from a harmonic-polynomial fit.
        #[arg(long)]
        oracle: bool,
        /// Modes used by the oracle [default: min(32, N/2 - 1)].
        #[arg(long)]
        modes: Option<usize>,
        /// Output CSV; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check a run directory and write `report.json` and `pressure.csv` into it.
    Verify { run_dir: PathBuf },
    /// Vanishing-viscosity sweep over decreasing epsilon levels.
    Sweep {
        config: PathBuf,
        /// Comma-separated, strictly decreasing viscosities.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// Overrides `output.directory`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reconstruct the pressure inside a curve on a polar grid.
    Pressure {
        curve: PathBuf,
        #[arg(long, default_value_t = 32)]
        nr: usize,
        /// [default: number of curve nodes]
        #[arg(long)]
        ntheta: Option<usize>,
        /// Innermost radius [default: 0.1 min h].
        #[arg(long)]
        rmin: Option<f64>,
        /// Output CSV; `pressure.csv` when omitted.
        #[arg(short, long, default_value = "pressure.csv")]
        output: PathBuf,
    },
    /// Print scale and rotation symmetry margins of the operators on a curve.
    Symmetry { curve: PathBuf },
}

/// Parses `std::env::args` and runs; the return value is the process status.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    configure_threads()?;
    let gp = cli.emit_gnuplot;
    match &cli.command {
        Command::Simulate { config, output } => cmd_simulate(config, output.as_deref(), gp),
        Command::Dtn {
            curve,
            data,
            oracle,
            modes,
            output,
        } => cmd_dtn(curve, data, *oracle, *modes, output.as_deref(), gp),
        Command::Verify { run_dir } => cmd_verify(run_dir, gp),
        Command::Sweep { config, eps, output } => cmd_sweep(config, eps, output.as_deref(), gp),
        Command::Pressure {
            curve,
            nr,
            ntheta,
            rmin,
            output,
        } => cmd_pressure(curve, *nr, *ntheta, *rmin, output, gp),
        Command::Symmetry { curve } => cmd_symmetry(curve),
    }
}

/// Sizes the global rayon pool from `HELIOS_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("HELIOS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("HELIOS_THREADS must be a positive integer, got '{value}'")))?;
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load_curve(path: &Path) -> Result<BoundaryCurve> {
    let eta = read_curve(path)?;
    let grid = PeriodicGrid::new(eta.len())?;
    Ok(BoundaryCurve::from_eta(&grid, &eta)?)
}

fn cmd_simulate(config_path: &Path, output: Option<&Path>, gp: bool) -> Result<u8> {
    let loaded = RunConfig::load(config_path)?;
    let eta0 = loaded.initial_eta()?;
    let cfg = loaded.config.evolution_config()?;
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| loaded.output_dir());

    let run = simulate(&cfg, &eta0)?;
    let manifest = write_run(&dir, &run)?;
    let copy = dir.join("config.toml");
    fs::copy(config_path, &copy).map_err(|e| CliError::io(&copy, e))?;
    if gp || loaded.config.wants(OutputFormat::Gnuplot) {
        gnuplot::run_script(&dir, &manifest)?;
    }
    let s = &manifest.summary;
    println!(
        "{} steps to t = {}: h in [{}, {}], Lipschitz {} -> {}",
        s.steps, s.final_time, s.final_min_h, s.final_max_h, s.initial_lipschitz, s.final_lipschitz
    );
    println!("wrote {}", dir.display());
    Ok(0)
}

fn cmd_dtn(
    curve_path: &Path,
    data_path: &Path,
    oracle: bool,
    modes: Option<usize>,
    output: Option<&Path>,
    gp: bool,
) -> Result<u8> {
    let curve = load_curve(curve_path)?;
    let g = read_boundary_data(data_path)?;
    let ops = OperatorSet::assemble(&curve)?;
    let res = apply_dtn(&ops, &g)?;
    let n = curve.len();
    let fit = if oracle {
        let modes = modes.unwrap_or_else(|| 32.min(n / 2 - 1));
        let fit = dtn_oracle_collocation(&curve, &g, modes)?;
        eprintln!("oracle: {modes} modes, boundary misfit {:e}", fit.misfit);
        Some(fit)
    } else {
        None
    };
    let rows: Vec<Vec<Option<f64>>> = (0..n)
        .map(|j| {
            let mut row = vec![
                Some(curve.grid().nodes()[j]),
                Some(res.theta[j]),
                Some(res.g_of[j]),
            ];
            if let Some(f) = &fit {
                row.push(Some(f.g_of[j]));
            }
            row
        })
        .collect();
    let header: &[&str] = if oracle {
        &["alpha", "theta", "G", "G_oracle"]
    } else {
        &["alpha", "theta", "G"]
    };
    match output {
        Some(path) => {
            write_table(path, header, &rows)?;
            if gp {
                let name = file_name(path);
                gnuplot::dtn_script(&path.with_extension("gp"), &name, oracle)?;
            }
        }
        None => {
            let stdout = io::stdout();
            write_rows(&mut BufWriter::new(stdout.lock()), header, &rows)
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    eprintln!("solve residual {:e}", res.solve_residual);
    Ok(0)
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn pressure_rows(field: &PressureField) -> Vec<Vec<Option<f64>>> {
    field
        .points
        .iter()
        .map(|p| vec![Some(p.r), Some(p.theta), Some(p.phi), Some(p.p)])
        .collect()
}

const PRESSURE_HEADER: [&str; 4] = ["r", "theta", "phi", "p"];

#[derive(Debug, Serialize)]
struct ReportEntry {
    name: String,
    margin: Option<f64>,
    pass: bool,
    status: &'static str,
    detail: String,
}

#[derive(Debug, Serialize)]
struct Report {
    passed: bool,
    checks: Vec<ReportEntry>,
}

fn entry(name: &str, margin: f64, detail: String) -> ReportEntry {
    let pass = margin >= 0.0;
    ReportEntry {
        name: name.into(),
        margin: Some(margin),
        pass,
        status: if pass { "pass" } else { "fail" },
        detail,
    }
}

fn cmd_verify(dir: &Path, gp: bool) -> Result<u8> {
    let run = read_run(dir)?;
    let suite = invariant_suite(&run);
    let mut checks: Vec<ReportEntry> = suite
        .checks
        .iter()
        .map(|c| ReportEntry {
            name: c.name.into(),
            margin: c.margin,
            pass: c.status != CheckStatus::Fail,
            status: match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Skipped => "skipped",
            },
            detail: c.detail.clone(),
        })
        .collect();

    let last = run.final_snapshot();
    let grid = PeriodicGrid::new(run.config.n_points)?;
    let curve = BoundaryCurve::from_eta(&grid, &last.eta)?;
    let min_h = curve.stats().min_h;
    match reconstruct_pressure(&curve, 32, grid.n_points(), 0.1 * min_h) {
        Ok(field) => {
            let path = dir.join("pressure.csv");
            write_table(&path, &PRESSURE_HEADER, &pressure_rows(&field))?;
            if gp {
                gnuplot::pressure_script(&dir.join("pressure.gp"), "pressure.csv")?;
            }
            checks.push(entry(
                "pressure_nonnegative",
                field.min_excess + PRESSURE_NONNEG_TOL,
                format!("min(phi - log r) = {:e} at t = {}", field.min_excess, last.time),
            ));
            checks.push(entry(
                "pressure_boundary_misfit",
                PRESSURE_MISFIT_TOL - field.boundary_misfit,
                format!(
                    "boundary misfit {:e} with upsampling x{}",
                    field.boundary_misfit, field.upsample_factor
                ),
            ));
        }
        Err(e) => checks.push(ReportEntry {
            name: "pressure_reconstruction".into(),
            margin: None,
            pass: false,
            status: "fail",
            detail: e.to_string(),
        }),
    }

    let passed = checks.iter().all(|c| c.pass);
    for c in &checks {
        let margin = c.margin.map(|m| format!("{m:+.3e}")).unwrap_or_else(|| "-".into());
        println!("{:<8} {:<26} margin {:<11} {}", c.status.to_uppercase(), c.name, margin, c.detail);
    }
    let report = Report { passed, checks };
    let path = dir.join("report.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Format(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(if passed { 0 } else { EXIT_CHECK_FAILED })
}

fn cmd_sweep(config_path: &Path, eps: &[f64], output: Option<&Path>, gp: bool) -> Result<u8> {
    let loaded = RunConfig::load(config_path)?;
    validate_levels(eps).map_err(|e| CliError::Config(e.to_string()))?;
    let eta0 = loaded.initial_eta()?;
    let cfg = loaded.config.evolution_config()?;
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| loaded.output_dir());
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let levels = eps
        .par_iter()
        .map(|&e| sweep_level(&cfg, &eta0, e))
        .collect::<Result<Vec<_>, Error>>()?;
    let report = SweepReport::from_levels(cfg.t_end, levels)?;

    let grid = PeriodicGrid::new(cfg.n_points)?;
    for (k, level) in report.levels.iter().enumerate() {
        write_curve(&dir.join(format!("sweep_level_{k}.csv")), grid.nodes(), &level.final_eta)?;
    }
    let rows: Vec<Vec<Option<f64>>> = report
        .levels
        .iter()
        .enumerate()
        .map(|(k, l)| vec![Some(l.epsilon), report.gaps.get(k).copied()])
        .collect();
    write_table(&dir.join("sweep.csv"), &["eps", "l2_gap_to_next"], &rows)?;
    if gp || loaded.config.wants(OutputFormat::Gnuplot) {
        gnuplot::sweep_script(&dir)?;
    }
    for (k, l) in report.levels.iter().enumerate() {
        match report.gaps.get(k) {
            Some(gap) => println!("eps {:e}: gap to next {:e}", l.epsilon, gap),
            None => println!("eps {:e}", l.epsilon),
        }
    }
    let ratios: Vec<String> = report.gap_ratios().iter().map(|r| format!("{r:.3}")).collect();
    println!("gap ratios: [{}]", ratios.join(", "));
    Ok(0)
}

fn cmd_pressure(
    curve_path: &Path,
    nr: usize,
    ntheta: Option<usize>,
    rmin: Option<f64>,
    output: &Path,
    gp: bool,
) -> Result<u8> {
    let curve = load_curve(curve_path)?;
    let ntheta = ntheta.unwrap_or(curve.len());
    let rmin = rmin.unwrap_or(0.1 * curve.stats().min_h);
    let field = reconstruct_pressure(&curve, nr, ntheta, rmin)?;
    write_table(output, &PRESSURE_HEADER, &pressure_rows(&field))?;
    if gp {
        gnuplot::pressure_script(&output.with_extension("gp"), &file_name(output))?;
    }
    println!(
        "boundary misfit {:e}, min(phi - log r) {:e}, upsampling x{}",
        field.boundary_misfit, field.min_excess, field.upsample_factor
    );
    if field.accuracy_warning {
        eprintln!("warning: boundary misfit above {:e}", helios_core::diagnostics::PRESSURE_MISFIT_WARN);
    }
    Ok(0)
}

fn cmd_symmetry(curve_path: &Path) -> Result<u8> {
    let eta = read_curve(curve_path)?;
    let mut out = io::stdout().lock();
    let mut ok = true;
    for c in symmetry_checks(&eta)? {
        ok &= c.passed();
        writeln!(
            out,
            "{:<16} violation {:.3e}  tolerance {:.0e}  margin {:.3e}",
            c.name,
            c.violation,
            c.tolerance,
            c.margin()
        )
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    }
    Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
}

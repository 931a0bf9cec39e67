//! Time integration of the regularized interface equation
//!
//! ```text
//! d_t eta = -e^{-2 eta} (G(h) eta - 1) + eps d_alpha^2 eta
//! ```
//!
//! The nonlocal term is advanced with the explicit midpoint rule; the
//! diffusion is then applied implicitly through the exact multiplier
//! `(1 + eps dt k^2)^{-1}`, so the step size is limited only by the order-one
//! DtN term.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::curve::{BoundaryCurve, CurveStats};
use crate::dtn::apply_dtn;
use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;
use crate::kernels::OperatorSet;

/// `|eta|` beyond this aborts the run.
pub const BLOW_UP_ETA: f64 = 50.0;

/// Steps between re-evaluations of the automatic step size.
pub const AUTO_DT_REFRESH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// `cfl_safety * dalpha * e^{2 min eta} / (1 + max |G eta - 1|)`,
    /// refreshed every [`AUTO_DT_REFRESH`] steps.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub epsilon: f64,
    pub dt: TimeStep,
    pub t_end: f64,
    pub n_points: usize,
    /// Snapshot stride in steps. The initial and final states are always kept.
    pub save_every: usize,
    pub cfl_safety: f64,
}

impl EvolutionConfig {
    pub fn new(n_points: usize, t_end: f64) -> Self {
        Self {
            epsilon: 0.0,
            dt: TimeStep::Auto,
            t_end,
            n_points,
            save_every: 100,
            cfl_safety: 0.5,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_dt(mut self, dt: TimeStep) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_save_every(mut self, save_every: usize) -> Self {
        self.save_every = save_every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::Parameter(msg));
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be non-negative, got {}", self.epsilon));
        }
        if self.n_points < 32 || !self.n_points.is_multiple_of(2) {
            return bad(format!(
                "n_points must be even and at least 32, got {}",
                self.n_points
            ));
        }
        if self.save_every == 0 {
            return bad("save_every must be at least 1".into());
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        Ok(())
    }
}

/// Diagnostics of the state at one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    pub stats: CurveStats,
    /// `max (G(h) eta - 1)`; non-positive by the Taylor sign condition.
    pub taylor_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub eta: Vec<f64>,
}

/// A completed run: one diagnostics row per time level, plus snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub config: EvolutionConfig,
    pub steps: Vec<StepDiagnostics>,
    pub snapshots: Vec<Snapshot>,
}

impl EvolutionRun {
    pub fn times(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.t).collect()
    }

    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("a run always holds its initial state")
    }

    pub fn initial_snapshot(&self) -> &Snapshot {
        &self.snapshots[0]
    }
}

struct Rates {
    deta_dt: Vec<f64>,
    dtn: Vec<f64>,
}

fn rates(curve: &BoundaryCurve) -> Result<Rates> {
    let ops = OperatorSet::assemble(curve)?;
    let res = apply_dtn(&ops, curve.eta())?;
    let deta_dt = curve
        .eta()
        .iter()
        .zip(&res.g_of)
        .map(|(e, g)| -(-2.0 * e).exp() * (g - 1.0))
        .collect();
    Ok(Rates {
        deta_dt,
        dtn: res.g_of,
    })
}

/// `-e^{-2 eta} (G(h) eta - 1)` at the nodes.
pub fn rhs(curve: &BoundaryCurve) -> Result<Vec<f64>> {
    Ok(rates(curve)?.deta_dt)
}

/// One IMEX step of size `dt`.
pub fn step(curve: &BoundaryCurve, dt: f64, epsilon: f64) -> Result<BoundaryCurve> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let first = rhs(curve)?;
    advance(curve, &first, dt, epsilon, 0, 0.0)
}

fn advance(
    curve: &BoundaryCurve,
    first: &[f64],
    dt: f64,
    epsilon: f64,
    step_index: usize,
    time: f64,
) -> Result<BoundaryCurve> {
    let grid = curve.grid();
    let blow_up = |eta: &[f64]| -> Result<()> {
        if let Some((node, &value)) = eta
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > BLOW_UP_ETA)
        {
            return Err(Error::BlowUp {
                step: step_index,
                time,
                node,
                value,
            });
        }
        Ok(())
    };

    let half: Vec<f64> = curve
        .eta()
        .iter()
        .zip(first)
        .map(|(e, r)| e + 0.5 * dt * r)
        .collect();
    // An updated state that is no longer a valid curve is a blow-up too.
    let degenerate = |eta: &[f64], e: Error| match e {
        Error::Geometry { node, .. } => Error::BlowUp {
            step: step_index,
            time,
            node,
            value: eta[node],
        },
        other => other,
    };
    blow_up(&half)?;
    let mid = BoundaryCurve::from_eta(grid, &half).map_err(|e| degenerate(&half, e))?;
    let second = rhs(&mid).map_err(|e| degenerate(&half, e))?;
    let mut next: Vec<f64> = curve
        .eta()
        .iter()
        .zip(&second)
        .map(|(e, r)| e + dt * r)
        .collect();
    blow_up(&next)?;
    if epsilon > 0.0 {
        next = grid.apply_multiplier(&next, |k, _| {
            let k = k as f64;
            Complex64::new(1.0 / (1.0 + epsilon * dt * k * k), 0.0)
        })?;
    }
    BoundaryCurve::from_eta(grid, &next).map_err(|e| degenerate(&next, e))
}

fn auto_dt(config: &EvolutionConfig, curve: &BoundaryCurve, dtn: &[f64]) -> f64 {
    let min_eta = curve.eta().iter().copied().fold(f64::INFINITY, f64::min);
    let spread = dtn.iter().fold(0.0_f64, |m, g| m.max((g - 1.0).abs()));
    config.cfl_safety * curve.grid().spacing() * (2.0 * min_eta).exp() / (1.0 + spread)
}

/// Integrates from `eta0` to `config.t_end`.
pub fn simulate(config: &EvolutionConfig, eta0: &[f64]) -> Result<EvolutionRun> {
    config.validate()?;
    let grid = PeriodicGrid::new(config.n_points)?;
    let mut curve = BoundaryCurve::from_eta(&grid, eta0)?;
    let t_end = config.t_end;

    let mut steps = Vec::new();
    let mut snapshots = alloc::vec![Snapshot {
        step: 0,
        time: 0.0,
        eta: eta0.to_vec(),
    }];
    let mut t = 0.0;
    let mut n = 0usize;
    let mut dt_auto = 0.0;
    loop {
        let r = rates(&curve)?;
        steps.push(StepDiagnostics {
            t,
            stats: curve.stats(),
            taylor_max: r.dtn.iter().fold(f64::NEG_INFINITY, |m, g| m.max(g - 1.0)),
        });
        if t >= t_end {
            break;
        }
        let (dt, t_next) = match config.dt {
            TimeStep::Fixed(dt) => {
                let t_next = ((n + 1) as f64 * dt).min(t_end);
                // Snap to t_end when within rounding of it.
                let t_next = if t_end - t_next < 1e-9 * dt { t_end } else { t_next };
                (t_next - t, t_next)
            }
            TimeStep::Auto => {
                if n.is_multiple_of(AUTO_DT_REFRESH) {
                    dt_auto = auto_dt(config, &curve, &r.dtn);
                }
                let t_next = if t + dt_auto >= t_end * (1.0 - 1e-12) {
                    t_end
                } else {
                    t + dt_auto
                };
                (t_next - t, t_next)
            }
        };
        curve = advance(&curve, &r.deta_dt, dt, config.epsilon, n, t)?;
        n += 1;
        t = t_next;
        if n.is_multiple_of(config.save_every) || t >= t_end {
            snapshots.push(Snapshot {
                step: n,
                time: t,
                eta: curve.eta().to_vec(),
            });
        }
    }
    Ok(EvolutionRun {
        config: config.clone(),
        steps,
        snapshots,
    })
}

/// One level of a vanishing-viscosity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepLevel {
    pub epsilon: f64,
    /// Initial data after mollification at width `epsilon`.
    pub initial_eta: Vec<f64>,
    pub final_eta: Vec<f64>,
    pub final_lipschitz: f64,
}

/// Runs one sweep level: mollify `eta0` at width `epsilon`, then evolve with
/// viscosity `epsilon`.
pub fn sweep_level(config: &EvolutionConfig, eta0: &[f64], epsilon: f64) -> Result<SweepLevel> {
    let grid = PeriodicGrid::new(config.n_points)?;
    let initial_eta = grid.mollify(eta0, epsilon)?;
    let cfg = config.clone().with_epsilon(epsilon);
    let run = simulate(&cfg, &initial_eta)?;
    let last = run.steps.last().expect("non-empty run");
    Ok(SweepLevel {
        epsilon,
        initial_eta,
        final_eta: run.final_snapshot().eta.clone(),
        final_lipschitz: last.stats.lipschitz_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub t_end: f64,
    pub levels: Vec<SweepLevel>,
    /// `L^2(T)` distance of the final states of consecutive levels.
    pub gaps: Vec<f64>,
}

impl SweepReport {
    pub fn from_levels(t_end: f64, levels: Vec<SweepLevel>) -> Result<Self> {
        let n = levels.first().map_or(0, |l| l.final_eta.len());
        let gaps = if levels.len() < 2 {
            Vec::new()
        } else {
            let grid = PeriodicGrid::new(n)?;
            levels
                .windows(2)
                .map(|w| {
                    let d: Vec<f64> = w[0]
                        .final_eta
                        .iter()
                        .zip(&w[1].final_eta)
                        .map(|(a, b)| a - b)
                        .collect();
                    grid.l2_norm(&d)
                })
                .collect::<Result<_>>()?
        };
        Ok(Self {
            t_end,
            levels,
            gaps,
        })
    }

    /// `gaps[i] / gaps[i + 1]`.
    pub fn gap_ratios(&self) -> Vec<f64> {
        self.gaps.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Checks that viscosity levels are positive and strictly decreasing.
pub fn validate_levels(eps_levels: &[f64]) -> Result<()> {
    if eps_levels.is_empty() {
        return Err(Error::Parameter("at least one viscosity level is required".into()));
    }
    if eps_levels.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Parameter("viscosity levels must be positive".into()));
    }
    if eps_levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("viscosity levels must be strictly decreasing".into()));
    }
    Ok(())
}

/// Sequential vanishing-viscosity sweep.
pub fn vanishing_viscosity_sweep(
    config: &EvolutionConfig,
    eta0: &[f64],
    eps_levels: &[f64],
) -> Result<SweepReport> {
    config.validate()?;
    validate_levels(eps_levels)?;
    let levels = eps_levels
        .iter()
        .map(|&eps| sweep_level(config, eta0, eps))
        .collect::<Result<Vec<_>>>()?;
    SweepReport::from_levels(config.t_end, levels)
}

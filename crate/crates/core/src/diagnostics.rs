//! Verification experiments on runs, and pressure reconstruction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::curve::BoundaryCurve;
use crate::dtn::{taylor_sign_residual, SOLVE_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::evolution::{simulate, EvolutionConfig, EvolutionRun, TimeStep};
use crate::grid::PeriodicGrid;
use crate::kernels::OperatorSet;

/// Boundary misfit above which a pressure field carries an accuracy warning.
pub const PRESSURE_MISFIT_WARN: f64 = 1e-5;

/// Largest upsampling factor used for near-boundary evaluation.
pub const MAX_UPSAMPLE: usize = 32;

/// Interior double-layer representation of the harmonic extension of `eta`.
///
/// `phi(x) = (1/2pi) int Im[z'(s) / (z(s) - x)] mu(s) ds` with
/// `(I/2 - K) mu = eta`, which reproduces `phi = 1` from `mu = 1`. Evaluation
/// subtracts the density at the nearest fine node and runs the trapezoid rule
/// on an upsampled copy of the curve.
#[derive(Debug, Clone)]
pub struct HarmonicExtension {
    curve: BoundaryCurve,
    density: Vec<f64>,
    factor: usize,
    fine_z: Vec<Complex64>,
    fine_dz: Vec<Complex64>,
    fine_mu: Vec<f64>,
    fine_data: Vec<f64>,
    fine_weight: f64,
    /// Distance below which a target counts as sitting on a fine node.
    coincident: f64,
    eta_spec: Vec<Complex64>,
    data_spec: Vec<Complex64>,
    mu_spec: Vec<Complex64>,
}

impl HarmonicExtension {
    pub fn new(curve: &BoundaryCurve, factor: usize) -> Result<Self> {
        Self::with_data(curve, curve.eta(), factor)
    }

    /// Extension of arbitrary boundary data `g` instead of `eta`.
    pub fn with_data(curve: &BoundaryCurve, g: &[f64], factor: usize) -> Result<Self> {
        crate::error::check_len(curve.len(), g.len())?;
        if factor == 0 || factor > MAX_UPSAMPLE {
            return Err(Error::Parameter(format!(
                "upsampling factor must lie in 1..={MAX_UPSAMPLE}, got {factor}"
            )));
        }
        let grid = curve.grid();
        let n = grid.n_points();
        let ops = OperatorSet::assemble(curve)?;
        let mut a = -ops.kdl().clone();
        for j in 0..n {
            a[(j, j)] += 0.5;
        }
        let b = DVector::from_column_slice(g);
        let rhs_norm = b.norm();
        let mu = if rhs_norm == 0.0 {
            DVector::zeros(n)
        } else {
            let mu = a.clone().lu().solve(&b).ok_or(Error::LinearAlgebra {
                residual: f64::INFINITY,
            })?;
            let residual = (&a * &mu - &b).norm() / rhs_norm;
            if !(residual <= SOLVE_RESIDUAL_TOL) {
                return Err(Error::LinearAlgebra { residual });
            }
            mu
        };
        let density: Vec<f64> = mu.data.into();

        // Calibration: mu = 1 must reproduce phi = 1 on the boundary and at the
        // origin.
        let ones = alloc::vec![1.0; n];
        let k1 = ops.apply_kdl(&ones)?;
        let limit_err = k1.iter().fold(0.0_f64, |m, v| m.max((0.5 - v - 1.0).abs()));
        let origin: f64 = curve
            .z()
            .iter()
            .zip(curve.dz())
            .zip(grid.weights())
            .map(|((z, dz), w)| w * (dz / z).im)
            .sum::<f64>()
            / (2.0 * PI);
        if limit_err > 1e-8 || (origin - 1.0).abs() > 1e-12 {
            return Err(Error::Convention(format!(
                "double layer of the unit density: boundary limit off by {limit_err:e}, \
                 origin value {origin}"
            )));
        }

        let m = n * factor;
        let fine_grid = PeriodicGrid::new(m)?;
        let fine = BoundaryCurve::from_eta(&fine_grid, &grid.resample(curve.eta(), m)?)?;
        let fine_data = grid.resample(g, m)?;
        let fine_mu = grid.resample(&density, m)?;
        Ok(Self {
            eta_spec: grid.spectrum(curve.eta())?,
            data_spec: grid.spectrum(g)?,
            mu_spec: grid.spectrum(&density)?,
            curve: curve.clone(),
            density,
            factor,
            fine_z: fine.z().to_vec(),
            fine_dz: fine.dz().to_vec(),
            fine_mu,
            fine_data,
            fine_weight: fine_grid.spacing(),
            coincident: 1e-12 * fine.stats().max_h,
        })
    }

    /// Smallest power-of-two factor (capped at [`MAX_UPSAMPLE`]) whose fine
    /// arc-length spacing is a fifth of `distance`.
    pub fn factor_for_distance(curve: &BoundaryCurve, distance: f64) -> usize {
        let speed = curve.dz().iter().fold(0.0_f64, |m, d| m.max(d.norm()));
        let needed = 10.0 * PI * speed / distance.max(f64::MIN_POSITIVE);
        let ratio = needed / curve.len() as f64;
        let mut f = 1;
        while (f as f64) < ratio && f < MAX_UPSAMPLE {
            f *= 2;
        }
        f
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    fn nearest_fine(&self, x: Complex64) -> (usize, f64) {
        self.fine_z
            .iter()
            .enumerate()
            .map(|(m, z)| (m, (z - x).norm()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    fn subtracted_sum(&self, x: Complex64, mu_x: f64) -> f64 {
        let mut acc = 0.0;
        for m in 0..self.fine_z.len() {
            let diff = self.fine_z[m] - x;
            if diff.norm() <= self.coincident {
                // Removable: the integrand tends to Im(mu') = 0.
                continue;
            }
            acc += (self.fine_dz[m] / diff).im * (self.fine_mu[m] - mu_x);
        }
        acc * self.fine_weight / (2.0 * PI)
    }

    /// `phi` at an interior point.
    pub fn phi_at(&self, x: Complex64) -> f64 {
        let (m, _) = self.nearest_fine(x);
        let mu_x = self.fine_mu[m];
        mu_x + self.subtracted_sum(x, mu_x)
    }

    /// Interior limit of `phi` at the boundary point with parameter `alpha`.
    pub fn boundary_value(&self, alpha: f64) -> f64 {
        let wrapped = alpha % (2.0 * PI);
        let wrapped = if wrapped < 0.0 { wrapped + 2.0 * PI } else { wrapped };
        let pos = wrapped / self.fine_weight;
        if (pos - pos.round()).abs() < 1e-9 {
            let m = pos.round() as usize % self.fine_z.len();
            let mu = self.fine_mu[m];
            return mu + self.subtracted_sum(self.fine_z[m], mu);
        }
        let grid = self.curve.grid();
        let eta = grid.interpolate_spectrum(&self.eta_spec, alpha);
        let mu = grid.interpolate_spectrum(&self.mu_spec, alpha);
        let z = Complex64::from_polar(eta.exp(), alpha);
        mu + self.subtracted_sum(z, mu)
    }

    /// Max of `|phi - g|` at the fine nodes midway between coarse nodes.
    pub fn boundary_misfit(&self) -> f64 {
        if self.factor == 1 {
            // No off-node points on the coarse grid; fall back to midpoints.
            let grid = self.curve.grid();
            let half = 0.5 * grid.spacing();
            return grid
                .nodes()
                .iter()
                .map(|a| {
                    let g = grid.interpolate_spectrum(&self.data_spec, a + half);
                    (self.boundary_value(a + half) - g).abs()
                })
                .fold(0.0, f64::max);
        }
        let half = self.factor / 2;
        (0..self.curve.len())
            .map(|j| {
                let m = j * self.factor + half;
                let mu = self.fine_mu[m];
                let phi = mu + self.subtracted_sum(self.fine_z[m], mu);
                (phi - self.fine_data[m]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// One node of a polar pressure grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressurePoint {
    /// Physical radius `|x|`.
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub p: f64,
}

/// Pressure `p = max(phi - log r, 0)` on a polar grid adapted to the curve.
///
/// Ring `i` of `n_r` sits at `rho_i h(theta)` with `rho` uniform from
/// `r_min / min h` to 1; the outer ring is the boundary itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    pub n_r: usize,
    pub n_theta: usize,
    /// Row-major, rings outermost last.
    pub points: Vec<PressurePoint>,
    /// Max boundary deviation of `phi` from `eta` at off-node points.
    pub boundary_misfit: f64,
    /// `min (phi - log r)`; non-negative up to discretization error.
    pub min_excess: f64,
    pub upsample_factor: usize,
    /// Set when `boundary_misfit` exceeds [`PRESSURE_MISFIT_WARN`].
    pub accuracy_warning: bool,
}

impl PressureField {
    pub fn max_boundary_pressure(&self) -> f64 {
        self.points[(self.n_r - 1) * self.n_theta..]
            .iter()
            .fold(0.0, |m, p| m.max(p.p))
    }
}

pub fn reconstruct_pressure(
    curve: &BoundaryCurve,
    n_r: usize,
    n_theta: usize,
    r_min: f64,
) -> Result<PressureField> {
    let stats = curve.stats();
    if n_r < 2 || n_theta < 1 {
        return Err(Error::Parameter(format!(
            "pressure grid needs n_r >= 2 and n_theta >= 1, got {n_r} x {n_theta}"
        )));
    }
    if !(r_min > 0.0 && r_min < stats.min_h / 4.0) {
        return Err(Error::Parameter(format!(
            "r_min must lie in (0, min h / 4) = (0, {}), got {r_min}",
            stats.min_h / 4.0
        )));
    }
    let grid = curve.grid();
    let eta_spec = grid.spectrum(curve.eta())?;
    let thetas: Vec<f64> = (0..n_theta).map(|k| 2.0 * PI * k as f64 / n_theta as f64).collect();
    let radii: Vec<f64> = thetas
        .iter()
        .map(|&t| grid.interpolate_spectrum(&eta_spec, t).exp())
        .collect();
    let rho_min = r_min / stats.min_h;
    let rhos: Vec<f64> = (0..n_r)
        .map(|i| rho_min + (1.0 - rho_min) * i as f64 / (n_r - 1) as f64)
        .collect();

    // Closest interior target to the boundary, measured against the nodes.
    let inner_rho = rhos[n_r - 2];
    let min_distance = thetas
        .iter()
        .zip(&radii)
        .map(|(&t, &h)| {
            let x = Complex64::from_polar(inner_rho * h, t);
            curve.z().iter().fold(f64::INFINITY, |m, z| m.min((z - x).norm()))
        })
        .fold(f64::INFINITY, f64::min);
    let factor = HarmonicExtension::factor_for_distance(curve, min_distance);
    let ext = HarmonicExtension::new(curve, factor)?;

    let mut points = Vec::with_capacity(n_r * n_theta);
    for (i, &rho) in rhos.iter().enumerate() {
        for (&theta, &h) in thetas.iter().zip(&radii) {
            let (r, phi) = if i + 1 == n_r {
                (h, ext.boundary_value(theta))
            } else {
                let r = rho * h;
                (r, ext.phi_at(Complex64::from_polar(r, theta)))
            };
            points.push(PressurePoint {
                r,
                theta,
                phi,
                p: (phi - r.ln()).max(0.0),
            });
        }
    }
    let min_excess = points
        .iter()
        .map(|p| p.phi - p.r.ln())
        .fold(f64::INFINITY, f64::min);
    let boundary_misfit = ext.boundary_misfit();
    Ok(PressureField {
        n_r,
        n_theta,
        points,
        boundary_misfit,
        min_excess,
        upsample_factor: factor,
        accuracy_warning: boundary_misfit > PRESSURE_MISFIT_WARN,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerKind {
    Acute,
    Obtuse,
    /// No corner: the unit circle.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TipMotion {
    Waiting,
    Moved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerSetup {
    pub kind: CornerKind,
    /// Interior angle of the fluid region at the tip.
    pub opening_angle: f64,
    pub duration: f64,
    pub n_points: usize,
    /// Mollification width; defaults to `2 dalpha^2`.
    pub mollify_eps: f64,
    pub cfl_safety: f64,
}

impl CornerSetup {
    pub fn new(kind: CornerKind, opening_angle: f64, duration: f64) -> Self {
        Self {
            kind,
            opening_angle,
            duration,
            n_points: 256,
            mollify_eps: 0.0,
            cfl_safety: 0.5,
        }
        .with_resolution(256)
    }

    /// Sets the grid size and resets `mollify_eps` to `2 dalpha^2`.
    pub fn with_resolution(mut self, n_points: usize) -> Self {
        let d = 2.0 * PI / n_points as f64;
        self.n_points = n_points;
        self.mollify_eps = 2.0 * d * d;
        self
    }

    /// Slope of `eta` on either side of the tip.
    pub fn slope(&self) -> f64 {
        match self.kind {
            CornerKind::Smooth => 0.0,
            _ => 1.0 / (0.5 * self.opening_angle).tan(),
        }
    }

    /// Acute tips need an opening angle in `(0, pi/2)`, obtuse ones `(pi/2, pi)`.
    pub fn validate(&self) -> Result<()> {
        let a = self.opening_angle;
        let ok = match self.kind {
            CornerKind::Acute => a > 0.0 && a < PI / 2.0,
            CornerKind::Obtuse => a > PI / 2.0 && a < PI,
            CornerKind::Smooth => true,
        };
        if !ok {
            return Err(Error::Parameter(format!(
                "opening angle {a} does not match {:?}",
                self.kind
            )));
        }
        if !(self.duration > 0.0) || !(self.mollify_eps > 0.0) {
            return Err(Error::Parameter("duration and mollify_eps must be positive".into()));
        }
        Ok(())
    }

    /// Lipschitz tip at `alpha = 0` with slopes `-+s`, flattening to zero slope
    /// at the antipode, before mollification.
    pub fn raw_profile(&self, grid: &PeriodicGrid) -> Vec<f64> {
        let s = self.slope();
        grid.sample(|a| {
            let d = if a > PI { 2.0 * PI - a } else { a };
            -s * d + s * d * d / (2.0 * PI)
        })
    }

    pub fn run(&self) -> Result<CornerReport> {
        self.validate()?;
        let grid = PeriodicGrid::new(self.n_points)?;
        let raw = self.raw_profile(&grid);
        let eta0 = grid.mollify(&raw, self.mollify_eps)?;
        let amplitude = raw[0].exp() - eta0[0].exp();
        let threshold = 10.0 * amplitude;
        let cfg = EvolutionConfig {
            epsilon: 0.0,
            dt: TimeStep::Auto,
            t_end: self.duration,
            n_points: self.n_points,
            save_every: 1,
            cfl_safety: self.cfl_safety,
        };
        let run = simulate(&cfg, &eta0)?;
        let h0 = eta0[0].exp();
        let trace: Vec<(f64, f64)> = run
            .snapshots
            .iter()
            .map(|s| (s.time, s.eta[0].exp()))
            .collect();
        let displacement = trace.iter().fold(0.0_f64, |m, (_, h)| m.max(h - h0));
        let motion = if displacement > threshold {
            TipMotion::Moved
        } else {
            TipMotion::Waiting
        };
        Ok(CornerReport {
            kind: self.kind,
            opening_angle: self.opening_angle,
            slope: self.slope(),
            mollify_amplitude: amplitude,
            threshold,
            tip_h0: h0,
            displacement,
            trace,
            motion,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerReport {
    pub kind: CornerKind,
    pub opening_angle: f64,
    pub slope: f64,
    /// Drop of the tip radius caused by mollification.
    pub mollify_amplitude: f64,
    pub threshold: f64,
    pub tip_h0: f64,
    /// Largest advance of the tip radius over the run.
    pub displacement: f64,
    /// `(t, h(alpha_0, t))`.
    pub trace: Vec<(f64, f64)>,
    pub motion: TipMotion,
}

/// Runs the corner experiment with default resolution.
pub fn corner_experiment(kind: CornerKind, opening_angle: f64, duration: f64) -> Result<CornerReport> {
    CornerSetup::new(kind, opening_angle, duration).run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// `tolerance - violation`; negative means failure. `None` when skipped.
    pub margin: Option<f64>,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckOutcome {
    fn from_margin(name: &'static str, margin: f64, detail: String) -> Self {
        let status = if margin >= 0.0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            name,
            margin: Some(margin),
            status,
            detail,
        }
    }

    fn skipped(name: &'static str, detail: String) -> Self {
        Self {
            name,
            margin: None,
            status: CheckStatus::Skipped,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub checks: Vec<CheckOutcome>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const LIPSCHITZ_BOUND_SLACK: f64 = 1e-6;
pub const LIPSCHITZ_STEP_SLACK: f64 = 1e-8;
pub const ENVELOPE_SLACK: f64 = 1e-6;
pub const TAYLOR_SLACK: f64 = 1e-8;
pub const AREA_REL_TOL: f64 = 1e-6;
pub const MODULUS_SLACK: f64 = 1e-6;
pub const ROUNDNESS_TOL: f64 = 0.01;
/// Time from which the roundness check applies.
pub const ROUNDNESS_TIME: f64 = 20.0;

/// `sup |f_i - f_j| / d(alpha_i, alpha_j)^gamma` over node pairs, with `d`
/// the periodic distance.
pub fn holder_seminorm(grid: &PeriodicGrid, f: &[f64], gamma: f64) -> f64 {
    let n = f.len();
    let mut best = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            let k = (j - i).min(n - (j - i));
            let d = k as f64 * grid.spacing();
            best = best.max((f[i] - f[j]).abs() / d.powf(gamma));
        }
    }
    best
}

/// Evaluates the evolution invariants on a completed run.
///
/// Geometric quantities are recomputed from the snapshots, so tampering with
/// stored samples is detected.
pub fn invariant_suite(run: &EvolutionRun) -> InvariantReport {
    let mut checks = Vec::new();
    let grid = match PeriodicGrid::new(run.config.n_points) {
        Ok(g) => g,
        Err(e) => {
            checks.push(CheckOutcome::from_margin(
                "snapshots_valid",
                -1.0,
                format!("bad grid size: {e}"),
            ));
            return InvariantReport { checks };
        }
    };

    let times = run.times();
    let increasing = times.windows(2).fold(f64::INFINITY, |m, w| m.min(w[1] - w[0]));
    let start_ok = times.first() == Some(&0.0);
    checks.push(CheckOutcome::from_margin(
        "times_increasing",
        if start_ok { increasing.min(f64::MAX) } else { -1.0 },
        format!("{} time levels, smallest increment {increasing:e}", times.len()),
    ));

    let mut curves = Vec::with_capacity(run.snapshots.len());
    let mut invalid = None;
    for s in &run.snapshots {
        match BoundaryCurve::from_eta(&grid, &s.eta) {
            Ok(c) => curves.push((s, c)),
            Err(e) => {
                invalid = Some(format!("snapshot at step {}: {e}", s.step));
                break;
            }
        }
    }
    if let Some(detail) = invalid {
        checks.push(CheckOutcome::from_margin("snapshots_valid", -1.0, detail));
        return InvariantReport { checks };
    }
    checks.push(CheckOutcome::from_margin(
        "snapshots_valid",
        0.0,
        format!("{} snapshots", curves.len()),
    ));
    let (first, c0) = &curves[0];
    if first.step != 0 || first.time != 0.0 {
        checks.push(CheckOutcome::from_margin(
            "snapshots_valid",
            -1.0,
            "first snapshot is not the initial state".into(),
        ));
        return InvariantReport { checks };
    }
    let stats0 = c0.stats();

    // Lipschitz bound and monotonicity, from snapshots and from the trace.
    let lips: Vec<f64> = curves.iter().map(|(_, c)| c.stats().lipschitz_norm).collect();
    let bound = lips
        .iter()
        .fold(f64::INFINITY, |m, l| m.min(stats0.lipschitz_norm + LIPSCHITZ_BOUND_SLACK - l));
    checks.push(CheckOutcome::from_margin(
        "lipschitz_bound",
        bound,
        format!("initial {:.12e}", stats0.lipschitz_norm),
    ));
    let mut mono = f64::INFINITY;
    for (a, b) in curves.iter().zip(curves.iter().skip(1)) {
        let allowed = LIPSCHITZ_STEP_SLACK * (b.0.step - a.0.step).max(1) as f64;
        mono = mono.min(allowed - (b.1.stats().lipschitz_norm - a.1.stats().lipschitz_norm));
    }
    for w in run.steps.windows(2) {
        mono = mono.min(LIPSCHITZ_STEP_SLACK - (w[1].stats.lipschitz_norm - w[0].stats.lipschitz_norm));
    }
    checks.push(CheckOutcome::from_margin(
        "lipschitz_monotone",
        mono.min(f64::MAX),
        "per-step slack 1e-8".into(),
    ));

    // Radial envelope.
    let (r2_lo, r2_hi) = (stats0.min_h.powi(2), stats0.max_h.powi(2));
    let mut env = f64::INFINITY;
    for (s, c) in &curves {
        let st = c.stats();
        env = env.min(st.min_h - ((r2_lo + 2.0 * s.time).sqrt() - ENVELOPE_SLACK));
        env = env.min((r2_hi + 2.0 * s.time).sqrt() + ENVELOPE_SLACK - st.max_h);
    }
    for d in &run.steps {
        env = env.min(d.stats.min_h - ((r2_lo + 2.0 * d.t).sqrt() - ENVELOPE_SLACK));
        env = env.min((r2_hi + 2.0 * d.t).sqrt() + ENVELOPE_SLACK - d.stats.max_h);
    }
    checks.push(CheckOutcome::from_margin(
        "linf_envelope",
        env,
        format!("initial radii [{:.12e}, {:.12e}]", stats0.min_h, stats0.max_h),
    ));

    // Taylor sign at every snapshot.
    let mut taylor = f64::NEG_INFINITY;
    let mut taylor_err = None;
    for (s, c) in &curves {
        match OperatorSet::assemble(c).and_then(|ops| taylor_sign_residual(&ops)) {
            Ok(v) => taylor = taylor.max(v),
            Err(e) => {
                taylor_err = Some(format!("step {}: {e}", s.step));
                break;
            }
        }
    }
    checks.push(match taylor_err {
        Some(detail) => CheckOutcome::from_margin("taylor_sign", -1.0, detail),
        None => CheckOutcome::from_margin(
            "taylor_sign",
            TAYLOR_SLACK - taylor,
            format!("max (G eta - 1) = {taylor:.6e}"),
        ),
    });

    // Area law; viscosity removes area, so only inviscid runs are checked.
    if run.config.epsilon == 0.0 {
        let mut area = f64::INFINITY;
        for (s, c) in &curves {
            let gap = (c.stats().area - stats0.area - 2.0 * PI * s.time).abs() / stats0.area;
            area = area.min(AREA_REL_TOL - gap);
        }
        checks.push(CheckOutcome::from_margin(
            "area_law",
            area,
            "relative to initial area".into(),
        ));
    } else {
        checks.push(CheckOutcome::skipped(
            "area_law",
            format!("epsilon = {} > 0", run.config.epsilon),
        ));
    }

    // Holder moduli of continuity.
    for (name, gamma) in [("modulus_holder_half", 0.5), ("modulus_lipschitz", 1.0)] {
        let base = holder_seminorm(&grid, c0.eta(), gamma);
        let worst = curves
            .iter()
            .map(|(_, c)| holder_seminorm(&grid, c.eta(), gamma))
            .fold(0.0, f64::max);
        checks.push(CheckOutcome::from_margin(
            name,
            base + MODULUS_SLACK - worst,
            format!("initial seminorm {base:.12e}"),
        ));
    }

    // Roundness at late times.
    let last = curves.last().expect("initial snapshot present");
    if last.0.time >= ROUNDNESS_TIME {
        let st = last.1.stats();
        checks.push(CheckOutcome::from_margin(
            "asymptotic_roundness",
            ROUNDNESS_TOL - (st.max_h / st.min_h - 1.0),
            format!("t = {}", last.0.time),
        ));
    } else {
        checks.push(CheckOutcome::skipped(
            "asymptotic_roundness",
            format!("final time {} < {ROUNDNESS_TIME}", last.0.time),
        ));
    }

    InvariantReport { checks }
}

/// `min (eta_upper - eta_lower)` over snapshots saved at common times.
pub fn comparison_margin(lower: &EvolutionRun, upper: &EvolutionRun) -> Result<f64> {
    let mut margin = f64::INFINITY;
    let mut matched = 0;
    for a in &lower.snapshots {
        if let Some(b) = upper.snapshots.iter().find(|b| b.time == a.time) {
            matched += 1;
            for (x, y) in a.eta.iter().zip(&b.eta) {
                margin = margin.min(y - x);
            }
        }
    }
    if matched == 0 {
        return Err(Error::Parameter("runs share no snapshot times".into()));
    }
    Ok(margin)
}

/// Sup distance between `eta(t)` and `eta_scaled(lambda^2 t) - ln lambda` at
/// matching snapshot indices; the scaled run must use time step `lambda^2 dt`.
pub fn scaling_gap(base: &EvolutionRun, scaled: &EvolutionRun, lambda: f64) -> Result<f64> {
    if base.snapshots.len() != scaled.snapshots.len() {
        return Err(Error::Shape {
            expected: base.snapshots.len(),
            found: scaled.snapshots.len(),
        });
    }
    let shift = lambda.ln();
    let mut gap = 0.0_f64;
    for (a, b) in base.snapshots.iter().zip(&scaled.snapshots) {
        if (b.time - lambda * lambda * a.time).abs() > 1e-9 * (1.0 + b.time) {
            return Err(Error::Parameter(format!(
                "snapshot times {} and {} are not related by lambda^2",
                a.time, b.time
            )));
        }
        for (x, y) in a.eta.iter().zip(&b.eta) {
            gap = gap.max((y - shift - x).abs());
        }
    }
    Ok(gap)
}

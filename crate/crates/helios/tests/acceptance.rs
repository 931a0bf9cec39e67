//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use helios::symmetry::symmetry_checks;
use helios_core::diagnostics::{comparison_margin, scaling_gap};
use helios_core::{
    apply_dtn, dtn_oracle_collocation, graph_dtn_oracle, reconstruct_pressure, simulate,
    taylor_sign_residual, vanishing_viscosity_sweep, BoundaryCurve, EvolutionConfig, EvolutionRun,
    OperatorSet, PeriodicGrid, TimeStep,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ops(n: usize, eta: impl Fn(f64) -> f64) -> OperatorSet {
    let g = PeriodicGrid::new(n).unwrap();
    OperatorSet::assemble(&BoundaryCurve::from_eta(&g, &g.sample(eta)).unwrap()).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn disk_spectrum() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for r in [0.5_f64, 1.0, 3.0] {
        let o = ops(256, |_| r.ln());
        let g = o.curve().grid();
        for k in 1..=8 {
            let kf = k as f64;
            let got = apply_dtn(&o, &g.sample(|a| (kf * a).cos())).unwrap().g_of;
            worst = worst.max(sup(&got, &g.sample(|a| kf * (kf * a).cos())));
        }
    }
    let t = start.elapsed();
    verdict(
        worst < 1e-10 && within(t, 5.0),
        format!("max error {worst:.2e} (< 1e-10), {:.2} s (< 5 s)", t.as_secs_f64()),
    )
}

fn radial_run() -> (EvolutionRun, Duration) {
    let start = Instant::now();
    let cfg = EvolutionConfig::new(128, 0.5)
        .with_dt(TimeStep::Fixed(1e-4))
        .with_save_every(500);
    let run = simulate(&cfg, &[0.0; 128]).unwrap();
    (run, start.elapsed())
}

fn radial_evolution(run: &EvolutionRun, t: Duration) -> Verdict {
    let last = run.final_snapshot();
    let exact = 2f64.sqrt();
    let err = last
        .eta
        .iter()
        .map(|e| (e.exp() - exact).abs() / exact)
        .fold(0.0, f64::max);
    verdict(
        last.time == 0.5 && err < 1e-6 && within(t, 60.0),
        format!(
            "t = {}, max relative error {err:.2e} (< 1e-6), {:.1} s (< 60 s)",
            last.time,
            t.as_secs_f64()
        ),
    )
}

fn area_of(grid: &PeriodicGrid, eta: &[f64]) -> f64 {
    BoundaryCurve::from_eta(grid, eta).unwrap().stats().area
}

fn area_law(run: &EvolutionRun) -> Verdict {
    let grid = PeriodicGrid::new(run.config.n_points).unwrap();
    let a0 = area_of(&grid, &run.initial_snapshot().eta);
    let worst = run
        .snapshots
        .iter()
        .map(|s| {
            (area_of(&grid, &s.eta) - a0 - 2.0 * std::f64::consts::PI * s.time).abs() / a0
        })
        .fold(0.0, f64::max);
    verdict(
        worst < 1e-6,
        format!("{} saved times, max relative defect {worst:.2e} (< 1e-6)", run.snapshots.len()),
    )
}

fn wavy_runs() -> Vec<(f64, EvolutionRun)> {
    let g = PeriodicGrid::new(128).unwrap();
    let eta0 = g.sample(|a| 0.2 * (2.0 * a).sin());
    std::thread::scope(|s| {
        let handles: Vec<_> = [0.0, 1e-3]
            .into_iter()
            .map(|eps| {
                let eta0 = &eta0;
                s.spawn(move || {
                    let cfg = EvolutionConfig::new(128, 1.0)
                        .with_epsilon(eps)
                        .with_dt(TimeStep::Fixed(5e-4))
                        .with_save_every(100);
                    (eps, simulate(&cfg, eta0).unwrap())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn lipschitz_principle(runs: &[(f64, EvolutionRun)]) -> Verdict {
    let grid = PeriodicGrid::new(128).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (eps, run) in runs {
        let saved: Vec<f64> = run
            .snapshots
            .iter()
            .map(|s| BoundaryCurve::from_eta(&grid, &s.eta).unwrap().stats().lipschitz_norm)
            .collect();
        let max_saved = saved.iter().copied().fold(0.0, f64::max);
        let worst_rise = run
            .steps
            .windows(2)
            .map(|w| w[1].stats.lipschitz_norm - w[0].stats.lipschitz_norm)
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= max_saved <= 0.4 + 1e-6 && worst_rise <= 1e-8;
        parts.push(format!("eps {eps}: max {max_saved:.9} (<= 0.4 + 1e-6), worst step rise {worst_rise:.1e} (<= 1e-8)"));
    }
    verdict(pass, parts.join("; "))
}

fn linf_envelope(runs: &[(f64, EvolutionRun)]) -> Verdict {
    let mut worst: f64 = f64::INFINITY;
    for (_, run) in runs {
        for s in &run.snapshots {
            let lo = ((-0.4_f64).exp() + 2.0 * s.time).sqrt() - 1e-6;
            let hi = (0.4_f64.exp() + 2.0 * s.time).sqrt() + 1e-6;
            for e in &s.eta {
                let h = e.exp();
                worst = worst.min(h - lo).min(hi - h);
            }
        }
    }
    verdict(worst >= 0.0, format!("smallest distance to the envelope {worst:.3e} (>= 0)"))
}

fn taylor_sign() -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    for m in [1.0, 2.0, 3.0] {
        for a in [0.1, 0.2, 0.3, 0.4, 0.5] {
            worst = worst.max(taylor_sign_residual(&ops(256, |x| a * (m * x).cos())).unwrap());
        }
    }
    verdict(worst <= 1e-8, format!("max residual over 15 curves {worst:.4} (<= 1e-8)"))
}

fn comparison() -> Verdict {
    let g = PeriodicGrid::new(128).unwrap();
    let low = g.sample(|a| 0.15 * (3.0 * a).cos() - 0.1 * a.sin());
    let high: Vec<f64> = low.iter().map(|e| e + 0.1).collect();
    let cfg = EvolutionConfig::new(128, 0.5)
        .with_dt(TimeStep::Fixed(1e-3))
        .with_save_every(50);
    let (lower, upper) = std::thread::scope(|s| {
        let a = s.spawn(|| simulate(&cfg, &low).unwrap());
        let b = s.spawn(|| simulate(&cfg, &high).unwrap());
        (a.join().unwrap(), b.join().unwrap())
    });
    let margin = comparison_margin(&lower, &upper).unwrap();
    verdict(
        margin >= -1e-8,
        format!("min(eta_upper - eta_lower) over {} saved times {margin:.4} (>= -1e-8)", lower.snapshots.len()),
    )
}

fn symmetries() -> Verdict {
    let g = PeriodicGrid::new(128).unwrap();
    let eta = g.sample(|a| 0.2 * a.cos() + 0.1 * (3.0 * a).sin());
    let checks = symmetry_checks(&eta).unwrap();
    let matrix = checks.iter().find(|c| c.name == "matrix_scale").unwrap().violation;

    let g = PeriodicGrid::new(64).unwrap();
    let lambda: f64 = 2.0;
    let eta0 = g.sample(|a| 0.2 * (2.0 * a).sin());
    let cfg = EvolutionConfig::new(64, 0.25)
        .with_dt(TimeStep::Fixed(1e-3))
        .with_save_every(50);
    let scaled_cfg = EvolutionConfig::new(64, 0.25 * lambda * lambda)
        .with_dt(TimeStep::Fixed(1e-3 * lambda * lambda))
        .with_save_every(50);
    let lifted: Vec<f64> = eta0.iter().map(|e| e + lambda.ln()).collect();
    let gap = scaling_gap(
        &simulate(&cfg, &eta0).unwrap(),
        &simulate(&scaled_cfg, &lifted).unwrap(),
        lambda,
    )
    .unwrap();
    verdict(
        matrix <= 1e-13 && gap < 1e-6,
        format!("matrix scale defect {matrix:.1e} (<= 1e-13), trajectory gap at lambda = 2 {gap:.1e} (< 1e-6)"),
    )
}

fn collocation_cross_check() -> Verdict {
    let o = ops(256, |a| 0.2 * a.cos());
    let eta = o.curve().eta().to_vec();
    let star = apply_dtn(&o, &eta).unwrap().g_of;
    match dtn_oracle_collocation(o.curve(), &eta, 32) {
        Ok(fit) => {
            let d = sup(&star, &fit.g_of);
            verdict(
                d < 1e-7 && fit.misfit < 1e-9,
                format!("difference {d:.1e} (< 1e-7), oracle misfit {:.1e} (< 1e-9)", fit.misfit),
            )
        }
        Err(e) => verdict(false, format!("oracle inconclusive: {e}")),
    }
}

fn graph_equivalence() -> Verdict {
    let o = ops(256, |x| 0.1 * x.cos());
    let eta = o.curve().eta().to_vec();
    let star = apply_dtn(&o, &eta).unwrap().g_of;
    match graph_dtn_oracle(&eta, &eta, 32) {
        Ok(fit) => {
            let d = sup(&star, &fit.g_of);
            verdict(
                d < 1e-7,
                format!("difference {d:.1e} (< 1e-7), graph fit misfit {:.1e}", fit.misfit),
            )
        }
        Err(e) => verdict(false, format!("oracle inconclusive: {e}")),
    }
}

fn vanishing_viscosity() -> Verdict {
    let start = Instant::now();
    let g = PeriodicGrid::new(128).unwrap();
    let eta0 = g.sample(|a| 0.2 * (2.0 * a).sin() + 0.1 * a.cos());
    let cfg = EvolutionConfig::new(128, 0.5);
    let report = vanishing_viscosity_sweep(&cfg, &eta0, &[1e-2, 5e-3, 2.5e-3]).unwrap();
    let t = start.elapsed();
    let ratios = report.gap_ratios();
    let pass = ratios.iter().all(|r| *r >= 1.5) && within(t, 300.0);
    verdict(
        pass,
        format!(
            "gaps {:.3e}, {:.3e}; ratio {:.3} (>= 1.5), {:.1} s (< 300 s)",
            report.gaps[0],
            report.gaps[1],
            ratios[0],
            t.as_secs_f64()
        ),
    )
}

fn pressure() -> Verdict {
    let g = PeriodicGrid::new(128).unwrap();
    let disk = BoundaryCurve::from_eta(&g, &[0.0; 128]).unwrap();
    // Rings at 0.1 + 0.9 i / 9, so ring 4 is r = 0.5.
    let field = reconstruct_pressure(&disk, 10, 64, 0.1).unwrap();
    let disk_err = field
        .points
        .iter()
        .filter(|p| (p.r - 0.5).abs() < 1e-12)
        .map(|p| (p.p - 2f64.ln()).abs())
        .fold(0.0, f64::max);
    let hits = field.points.iter().filter(|p| (p.r - 0.5).abs() < 1e-12).count();

    let wavy = BoundaryCurve::from_eta(&g, &g.sample(|a| 0.1 * (3.0 * a).cos() + 0.05 * a.sin())).unwrap();
    let min_h = wavy.stats().min_h;
    let field = reconstruct_pressure(&wavy, 32, 128, 0.1 * min_h).unwrap();
    let min_raw = field.min_excess;
    let pass = hits == 64 && disk_err < 1e-8 && min_raw >= -1e-8 && field.boundary_misfit < 1e-6;
    verdict(
        pass,
        format!(
            "disk |p(0.5) - log 2| {disk_err:.1e} (< 1e-8); perturbed min(phi - log r) {min_raw:.1e} (>= -1e-8), boundary misfit {:.1e} (< 1e-6)",
            field.boundary_misfit
        ),
    )
}

fn asymptotics() -> Verdict {
    let start = Instant::now();
    let g = PeriodicGrid::new(128).unwrap();
    let cfg = EvolutionConfig::new(128, 20.0);
    let run = simulate(&cfg, &g.sample(|a| 0.3 * (2.0 * a).cos())).unwrap();
    let t = start.elapsed();
    let last = run.steps.last().unwrap();
    let ratio = last.stats.max_h / last.stats.min_h - 1.0;
    verdict(
        last.t == 20.0 && ratio <= 0.01 && within(t, 600.0),
        format!(
            "max h / min h - 1 = {ratio:.2e} at t = 20 (<= 0.01), {} steps, {:.1} s (< 600 s)",
            run.steps.len() - 1,
            t.as_secs_f64()
        ),
    )
}

fn guarded<F: FnOnce() -> Verdict>(f: F) -> Verdict {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        }
    }
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, v: Verdict| {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failures += 1;
        }
        println!("{tag} {id:>2} {name}: {}", v.detail);
    };

    report(1, "disk DtN spectrum", guarded(disk_spectrum));
    match catch_unwind(radial_run) {
        Ok((run, t)) => {
            report(2, "radial evolution", guarded(|| radial_evolution(&run, t)));
            report(3, "area law", guarded(|| area_law(&run)));
        }
        Err(_) => {
            report(2, "radial evolution", verdict(false, "run panicked".into()));
            report(3, "area law", verdict(false, "run panicked".into()));
        }
    }
    match catch_unwind(wavy_runs) {
        Ok(runs) => {
            report(4, "Lipschitz maximum principle", guarded(|| lipschitz_principle(&runs)));
            report(5, "L-infinity envelope", guarded(|| linf_envelope(&runs)));
        }
        Err(_) => {
            report(4, "Lipschitz maximum principle", verdict(false, "run panicked".into()));
            report(5, "L-infinity envelope", verdict(false, "run panicked".into()));
        }
    }
    report(6, "Taylor sign", guarded(taylor_sign));
    report(7, "comparison principle", guarded(comparison));
    report(8, "symmetries", guarded(symmetries));
    report(9, "DtN vs collocation oracle", guarded(collocation_cross_check));
    report(10, "graph-domain equivalence", guarded(graph_equivalence));
    report(11, "vanishing viscosity", guarded(vanishing_viscosity));
    report(12, "pressure reconstruction", guarded(pressure));
    report(13, "large-time roundness", guarded(asymptotics));

    if failures == 0 {
        println!("all 13 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} of 13 criteria failed");
        ExitCode::FAILURE
    }
}

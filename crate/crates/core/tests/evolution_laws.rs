use helios_core::diagnostics::{comparison_margin, scaling_gap, CornerKind, CornerSetup};
use helios_core::evolution::{step, SweepReport};
use helios_core::{
    corner_experiment, invariant_suite, simulate, vanishing_viscosity_sweep, BoundaryCurve,
    CheckStatus, EvolutionConfig, PeriodicGrid, TimeStep, TipMotion,
};

fn wavy(g: &PeriodicGrid) -> Vec<f64> {
    g.sample(|a| 0.2 * (2.0 * a).sin())
}

#[test]
fn lipschitz_norm_never_grows_under_auto_steps() {
    let g = PeriodicGrid::new(128).unwrap();
    let cfg = EvolutionConfig::new(128, 0.3);
    let run = simulate(&cfg, &wavy(&g)).unwrap();
    for w in run.steps.windows(2) {
        assert!(w[1].stats.lipschitz_norm <= w[0].stats.lipschitz_norm + 1e-8);
    }
    let single = step(
        &BoundaryCurve::from_eta(&g, &wavy(&g)).unwrap(),
        5e-3,
        0.0,
    )
    .unwrap();
    assert!(single.stats().lipschitz_norm <= 0.4 + 1e-8);
}

#[test]
fn ordered_data_stay_ordered() {
    let g = PeriodicGrid::new(64).unwrap();
    let cfg = EvolutionConfig::new(64, 0.5)
        .with_dt(TimeStep::Fixed(2e-3))
        .with_save_every(25);
    let low = g.sample(|a| 0.15 * (3.0 * a).cos() - 0.1 * a.sin());
    let high: Vec<f64> = low.iter().map(|e| e + 0.1).collect();
    let lower = simulate(&cfg, &low).unwrap();
    let upper = simulate(&cfg, &high).unwrap();
    assert!(comparison_margin(&lower, &upper).unwrap() >= -1e-8);
}

#[test]
fn parabolic_scaling_maps_solutions_to_solutions() {
    let g = PeriodicGrid::new(64).unwrap();
    let lambda: f64 = 2.0;
    let eta0 = wavy(&g);
    let cfg = EvolutionConfig::new(64, 0.25)
        .with_dt(TimeStep::Fixed(1e-3))
        .with_save_every(50);
    let scaled_cfg = EvolutionConfig::new(64, 0.25 * lambda * lambda)
        .with_dt(TimeStep::Fixed(1e-3 * lambda * lambda))
        .with_save_every(50);
    let base = simulate(&cfg, &eta0).unwrap();
    let lifted: Vec<f64> = eta0.iter().map(|e| e + lambda.ln()).collect();
    let scaled = simulate(&scaled_cfg, &lifted).unwrap();
    assert!(scaling_gap(&base, &scaled, lambda).unwrap() < 1e-6);
}

#[test]
fn invariant_suite_on_a_viscous_run() {
    let g = PeriodicGrid::new(64).unwrap();
    let cfg = EvolutionConfig::new(64, 0.2)
        .with_epsilon(1e-3)
        .with_dt(TimeStep::Fixed(1e-3))
        .with_save_every(20);
    let report = invariant_suite(&simulate(&cfg, &wavy(&g)).unwrap());
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.get("area_law").unwrap().status, CheckStatus::Skipped);
    for name in ["modulus_holder_half", "modulus_lipschitz"] {
        assert_eq!(report.get(name).unwrap().status, CheckStatus::Pass);
    }
}

#[test]
fn sweep_of_a_circle_is_the_radial_solution() {
    let cfg = EvolutionConfig::new(32, 0.1).with_dt(TimeStep::Fixed(1e-4));
    let report = vanishing_viscosity_sweep(&cfg, &[0.0; 32], &[1e-2, 5e-3, 2.5e-3]).unwrap();
    let exact = 0.5 * (1.0_f64 + 0.2).ln();
    for level in &report.levels {
        assert!(level.final_eta.iter().all(|e| (e - exact).abs() < 1e-8));
    }
    assert!(report.gaps.iter().all(|g| *g < 1e-12));
}

#[test]
fn sweep_gaps_shrink_for_smooth_and_cornered_data() {
    let g = PeriodicGrid::new(64).unwrap();
    let cfg = EvolutionConfig::new(64, 0.25).with_dt(TimeStep::Fixed(2e-3));
    let levels = [1e-2, 5e-3, 2.5e-3];
    let smooth = vanishing_viscosity_sweep(&cfg, &wavy(&g), &levels).unwrap();
    assert!(smooth.gap_ratios().iter().all(|r| *r >= 1.5), "{:?}", smooth.gaps);

    let slope = 0.3;
    let tri = g.sample(|a| slope * (a - std::f64::consts::PI).abs());
    let rough: SweepReport = vanishing_viscosity_sweep(&cfg, &tri, &levels).unwrap();
    assert!(rough.gaps.windows(2).all(|w| w[1] < w[0]), "{:?}", rough.gaps);
    let last = rough.levels.last().unwrap();
    assert!(last.final_lipschitz <= slope + 1e-4);
}

#[test]
fn sweep_rejects_bad_levels() {
    let cfg = EvolutionConfig::new(32, 0.1);
    assert!(vanishing_viscosity_sweep(&cfg, &[0.0; 32], &[1e-3, 1e-2]).is_err());
}

#[test]
fn corner_tips_show_the_angle_dichotomy() {
    let acute = corner_experiment(CornerKind::Acute, 1.0, 0.02).unwrap();
    assert_eq!(acute.motion, TipMotion::Waiting);
    let obtuse = CornerSetup::new(CornerKind::Obtuse, 2.0, 0.05)
        .with_resolution(128)
        .run()
        .unwrap();
    let acute_long = CornerSetup::new(CornerKind::Acute, 1.0, 0.05)
        .with_resolution(128)
        .run()
        .unwrap();
    // Relative to its own smoothing scale the obtuse tip advances far more.
    let rel = |r: &helios_core::CornerReport| r.displacement / r.mollify_amplitude;
    assert!(rel(&obtuse) > 10.0 * rel(&acute_long), "{} vs {}", rel(&obtuse), rel(&acute_long));
}

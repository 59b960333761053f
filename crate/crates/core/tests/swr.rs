use airsea_swr::swr::{explicit_weights, ReferenceKind, SwrConfig};
use airsea_swr::{GridSpec, LawKind, PhysicalParams, Scenario, TimeSpec, C64};
use proptest::prelude::*;

fn reduced() -> Scenario {
    Scenario::new(PhysicalParams::reference(), GridSpec::new(20.0, 2.0, 20, 50).unwrap(), TimeSpec::new(60.0, 100).unwrap()).unwrap()
}

fn max_gap(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max)
}

#[test]
fn identical_configurations_give_identical_reports() {
    let s = reduced();
    for kind in [LawKind::Linear, LawKind::Quadratic, LawKind::Linearized] {
        let law = s.law(kind, None).unwrap();
        let reference = s.monolithic(&law).unwrap();
        let cfg = SwrConfig {
            theta: 1.2,
            max_iters: 6,
            seed: 99,
            ..SwrConfig::default()
        };
        let a = s.run(&law, &cfg, Some(&reference)).unwrap().report;
        let b = s.run(&law, &cfg, Some(&reference)).unwrap().report;
        assert_eq!(a, b);
        let c = s.run(&law, &SwrConfig { seed: 100, ..cfg }, Some(&reference)).unwrap().report;
        assert_ne!(a.rows, c.rows);
    }
}

#[test]
fn reference_is_a_fixed_point_for_every_law_and_theta() {
    let s = reduced();
    for kind in [LawKind::Linear, LawKind::Quadratic, LawKind::Linearized] {
        let law = s.law(kind, None).unwrap();
        let reference = s.monolithic(&law).unwrap();
        for theta in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let cfg = SwrConfig {
                theta,
                noise_amplitude: 0.0,
                tol: 1e-11,
                ..SwrConfig::default()
            };
            let report = s.run(&law, &cfg, Some(&reference)).unwrap().report;
            assert_eq!(report.iterations(), 1, "{kind} theta={theta}");
            assert!(report.rows[0].err_total <= 1e-11 * report.reference_norm);
            assert!(report.converged && !report.diverged);
        }
    }
}

#[test]
fn single_iteration_gives_one_row() {
    let s = reduced();
    let law = s.law(LawKind::Quadratic, None).unwrap();
    let reference = s.monolithic(&law).unwrap();
    let report = s
        .run(&law, &SwrConfig { max_iters: 1, ..SwrConfig::default() }, Some(&reference))
        .unwrap()
        .report;
    assert_eq!(report.iterations(), 1);
    assert_eq!(report.rows[0].k, 1);
    assert_eq!(report.rows[0].ratio, None);
}

#[test]
fn converged_iterate_serves_as_reference() {
    let s = reduced();
    let law = s.law(LawKind::Linear, None).unwrap();
    let out = s.run(&law, &SwrConfig::default(), None).unwrap();
    let report = &out.report;
    assert_eq!(report.reference, ReferenceKind::ConvergedSwr);
    assert!(report.converged);
    assert_eq!(report.rows.last().unwrap().err_total, 0.0);
    let mono = s.monolithic(&law).unwrap();
    assert!(max_gap(&out.solution.atmosphere.states, &mono.atmosphere.states) <= 1e-10);
}

#[test]
fn rows_are_contiguous_and_ratios_consistent() {
    let s = reduced();
    let law = s.law(LawKind::Linear, None).unwrap();
    let reference = s.monolithic(&law).unwrap();
    let out = s
        .run(&law, &SwrConfig { theta: 0.7, max_iters: 8, ..SwrConfig::default() }, Some(&reference))
        .unwrap();
    let rows = &out.report.rows;
    assert_eq!(out.history.len(), rows.len() + 1);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.k, i + 1);
        assert!(r.err_atm >= 0.0 && r.err_oce >= 0.0);
        assert!((r.err_total - r.err_atm.hypot(r.err_oce)).abs() <= 1e-15 * r.err_total);
        if i > 0 {
            assert_eq!(r.ratio, Some(r.err_total / rows[i - 1].err_total));
        }
    }
}

#[test]
fn linearized_ratios_track_nonlinear_ones_at_small_noise() {
    let s = reduced();
    let amplitude = 1e-6 * s.equilibrium.linearization_point().jump().norm();
    for theta in [1.0, 1.5] {
        let cfg = SwrConfig {
            theta,
            max_iters: 5,
            noise_amplitude: amplitude,
            seed: 5,
            ..SwrConfig::default()
        };
        let ratios = |kind: LawKind| -> Vec<f64> {
            let law = s.law(kind, None).unwrap();
            let reference = s.monolithic(&law).unwrap();
            s.run(&law, &cfg, Some(&reference)).unwrap().report.rows.iter().filter_map(|r| r.ratio).collect()
        };
        let (nl, lin) = (ratios(LawKind::Quadratic), ratios(LawKind::Linearized));
        assert_eq!(nl.len(), 4);
        for (a, b) in nl.iter().zip(&lin) {
            assert!((b / a - 1.0).abs() <= 0.1, "theta={theta}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn converged_swr_matches_monolithic(theta in 0.6f64..1.6, seed in any::<u64>()) {
        let s = reduced();
        let law = s.law(LawKind::Linear, None).unwrap();
        let mono = s.monolithic(&law).unwrap();
        let cfg = SwrConfig { theta, seed, tol: 1e-12, ..SwrConfig::default() };
        let out = s.run(&law, &cfg, None).unwrap();
        prop_assert!(out.report.converged);
        prop_assert!(max_gap(&out.solution.atmosphere.states, &mono.atmosphere.states) <= 1e-10);
        prop_assert!(max_gap(&out.solution.ocean.states, &mono.ocean.states) <= 1e-10);
    }

    #[test]
    fn explicit_weights_follow_theta(theta in -3.0f64..3.0) {
        let (w_a, w_o) = explicit_weights(theta);
        prop_assert_eq!(w_a, 1.0 - theta);
        prop_assert_eq!(w_o, -1.0);
    }
}

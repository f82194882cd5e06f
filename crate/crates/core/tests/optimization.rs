use jcpulse_core::analysis::reduction_percent;
use jcpulse_core::dynamics::{EvolveOptions, TimeGrid};
use jcpulse_core::optimize::{
    cost, fss, gb_ids, gf_ids, golden_minimize_1d, gradient_minimize_1d, grid_minimize_1d, ids, run_strategy, CostModel, SearchConfig,
    Strategy,
};
use jcpulse_core::pulse::{calibrate_pi_amplitude, PulseTrain};
use jcpulse_core::quantum::{build_space, coherent_excited_state, SystemParams};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

/// Short window and coarse grid so a full strategy run takes well under a second.
fn small_model(alpha2: f64, t_end: f64) -> (CostModel, SearchConfig) {
    let n_max = 16;
    let params = SystemParams::default().with_n_max(n_max);
    let s0 = coherent_excited_state(C64::new(alpha2.sqrt(), 0.0), build_space(n_max).unwrap()).unwrap();
    let grid = TimeGrid::new(0.0, t_end, 1e-3, 10);
    let template = PulseTrain::empty(0.05, calibrate_pi_amplitude(0.05, 100.0).unwrap(), 100.0, (0.0, t_end)).unwrap();
    let model = CostModel::new(s0, params, template, grid, EvolveOptions::default()).unwrap();
    let cfg = SearchConfig { window: (0.0, t_end), coarse_step: 0.1, fine_step: 0.01, ..SearchConfig::default() };
    (model, cfg)
}

#[test]
fn same_seed_gives_identical_runs() {
    let (model, cfg) = small_model(2.0, 2.5);
    let a = ids(&model, 2, &cfg).unwrap();
    let b = ids(&model, 2, &cfg).unwrap();
    assert_eq!(a.times, b.times);
    assert_eq!(a.var_min.to_bits(), b.var_min.to_bits());
    assert_eq!(a.sweep_log, b.sweep_log);
    assert_eq!(a.rng_seed, cfg.rng_seed);
}

#[test]
fn every_iterated_strategy_sweeps_monotonically() {
    let (model, cfg) = small_model(2.0, 2.5);
    for strategy in [Strategy::Ids, Strategy::GbIds, Strategy::GfIds] {
        let r = run_strategy(strategy, &model, 3, &cfg).unwrap();
        assert_eq!(r.strategy_tag, strategy);
        assert_eq!(r.times.len(), 3);
        assert!(!r.sweep_log.is_empty());
        assert!(r.sweeps_monotone(), "{strategy}: {:?}", r.sweep_log);
        assert!(r.times.iter().all(|t| (0.0..=2.5).contains(t)));
        assert!((r.reduction_percent - reduction_percent(r.var_min)).abs() < 1e-12);
    }
}

#[test]
fn named_drivers_match_dispatch() {
    let (model, cfg) = small_model(1.0, 1.5);
    assert_eq!(gb_ids(&model, 1, &cfg).unwrap().times, run_strategy(Strategy::GbIds, &model, 1, &cfg).unwrap().times);
    assert_eq!(gf_ids(&model, 1, &cfg).unwrap().times, run_strategy(Strategy::GfIds, &model, 1, &cfg).unwrap().times);
}

#[test]
fn forward_sequential_is_ordered_and_reported_cost_replays() {
    let (model, cfg) = small_model(2.0, 2.5);
    let r = fss(&model, 3, &cfg).unwrap();
    assert!(r.times.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(r.times, r.times_sorted);
    assert!(r.sweep_log.is_empty());
    assert_eq!(r.per_pulse_history.len(), 3);
    assert_eq!(cost(&r.times, &model).unwrap().to_bits(), r.var_min.to_bits());
    assert_eq!(r.per_pulse_history[2].var_min.to_bits(), r.var_min.to_bits());
}

#[test]
fn first_forward_pulse_lands_near_one() {
    let n_max = 30;
    let params = SystemParams::default().with_n_max(n_max);
    let s0 = coherent_excited_state(C64::new(6f64.sqrt(), 0.0), build_space(n_max).unwrap()).unwrap();
    let template = PulseTrain::empty(0.05, calibrate_pi_amplitude(0.05, 100.0).unwrap(), 100.0, (0.0, 10.0)).unwrap();
    let model = CostModel::new(s0, params, template, TimeGrid::standard(), EvolveOptions::default()).unwrap();
    let r = fss(&model, 1, &SearchConfig::default()).unwrap();
    assert!((r.times[0] - 0.99).abs() <= 0.1, "t1 = {}", r.times[0]);
}

#[test]
fn zero_pulses_and_bad_windows_are_rejected() {
    let (model, cfg) = small_model(1.0, 1.5);
    assert!(ids(&model, 0, &cfg).is_err());
    assert!(fss(&model, 0, &cfg).is_err());
    let wide = SearchConfig { window: (0.0, 5.0), ..cfg };
    assert!(ids(&model, 1, &wide).is_err());
}

#[test]
fn evaluation_counter_advances() {
    let (model, cfg) = small_model(1.0, 1.5);
    let before = model.evaluations();
    let r = gf_ids(&model, 1, &cfg).unwrap();
    assert!(r.evaluations > 0);
    assert_eq!(model.evaluations() - before, r.evaluations);
}

#[test]
fn gradient_search_finds_quadratic_minimum() {
    let cfg = SearchConfig::default();
    let (t, v) = gradient_minimize_1d(|t| (t - 3.0) * (t - 3.0), 0.0, 10.0, 7.0, &cfg).unwrap();
    assert!((t - 3.0).abs() < 1e-3, "{t}");
    assert!(v < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_search_brackets_the_minimum(c in 0.0f64..10.0) {
        let (t, v) = grid_minimize_1d(|t| (t - c).abs(), 0.0, 10.0, 0.1, 0.001, None).unwrap();
        prop_assert!((t - c).abs() <= 0.001 + 1e-9);
        prop_assert!(v <= 0.001 + 1e-9);
    }

    #[test]
    fn included_point_is_never_beaten_by_a_worse_result(c in 0.0f64..10.0, offset in 0.0f64..10.0) {
        let f = |t: f64| (t - c).powi(2);
        let (_, v) = grid_minimize_1d(f, 0.0, 10.0, 0.5, 0.1, Some(offset)).unwrap();
        prop_assert!(v <= f(offset));
    }

    #[test]
    fn local_searches_never_worsen_the_seed(c in 0.5f64..9.5, seed in 0.0f64..10.0) {
        let cfg = SearchConfig::default();
        let f = |t: f64| 1.0 - (-(t - c).powi(2)).exp() + 0.05 * (7.0 * t).sin();
        let (tg, vg) = golden_minimize_1d(f, 0.0, 10.0, seed, &cfg).unwrap();
        let (td, vd) = gradient_minimize_1d(f, 0.0, 10.0, seed, &cfg).unwrap();
        prop_assert!(vg <= f(seed) && vd <= f(seed));
        prop_assert!((0.0..=10.0).contains(&tg) && (0.0..=10.0).contains(&td));
        prop_assert!((vg - f(tg)).abs() < 1e-15 && (vd - f(td)).abs() < 1e-15);
    }

    #[test]
    fn cost_ignores_insertion_order(a in 0.1f64..1.4, b in 0.1f64..1.4) {
        let (model, _) = small_model(1.0, 1.5);
        let x = cost(&[a, b], &model).unwrap();
        let y = cost(&[b, a], &model).unwrap();
        prop_assert!((x - y).abs() < 1e-14);
        prop_assert!(x <= 0.25 + 1e-12);
    }
}

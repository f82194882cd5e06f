use jcpulse_core::dynamics::{EvolveOptions, Evolver, FreeSegments, QuadratureFrame, TimeGrid};
use jcpulse_core::pulse::{calibrate_pi_amplitude, PulseTrain};
use jcpulse_core::quantum::{analytic_jc_evolution, build_space, coherent_excited_state, jc_hamiltonian, StateVector, SystemParams};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

fn setup(alpha2: f64, n_max: usize) -> (SystemParams, StateVector) {
    let params = SystemParams::default().with_n_max(n_max);
    let s0 = coherent_excited_state(C64::new(alpha2.sqrt(), 0.0), build_space(n_max).unwrap()).unwrap();
    (params, s0)
}

fn train(centers: &[f64], sigma: f64) -> PulseTrain {
    PulseTrain::new(centers.to_vec(), sigma, calibrate_pi_amplitude(sigma, 100.0).unwrap(), 100.0, (0.0, 10.0)).unwrap()
}

fn empty() -> PulseTrain {
    train(&[], 0.05)
}

#[test]
fn undriven_matches_closed_form_at_every_sample() {
    for (alpha2, free) in
        [(0.0, FreeSegments::Exact), (1.0, FreeSegments::Exact), (6.0, FreeSegments::Exact), (6.0, FreeSegments::Integrate)]
    {
        let (params, s0) = setup(alpha2, 36);
        let options = EvolveOptions { free_segments: free, ..EvolveOptions::default() };
        let ev = Evolver::new(params, TimeGrid::standard(), options).unwrap();
        let samples = ev.sample_states(&s0, &empty()).unwrap();
        assert_eq!(samples.len(), 1001);
        let worst = samples
            .iter()
            .map(|(t, s)| 1.0 - s.fidelity(&analytic_jc_evolution(C64::new(alpha2.sqrt(), 0.0), *t, &params, s0.space()).unwrap()))
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "alpha^2={alpha2} {free:?}: infidelity {worst:e}");
    }
}

#[test]
fn detuned_free_evolution_matches_dense_exponential() {
    let n_max = 16;
    let params = SystemParams::new(100.0, 97.0, 100.0, n_max).unwrap();
    let space = build_space(n_max).unwrap();
    let s0 = coherent_excited_state(C64::new(1.2, 0.0), space).unwrap();
    let h = jc_hamiltonian(&params, space);
    let d = space.dim();
    let hm = DMatrix::from_fn(d, d, |r, c| h.matrix()[[r, c]]);
    let psi0 = nalgebra::DVector::from_iterator(d, s0.as_slice().iter().copied());
    for options in [EvolveOptions::default(), EvolveOptions { free_segments: FreeSegments::Integrate, ..EvolveOptions::default() }] {
        let ev = Evolver::new(params, TimeGrid::new(0.0, 2.0, 1e-3, 100), options).unwrap();
        for (t, s) in ev.sample_states(&s0, &empty()).unwrap() {
            let u = (hm.clone() * C64::new(0.0, -t)).exp();
            let want = &u * &psi0;
            let err = s.as_slice().iter().zip(want.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-8, "t={t} {options:?}: {err:e}");
        }
    }
}

#[test]
fn norm_and_excitation_are_conserved() {
    let (params, s0) = setup(6.0, 36);
    let published = [0.025, 1.395, 2.205, 3.001, 3.775, 4.601, 6.415, 7.384, 8.344, 8.596, 8.759, 9.144, 9.291, 9.609, 9.999];
    let ev = Evolver::new(params, TimeGrid::standard(), EvolveOptions::default()).unwrap();
    for (_, s) in ev.sample_states(&s0, &train(&published, 0.05)).unwrap() {
        assert!((s.norm() - 1.0).abs() < 1e-8);
    }
    let n0 = s0.mean_excitation();
    for options in [
        EvolveOptions { free_segments: FreeSegments::Integrate, ..EvolveOptions::default() },
        EvolveOptions::rk4_everywhere().with_norm_tolerance(1e-7),
    ] {
        let ev = Evolver::new(params, TimeGrid::standard(), options).unwrap();
        for (t, s) in ev.sample_states(&s0, &empty()).unwrap() {
            assert!((s.mean_excitation() - n0).abs() < 1e-8, "t={t} {options:?}");
        }
    }
}

#[test]
fn step_halving_moves_variance_below_threshold() {
    let (params, s0) = setup(6.0, 36);
    let tr = train(&[0.025, 1.395, 2.205, 3.001, 3.775, 4.601, 6.415, 7.384], 0.05);
    let coarse = Evolver::new(params, TimeGrid::standard(), EvolveOptions::default()).unwrap().evolve(&s0, &tr).unwrap();
    let fine = Evolver::new(params, TimeGrid::standard().halved(), EvolveOptions::default()).unwrap().evolve(&s0, &tr).unwrap();
    assert_eq!(coarse.times, fine.times);
    let worst = coarse.var_x.iter().zip(&fine.var_x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst:e}");
}

#[test]
fn corotating_agrees_with_direct_lab_integration() {
    let (params, s0) = setup(2.0, 22);
    let tr = PulseTrain::new(vec![0.3, 0.62], 0.05, calibrate_pi_amplitude(0.05, 100.0).unwrap(), 100.0, (0.0, 1.0)).unwrap();
    let grid = TimeGrid::new(0.0, 1.0, 2e-5, 500);
    for frame in [QuadratureFrame::Rotating, QuadratureFrame::Lab] {
        let fast = EvolveOptions { quadrature_frame: frame, ..EvolveOptions::default() };
        let direct = EvolveOptions { quadrature_frame: frame, ..EvolveOptions::direct() }.with_norm_tolerance(1e-7);
        let a = Evolver::new(params, TimeGrid::new(0.0, 1.0, 1e-3, 10), fast).unwrap().evolve(&s0, &tr).unwrap();
        let b = Evolver::new(params, grid, direct).unwrap().evolve(&s0, &tr).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        let worst = a.var_x.iter().zip(&b.var_x).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{frame:?}: {worst:e}");
        assert!(a.final_state.fidelity(&b.final_state) > 1.0 - 1e-6);
    }
}

#[test]
fn backward_propagation_retraces() {
    let (params, s0) = setup(3.0, 30);
    let tr = train(&[0.8, 1.1, 2.05], 0.05);
    let ev = Evolver::new(params, TimeGrid::standard(), EvolveOptions::default()).unwrap();
    let forward = ev.propagate(&s0, &tr, 0.0, 2.5, 2500).unwrap();
    let back = ev.propagate(&forward, &tr, 2.5, 0.0, 2500).unwrap();
    assert!(forward.fidelity(&s0) < 0.99);
    assert!(back.fidelity(&s0) > 1.0 - 1e-10);
}

#[test]
fn pulse_beyond_sampled_window_leaves_trace_unchanged() {
    let (params, s0) = setup(6.0, 36);
    let grid = TimeGrid::new(0.0, 9.0, 1e-3, 10);
    let ev = Evolver::new(params, grid, EvolveOptions::default()).unwrap();
    let base = ev.evolve(&s0, &empty()).unwrap();
    let late = ev.evolve(&s0, &train(&[10.0], 0.05)).unwrap();
    let worst = base.var_x.iter().zip(&late.var_x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8);
}

#[test]
fn rotating_frame_field_reproduces_recorded_variance() {
    let (params, s0) = setup(6.0, 36);
    let tr = train(&[0.025, 1.395, 2.205], 0.05);
    for frame in [QuadratureFrame::Rotating, QuadratureFrame::Lab] {
        let ev = Evolver::new(params, TimeGrid::standard(), EvolveOptions { quadrature_frame: frame, ..EvolveOptions::default() }).unwrap();
        let trace = ev.evolve(&s0, &tr).unwrap();
        for (k, (t, s)) in ev.sample_states(&s0, &tr).unwrap().into_iter().enumerate().step_by(97) {
            let v = ev.quadrature_field(&s, t).field_moments().quadrature_variance();
            assert!((v - trace.var_x[k]).abs() < 1e-10, "{frame:?} t={t}");
        }
    }
}

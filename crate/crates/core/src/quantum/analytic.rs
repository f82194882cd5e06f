use num_complex::Complex64 as C64;

use super::space::{HilbertSpace, Qubit, SystemParams};
use super::state::{coherent_amplitudes, coherent_excited_state, StateVector};
use crate::error::{Error, Result};

/// Closed-form field branches of the undriven resonant evolution of `|e⟩|α⟩`
/// in the frame rotating with the free Hamiltonian:
/// `|Ψ_e⟩ = Σ cₙ cos(gt√(n+1)) |n⟩`, `|Ψ_g⟩ = -i Σ cₙ₋₁ sin(gt√n) |n⟩`.
///
/// Returns `(Ψ_e, Ψ_g)` as Fock amplitudes on `0..=n_max`, built from the
/// normalized truncated coherent amplitudes.
pub fn analytic_branches(alpha: C64, t: f64, n_max: usize) -> (Vec<C64>, Vec<C64>) {
    let mut c = coherent_amplitudes(alpha, n_max);
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|x| *x /= norm);
    let psi_e = (0..=n_max).map(|n| c[n] * (t * ((n + 1) as f64).sqrt()).cos()).collect();
    let psi_g = (0..=n_max)
        .map(|n| if n == 0 { C64::new(0.0, 0.0) } else { C64::new(0.0, -1.0) * c[n - 1] * (t * (n as f64).sqrt()).sin() })
        .collect();
    (psi_e, psi_g)
}

/// Lab-frame state at time `gt = t` for the undriven resonant model started
/// in `|e⟩|α⟩`: the closed-form branches with the free phases
/// `exp(-i(ω n ± ω₀/2) t)` restored.
pub fn analytic_jc_evolution(alpha: C64, t: f64, params: &SystemParams, space: HilbertSpace) -> Result<StateVector> {
    if !params.is_resonant() {
        return Err(Error::Unsupported(format!(
            "closed-form evolution needs omega0 == omega, got {} vs {}",
            params.omega0_over_g, params.omega_over_g
        )));
    }
    // validates the cutoff against the Poisson tail
    coherent_excited_state(alpha, space)?;
    let (psi_e, psi_g) = analytic_branches(alpha, t, space.n_max());
    let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
    let (w, w0) = (params.omega_over_g, params.omega0_over_g);
    for n in 0..=space.n_max() {
        let nf = n as f64;
        amps[space.index(Qubit::Excited, n)] = psi_e[n] * C64::from_polar(1.0, -(w * nf + 0.5 * w0) * t);
        amps[space.index(Qubit::Ground, n)] = psi_g[n] * C64::from_polar(1.0, -(w * nf - 0.5 * w0) * t);
    }
    Ok(StateVector::from_vec_unchecked(space, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::build_space;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_rabi_half_and_full_period() {
        let space = build_space(4).unwrap();
        let params = SystemParams::default().with_n_max(4);
        let zero = C64::new(0.0, 0.0);
        let half = analytic_jc_evolution(zero, PI / 2.0, &params, space).unwrap();
        assert!(half.excited_population() < 1e-30);
        assert!((half.amplitude(Qubit::Ground, 1).norm() - 1.0).abs() < 1e-15);
        let full = analytic_jc_evolution(zero, PI, &params, space).unwrap();
        assert!((full.fidelity(&StateVector::basis(space, Qubit::Excited, 0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_norm() {
        let space = build_space(80).unwrap();
        let params = SystemParams::default();
        for t in [0.0, 0.3, 1.0, 4.7, 10.0] {
            let s = analytic_jc_evolution(C64::new(6f64.sqrt(), 0.0), t, &params, space).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn off_resonance_rejected() {
        let space = build_space(10).unwrap();
        let params = SystemParams::new(100.0, 99.0, 100.0, 10).unwrap();
        let r = analytic_jc_evolution(C64::new(1.0, 0.0), 1.0, &params, space);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quantum::{analytic_branches, coherent_amplitudes, required_cutoff};

/// Regression floor for the excited-branch overlap at `α = √20`, `gt = 1`
/// (measured 0.999988756).
pub const BRANCH_OVERLAP_FLOOR: f64 = 0.99998;

/// Poisson tail discarded when choosing the Fock cutoff for the branches.
const BRANCH_TAIL: f64 = 1e-14;

/// Field states whose interference builds the atomic branches of the
/// resonant evolution of `|e⟩|α⟩`, with the square-root phases expanded to
/// third order around the mean photon number.
///
/// `½(ψ₊ + ψ₋)` approximates the excited-state branch. `½(φ₊ + φ₋)` equals
/// `i` times the ground-state branch, a global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchStates {
    pub alpha: f64,
    pub t: f64,
    pub psi_plus: Vec<C64>,
    pub psi_minus: Vec<C64>,
    pub phi_plus: Vec<C64>,
    pub phi_minus: Vec<C64>,
}

/// `√m` expanded to third order in `x/√m` around `m`.
fn expanded_root(m: f64, x: f64) -> f64 {
    m.sqrt() + x / (2.0 * m.sqrt()) - x * x / (8.0 * m.powf(1.5)) + x.powi(3) / (16.0 * m.powf(2.5))
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= n);
    v
}

fn normalized_coherent(alpha: f64, n_max: usize) -> Vec<C64> {
    normalize(coherent_amplitudes(C64::new(alpha, 0.0), n_max))
}

/// Branch states at `gt = t` for real `alpha`.
pub fn approximate_branch_states(alpha: f64, t: f64) -> Result<BranchStates> {
    if !alpha.is_finite() || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite alpha {alpha} or t {t}")));
    }
    let nbar = alpha * alpha;
    let n_max = branch_cutoff(alpha);
    let c = normalized_coherent(alpha, n_max);
    let zero = C64::new(0.0, 0.0);
    let mut psi_plus = Vec::with_capacity(n_max + 1);
    let mut psi_minus = Vec::with_capacity(n_max + 1);
    let mut phi_plus = vec![zero; n_max + 1];
    let mut phi_minus = vec![zero; n_max + 1];
    for n in 0..=n_max {
        let x = n as f64 - nbar;
        let up = t * expanded_root(nbar + 1.0, x);
        psi_plus.push(c[n] * C64::from_polar(1.0, up));
        psi_minus.push(c[n] * C64::from_polar(1.0, -up));
        if n > 0 && nbar > 0.0 {
            let down = t * expanded_root(nbar, x);
            phi_plus[n] = C64::new(0.0, -1.0) * c[n - 1] * C64::from_polar(1.0, down);
            phi_minus[n] = C64::new(0.0, 1.0) * c[n - 1] * C64::from_polar(1.0, -down);
        }
    }
    let phi = |v: Vec<C64>| if nbar > 0.0 { normalize(v) } else { v };
    Ok(BranchStates {
        alpha,
        t,
        psi_plus: normalize(psi_plus),
        psi_minus: normalize(psi_minus),
        phi_plus: phi(phi_plus),
        phi_minus: phi(phi_minus),
    })
}

/// Fock cutoff used for real amplitude `alpha`.
pub fn branch_cutoff(alpha: f64) -> usize {
    required_cutoff(alpha * alpha, BRANCH_TAIL).max(4)
}

impl BranchStates {
    pub fn n_max(&self) -> usize {
        self.psi_plus.len() - 1
    }

    /// `½(ψ₊ + ψ₋)`.
    pub fn excited_reconstruction(&self) -> Vec<C64> {
        self.psi_plus.iter().zip(&self.psi_minus).map(|(a, b)| (a + b) * 0.5).collect()
    }

    /// `½(φ₊ + φ₋)`.
    pub fn ground_reconstruction(&self) -> Vec<C64> {
        self.phi_plus.iter().zip(&self.phi_minus).map(|(a, b)| (a + b) * 0.5).collect()
    }

    /// `⟨α|ψ₊⟩` and `⟨α|ψ₋⟩`.
    pub fn coherent_overlaps(&self) -> (C64, C64) {
        let c = normalized_coherent(self.alpha, self.n_max());
        (inner(&c, &self.psi_plus), inner(&c, &self.psi_minus))
    }

    /// Normalized overlap of the reconstruction with the exact excited branch.
    pub fn excited_overlap(&self) -> f64 {
        let (exact, _) = analytic_branches(C64::new(self.alpha, 0.0), self.t, self.n_max());
        normalized_overlap(&exact, &self.excited_reconstruction())
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn normalized_overlap(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr() / (inner(a, a).re * inner(b, b).re)
}

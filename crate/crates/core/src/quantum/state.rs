use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::space::{HilbertSpace, Qubit};
use crate::error::{Error, Result};

/// Poisson tail allowed beyond the cutoff when preparing a coherent state.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-8;
/// Population allowed in the top tenth of the Fock ladder during evolution.
pub const TAIL_WEIGHT_LIMIT: f64 = 1e-6;
const NORM_TOLERANCE: f64 = 1e-6;

/// Pure state on the qubit ⊗ Fock product space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn from_amplitudes(space: HilbertSpace, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::InvalidArgument(format!("expected {} amplitudes, got {}", space.dim(), amplitudes.len())));
        }
        Ok(Self { space, amplitudes })
    }

    pub(crate) fn from_vec_unchecked(space: HilbertSpace, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        Self { space, amplitudes: Array1::from_vec(amplitudes) }
    }

    /// The basis state `|s, n⟩`.
    pub fn basis(space: HilbertSpace, s: Qubit, n: usize) -> Self {
        let mut amplitudes = Array1::zeros(space.dim());
        amplitudes[space.index(s, n)] = C64::new(1.0, 0.0);
        Self { space, amplitudes }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn as_slice(&self) -> &[C64] {
        self.amplitudes.as_slice().expect("state amplitudes are contiguous")
    }

    pub fn amplitude(&self, s: Qubit, n: usize) -> C64 {
        self.amplitudes[self.space.index(s, n)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize a state of norm {norm}")));
        }
        self.amplitudes.mapv_inplace(|c| c / norm);
        Ok(self)
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("state norm {norm} is not 1")));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.space, other.space, "states live on different spaces");
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn population(&self, s: Qubit) -> f64 {
        (0..=self.space.n_max()).map(|n| self.amplitude(s, n).norm_sqr()).sum()
    }

    pub fn excited_population(&self) -> f64 {
        self.population(Qubit::Excited)
    }

    /// Photon-number distribution with the qubit traced out.
    pub fn photon_distribution(&self) -> Vec<f64> {
        (0..=self.space.n_max())
            .map(|n| self.amplitude(Qubit::Ground, n).norm_sqr() + self.amplitude(Qubit::Excited, n).norm_sqr())
            .collect()
    }

    /// `⟨a†a + σ₊σ₋⟩`, conserved by the undriven Jaynes-Cummings evolution.
    pub fn mean_excitation(&self) -> f64 {
        self.field_moments().number + self.excited_population()
    }

    /// Total population in the top tenth of the Fock levels.
    pub fn tail_weight(&self) -> f64 {
        let dist = self.photon_distribution();
        let top = tail_levels(self.space.n_max());
        dist[dist.len() - top..].iter().sum()
    }

    pub fn check_truncation(&self) -> Result<()> {
        let tail = self.tail_weight();
        if tail >= TAIL_WEIGHT_LIMIT {
            let n_max = self.space.n_max();
            return Err(Error::CutoffTooSmall {
                n_max,
                required: n_max + n_max / 2 + 10,
                detail: format!("tail weight {tail:.3e} in the top Fock levels"),
            });
        }
        Ok(())
    }

    pub fn field_moments(&self) -> FieldMoments {
        FieldMoments::of(self.as_slice())
    }

    pub fn partial_trace_qubit(&self) -> FieldDensityMatrix {
        partial_trace_qubit(self)
    }
}

/// Number of Fock levels counted as the "top tenth" for the truncation check.
pub fn tail_levels(n_max: usize) -> usize {
    (n_max + 1).div_ceil(10).max(1)
}

/// First and second moments of the field mode needed for quadrature variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    /// `⟨a⟩`
    pub a: C64,
    /// `⟨a²⟩`
    pub a2: C64,
    /// `⟨a†a⟩`
    pub number: f64,
}

impl FieldMoments {
    /// Moments of an interleaved qubit ⊗ Fock amplitude slice.
    pub fn of(psi: &[C64]) -> Self {
        let levels = psi.len() / 2;
        let mut a = C64::new(0.0, 0.0);
        let mut a2 = C64::new(0.0, 0.0);
        let mut number = 0.0;
        for n in 0..levels {
            let (g, e) = (psi[2 * n], psi[2 * n + 1]);
            number += n as f64 * (g.norm_sqr() + e.norm_sqr());
            if n + 1 < levels {
                let s = ((n + 1) as f64).sqrt();
                a += (g.conj() * psi[2 * n + 2] + e.conj() * psi[2 * n + 3]) * s;
            }
            if n + 2 < levels {
                let s = (((n + 1) * (n + 2)) as f64).sqrt();
                a2 += (g.conj() * psi[2 * n + 4] + e.conj() * psi[2 * n + 5]) * s;
            }
        }
        Self { a, a2, number }
    }

    /// Variance of `X_θ = (a e^{-iθ} + a† e^{iθ})/2`; `θ = 0` gives `X = (a + a†)/2`.
    pub fn quadrature_variance_at(&self, theta: f64) -> f64 {
        let rot = C64::from_polar(1.0, -theta);
        let mean = (self.a * rot).re;
        let second = 0.25 * (2.0 * (self.a2 * rot * rot).re + 2.0 * self.number + 1.0);
        (second - mean * mean).max(0.0)
    }

    pub fn quadrature_variance(&self) -> f64 {
        self.quadrature_variance_at(0.0)
    }
}

/// `ΔX² = ⟨X²⟩ - ⟨X⟩²` with `X = (a + a†)/2`; shot noise is 0.25.
pub fn quadrature_variance(state: &StateVector) -> Result<f64> {
    state.check_normalized()?;
    Ok(state.field_moments().quadrature_variance())
}

/// `|e⟩|α⟩` truncated at the cutoff of `space` and renormalized.
pub fn coherent_excited_state(alpha: C64, space: HilbertSpace) -> Result<StateVector> {
    let mean = alpha.norm_sqr();
    let n_max = space.n_max();
    let tail = poisson_tail(mean, n_max);
    if tail >= COHERENT_TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            n_max,
            required: required_cutoff(mean, COHERENT_TAIL_LIMIT),
            detail: format!("coherent state |α|²={mean:.4} leaks {tail:.3e} beyond the cutoff"),
        });
    }
    let mut amps = Array1::zeros(space.dim());
    for (n, c) in coherent_amplitudes(alpha, n_max).into_iter().enumerate() {
        amps[space.index(Qubit::Excited, n)] = c;
    }
    StateVector { space, amplitudes: amps }.normalized()
}

/// `e^{-|α|²/2} αⁿ/√n!` for `n = 0..=n_max`, evaluated in log space.
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let r = alpha.norm();
    let phase = alpha.arg();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut log_mag = -0.5 * r * r;
    for n in 0..=n_max {
        if n > 0 {
            if r == 0.0 {
                out.push(C64::new(0.0, 0.0));
                continue;
            }
            log_mag += r.ln() - 0.5 * (n as f64).ln();
        }
        out.push(C64::from_polar(log_mag.exp(), n as f64 * phase));
    }
    out
}

/// `P(N > n_max)` for `N ~ Poisson(mean)`, summed term by term above the cutoff.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut log_p = -mean;
    for k in 1..=n_max + 1 {
        log_p += mean.ln() - (k as f64).ln();
    }
    let mut total = 0.0;
    let mut k = n_max + 1;
    loop {
        let term = log_p.exp();
        total += term;
        if (k as f64) > mean && term < total * 1e-17 {
            break;
        }
        k += 1;
        log_p += mean.ln() - (k as f64).ln();
    }
    total
}

/// Smallest cutoff whose Poisson tail is below `limit`.
pub fn required_cutoff(mean: f64, limit: f64) -> usize {
    (1..).find(|&n| poisson_tail(mean, n) < limit).expect("Poisson tail vanishes")
}

/// Reduced density matrix of the field, `Tr_qubit |ψ⟩⟨ψ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDensityMatrix {
    rho: Array2<C64>,
}

impl FieldDensityMatrix {
    pub fn from_matrix(rho: Array2<C64>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidArgument("density matrix must be square".into()));
        }
        let trace: C64 = rho.diag().sum();
        if (trace.re - 1.0).abs() > NORM_TOLERANCE || trace.im.abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("density matrix trace {trace} is not 1")));
        }
        Ok(Self { rho })
    }

    /// Incoherent mixture of Fock states with the given weights.
    pub fn fock_mixture(weights: &[f64]) -> Result<Self> {
        let mut rho = Array2::zeros((weights.len(), weights.len()));
        for (n, &w) in weights.iter().enumerate() {
            rho[[n, n]] = C64::new(w, 0.0);
        }
        Self::from_matrix(rho)
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.rho
    }

    pub fn fock_dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.rho.diag().sum()
    }

    /// `e^{iθN} ρ e^{-iθN}`: `⟨a⟩` picks up `e^{iθ}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let mut rho = self.rho.clone();
        for ((m, n), v) in rho.indexed_iter_mut() {
            *v *= C64::from_polar(1.0, theta * (m as f64 - n as f64));
        }
        Self { rho }
    }

    pub fn field_moments(&self) -> FieldMoments {
        let d = self.fock_dim();
        let mut m = FieldMoments { a: C64::new(0.0, 0.0), a2: C64::new(0.0, 0.0), number: 0.0 };
        for n in 0..d {
            m.number += n as f64 * self.rho[[n, n]].re;
            if n + 1 < d {
                m.a += self.rho[[n + 1, n]] * ((n + 1) as f64).sqrt();
            }
            if n + 2 < d {
                m.a2 += self.rho[[n + 2, n]] * (((n + 1) * (n + 2)) as f64).sqrt();
            }
        }
        m
    }
}

pub fn partial_trace_qubit(state: &StateVector) -> FieldDensityMatrix {
    let space = state.space();
    let d = space.fock_dim();
    let mut rho = Array2::zeros((d, d));
    for s in [Qubit::Ground, Qubit::Excited] {
        for n in 0..d {
            let an = state.amplitude(s, n);
            if an == C64::new(0.0, 0.0) {
                continue;
            }
            for m in 0..d {
                rho[[n, m]] += an * state.amplitude(s, m).conj();
            }
        }
    }
    FieldDensityMatrix { rho }
}

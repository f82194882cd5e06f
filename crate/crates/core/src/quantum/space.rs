use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensionless model parameters. Frequencies are ratios to the coupling
/// `g`, which sets the unit of time (`gt`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_over_g: f64,
    pub omega0_over_g: f64,
    pub omegap_over_g: f64,
    pub n_max: usize,
}

impl SystemParams {
    pub const DEFAULT_FREQUENCY: f64 = 100.0;
    pub const DEFAULT_N_MAX: usize = 80;

    /// Field, two-level system and pulse carrier all at `omega_over_g`.
    pub fn resonant(omega_over_g: f64, n_max: usize) -> Result<Self> {
        Self::new(omega_over_g, omega_over_g, omega_over_g, n_max)
    }

    pub fn new(omega_over_g: f64, omega0_over_g: f64, omegap_over_g: f64, n_max: usize) -> Result<Self> {
        let p = Self { omega_over_g, omega0_over_g, omegap_over_g, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_over_g.is_finite() && self.omega_over_g > 0.0) {
            return Err(Error::InvalidArgument(format!("omega_over_g must be positive, got {}", self.omega_over_g)));
        }
        if !self.omega0_over_g.is_finite() || !self.omegap_over_g.is_finite() {
            return Err(Error::InvalidArgument("frequencies must be finite".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidArgument(format!("n_max must be >= 1, got {}", self.n_max)));
        }
        Ok(())
    }

    /// Detuning between the two-level system and the field, `(ω₀ - ω)/g`.
    pub fn detuning(&self) -> f64 {
        self.omega0_over_g - self.omega_over_g
    }

    pub fn is_resonant(&self) -> bool {
        self.detuning() == 0.0
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega_over_g: Self::DEFAULT_FREQUENCY,
            omega0_over_g: Self::DEFAULT_FREQUENCY,
            omegap_over_g: Self::DEFAULT_FREQUENCY,
            n_max: Self::DEFAULT_N_MAX,
        }
    }
}

/// Two-level system basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    fn offset(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }
}

/// Product space of the two-level system and a Fock space truncated at
/// `n_max`. Basis states are interleaved: `|g,n⟩ -> 2n`, `|e,n⟩ -> 2n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of retained Fock levels, `n_max + 1`.
    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Flat index of `|s, n⟩`. Panics if `n > n_max`.
    pub fn index(&self, s: Qubit, n: usize) -> usize {
        assert!(n <= self.n_max, "Fock level {n} above cutoff {}", self.n_max);
        2 * n + s.offset()
    }

    pub fn level(&self, index: usize) -> (Qubit, usize) {
        assert!(index < self.dim(), "index {index} out of range");
        let s = if index & 1 == 0 { Qubit::Ground } else { Qubit::Excited };
        (s, index / 2)
    }
}

pub fn build_space(n_max: usize) -> Result<HilbertSpace> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 1, got {n_max}")));
    }
    Ok(HilbertSpace { n_max })
}

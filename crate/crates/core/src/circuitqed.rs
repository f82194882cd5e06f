//! Lumped-element fluxonium coupled capacitively to an LC resonator, reduced
//! to the dimensionless Jaynes-Cummings parameters.
//!
//! With `C_Σ = C_J + C_g`, the weak-coupling circuit Hamiltonian contains
//! `(4e² C_c / (C_Σ C_r)) N_F N_r`. Substituting
//! `N = (i/2)(E_L/2E_C)^{1/4}(b† - b)` for both modes and using
//! `E_L/2E_C = ħ²/(4e⁴Z²)` gives
//!
//! ```text
//! g = C_c / (2 C_r C_Σ) · 1/√(Z_r Z),   Z_r = √(L_r/C_r),   Z = √(L_J/C_Σ)
//! ```
//!
//! in rad/s. The mode frequencies are `ω₀ = √(8E_L E_C)/ħ = 1/√(L_J C_Σ)` and
//! `ω = √(8E_Lr E_Cr)/ħ = 1/√(L_r C_r)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::SystemParams;

/// Elementary charge in coulomb (CODATA 2018, exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Planck constant in J·s (CODATA 2018, exact).
pub const PLANCK: f64 = 6.62607015e-34;
/// `h/2π` in J·s.
pub const HBAR: f64 = 1.05457181765e-34;
/// Reduced flux quantum `ħ/2e` in Wb.
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);

/// Largest `C_c/C_r` and `C_c/C_g` accepted by the weak-coupling reduction.
pub const MAX_COUPLING_RATIO: f64 = 0.05;
/// `g/ω` at or above which the rotating-wave model is flagged.
pub const STRONG_COUPLING_RATIO: f64 = 0.1;

/// Circuit elements in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub c_j: f64,
    pub c_g: f64,
    pub c_c: f64,
    pub c_r: f64,
    pub l_j: f64,
    pub l_r: f64,
    /// Josephson energy in joule. Carried for reporting only.
    pub e_j: f64,
    pub flux_frustration: f64,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let named = [("C_J", self.c_j), ("C_g", self.c_g), ("C_c", self.c_c), ("C_r", self.c_r), ("L_J", self.l_j), ("L_r", self.l_r)];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.e_j.is_finite() || self.e_j < 0.0 || !self.flux_frustration.is_finite() {
            return Err(Error::InvalidArgument("E_J must be non-negative and f finite".into()));
        }
        for (name, r) in [("C_c/C_r", self.c_c / self.c_r), ("C_c/C_g", self.c_c / self.c_g)] {
            if r > MAX_COUPLING_RATIO {
                return Err(Error::Regime(format!("{name} = {r:.4} exceeds {MAX_COUPLING_RATIO}")));
            }
        }
        Ok(())
    }

    /// All capacitances scaled by `c` and inductances by `l`.
    pub fn scaled(&self, c: f64, l: f64) -> Self {
        Self { c_j: self.c_j * c, c_g: self.c_g * c, c_c: self.c_c * c, c_r: self.c_r * c, l_j: self.l_j * l, l_r: self.l_r * l, ..*self }
    }

    fn c_sigma(&self) -> f64 {
        self.c_j + self.c_g
    }
}

/// Charging and inductive energies in joule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitEnergies {
    pub e_c: f64,
    pub e_l: f64,
    pub e_cr: f64,
    pub e_lr: f64,
}

impl CircuitEnergies {
    /// The same energies as `E/h` in GHz.
    pub fn in_ghz(&self) -> Self {
        let f = |e: f64| joule_to_ghz(e);
        Self { e_c: f(self.e_c), e_l: f(self.e_l), e_cr: f(self.e_cr), e_lr: f(self.e_lr) }
    }
}

pub fn joule_to_ghz(e: f64) -> f64 {
    e / PLANCK * 1e-9
}

pub fn derive_energies(cp: &CircuitParams) -> Result<CircuitEnergies> {
    cp.validate()?;
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
    let phi2 = REDUCED_FLUX_QUANTUM * REDUCED_FLUX_QUANTUM;
    Ok(CircuitEnergies { e_c: e2 / (2.0 * cp.c_sigma()), e_l: phi2 / cp.l_j, e_cr: e2 / (2.0 * cp.c_r), e_lr: phi2 / cp.l_r })
}

/// Physical frequencies (rad/s) and the resulting dimensionless model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMapping {
    pub energies: CircuitEnergies,
    pub omega0: f64,
    pub omega: f64,
    pub g: f64,
    /// Fluxonium and resonator impedances in ohm.
    pub z: f64,
    pub z_r: f64,
    /// Carrier set to the qubit frequency.
    pub system: SystemParams,
    /// `C_c/C_r`, the suppression of the direct resonator drive.
    pub suppression_ratio: f64,
    pub strong_coupling: bool,
    pub warnings: Vec<String>,
}

pub fn map_to_system(cp: &CircuitParams) -> Result<CircuitMapping> {
    let energies = derive_energies(cp)?;
    let omega0 = (8.0 * energies.e_l * energies.e_c).sqrt() / HBAR;
    let omega = (8.0 * energies.e_lr * energies.e_cr).sqrt() / HBAR;
    let z = (cp.l_j / cp.c_sigma()).sqrt();
    let z_r = (cp.l_r / cp.c_r).sqrt();
    let g = coupling_rate(cp);
    let system = SystemParams::new(omega / g, omega0 / g, omega0 / g, SystemParams::DEFAULT_N_MAX)?;
    let strong_coupling = g >= STRONG_COUPLING_RATIO * omega;
    let mut warnings = Vec::new();
    if strong_coupling {
        warnings.push(format!("g/omega = {:.4} is not small; the rotating-wave model is unreliable", g / omega));
    }
    Ok(CircuitMapping { energies, omega0, omega, g, z, z_r, system, suppression_ratio: cp.c_c / cp.c_r, strong_coupling, warnings })
}

/// `g` in rad/s.
pub fn coupling_rate(cp: &CircuitParams) -> f64 {
    let z = (cp.l_j / cp.c_sigma()).sqrt();
    let z_r = (cp.l_r / cp.c_r).sqrt();
    cp.c_c / (2.0 * cp.c_r * cp.c_sigma()) / (z * z_r).sqrt()
}

/// Protocol duration against the coherence times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// Seconds needed to reach `gt`.
    pub t_protocol: f64,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    /// `t_protocol < min(T₁, T₂)` over the supplied times; true when none are given.
    pub feasible: bool,
}

/// Wall-clock duration of `gt` for coupling `g` (rad/s), checked against
/// optional `T₁`, `T₂` in seconds.
pub fn feasibility(g: f64, gt: f64, t1: Option<f64>, t2: Option<f64>) -> Result<Feasibility> {
    if !(g.is_finite() && g > 0.0 && gt.is_finite() && gt >= 0.0) {
        return Err(Error::InvalidArgument(format!("need g > 0 and gt >= 0, got g={g}, gt={gt}")));
    }
    let t_protocol = gt / g;
    let limit = [t1, t2].into_iter().flatten().fold(f64::INFINITY, f64::min);
    Ok(Feasibility { t_protocol, t1, t2, feasible: t_protocol < limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> CircuitParams {
        CircuitParams {
            c_j: 5e-15,
            c_g: 40e-15,
            c_c: 1e-15,
            c_r: 100e-15,
            l_j: 300e-9,
            l_r: 20e-9,
            e_j: 4.0e9 * PLANCK,
            flux_frustration: 0.5,
        }
    }

    #[test]
    fn flux_quantum_matches_codata() {
        assert!((REDUCED_FLUX_QUANTUM / 3.29105976e-16 - 1.0).abs() < 1e-8);
        assert!((HBAR * 2.0 * std::f64::consts::PI / PLANCK - 1.0).abs() < 1e-11);
    }

    #[test]
    fn resonator_charging_energy() {
        let e = derive_energies(&sample()).unwrap().in_ghz();
        assert!((e.e_cr - 0.19370).abs() < 1e-4, "{}", e.e_cr);
    }

    #[test]
    fn frequencies_are_lc_resonances() {
        let cp = sample();
        let m = map_to_system(&cp).unwrap();
        assert!((m.omega * (cp.l_r * cp.c_r).sqrt() - 1.0).abs() < 1e-12);
        assert!((m.omega0 * (cp.l_j * (cp.c_j + cp.c_g)).sqrt() - 1.0).abs() < 1e-12);
        assert!((m.suppression_ratio - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn ratio_limits() {
        let mut cp = sample();
        cp.c_c = 6e-15;
        assert!(matches!(derive_energies(&cp), Err(Error::Regime(m)) if m.contains("C_c/C_r")));
        cp.c_c = 1e-15;
        cp.c_g = 10e-15;
        assert!(matches!(derive_energies(&cp), Err(Error::Regime(m)) if m.contains("C_c/C_g")));
        cp.c_g = -1.0;
        assert!(matches!(derive_energies(&cp), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn feasibility_flag() {
        let f = feasibility(1e7, 10.0, Some(40e-6), Some(10e-6)).unwrap();
        assert!((f.t_protocol - 1e-6).abs() < 1e-18 && f.feasible);
        assert!(!feasibility(1e5, 10.0, None, Some(10e-6)).unwrap().feasible);
        assert!(feasibility(1.0, 10.0, None, None).unwrap().feasible);
    }
}

//! Gaussian pulse trains driving the two-level system through `σ_x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pulses sharing one width, amplitude and carrier:
/// `Ω(t) = Σᵢ Ω₀ exp(-(t - tᵢ)²/2σ²) cos(ω_p t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTrain {
    /// Center times in insertion order.
    pub centers: Vec<f64>,
    #[serde(rename = "g_sigma")]
    pub sigma: f64,
    pub omega0_amp: f64,
    #[serde(rename = "omega_p")]
    pub omegap: f64,
    pub window: (f64, f64),
}

impl PulseTrain {
    pub fn new(centers: Vec<f64>, sigma: f64, omega0_amp: f64, omegap: f64, window: (f64, f64)) -> Result<Self> {
        let train = Self { centers, sigma, omega0_amp, omegap, window };
        train.validate()?;
        Ok(train)
    }

    /// A train with no pulses yet.
    pub fn empty(sigma: f64, omega0_amp: f64, omegap: f64, window: (f64, f64)) -> Result<Self> {
        Self::new(Vec::new(), sigma, omega0_amp, omegap, window)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("pulse width must be positive, got {}", self.sigma)));
        }
        if !self.omega0_amp.is_finite() || !self.omegap.is_finite() {
            return Err(Error::InvalidArgument("pulse amplitude and carrier must be finite".into()));
        }
        let (a, b) = self.window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("invalid pulse window [{a}, {b}]")));
        }
        if let Some(t) = self.centers.iter().find(|&&t| !(t >= a && t <= b)) {
            return Err(Error::InvalidArgument(format!("pulse center {t} outside window [{a}, {b}]")));
        }
        Ok(())
    }

    /// Same pulse shape with different centers.
    pub fn with_centers(&self, centers: Vec<f64>) -> Result<Self> {
        Self::new(centers, self.sigma, self.omega0_amp, self.omegap, self.window)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn sorted_centers(&self) -> Vec<f64> {
        let mut c = self.centers.clone();
        c.sort_by(f64::total_cmp);
        c
    }

    /// Sum of the Gaussian envelopes at `t`, without the carrier.
    pub fn envelope(&self, t: f64) -> f64 {
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        self.centers
            .iter()
            .map(|&c| {
                let d = t - c;
                (-d * d * inv).exp()
            })
            .sum::<f64>()
            * self.omega0_amp
    }

    pub fn drive_amplitude(&self, t: f64) -> f64 {
        drive_amplitude(self, t)
    }
}

pub fn drive_amplitude(train: &PulseTrain, t: f64) -> f64 {
    train.envelope(t) * (train.omegap * t).cos()
}

/// Amplitude for which one pulse inverts an isolated resonant two-level
/// system in the rotating-wave picture: `Ω₀ σ √(2π) = π`.
pub fn calibrate_pi_amplitude(sigma: f64, _omegap: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("pulse width must be positive, got {sigma}")));
    }
    Ok((std::f64::consts::PI / 2.0).sqrt() / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn train(centers: Vec<f64>) -> PulseTrain {
        PulseTrain::new(centers, 0.05, 25.0, 100.0, (0.0, 10.0)).unwrap()
    }

    #[test]
    fn peak_value() {
        // ω_p t = 2π·50 at t = π
        let t = PI;
        let p = train(vec![t]);
        assert!((p.drive_amplitude(t) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn five_sigma_envelope() {
        let p = train(vec![3.0]);
        let ratio = p.envelope(3.0 + 5.0 * 0.05) / 25.0;
        assert!((ratio - (-12.5f64).exp()).abs() < 1e-18);
        assert!((ratio - 3.73e-6).abs() < 1e-8);
    }

    #[test]
    fn separated_pulses_add() {
        let one = train(vec![2.0]);
        let two = train(vec![2.0, 7.0]);
        for t in [1.9, 2.0, 2.05, 2.2] {
            assert!((one.drive_amplitude(t) - two.drive_amplitude(t)).abs() < 1e-6 * 25.0);
        }
    }

    #[test]
    fn calibration() {
        let w = calibrate_pi_amplitude(0.05, 100.0).unwrap();
        assert!((w - 25.066_282_746_310_005).abs() < 1e-9);
        assert!((calibrate_pi_amplitude(0.1, 100.0).unwrap() * 2.0 - w).abs() < 1e-12);
        assert!(calibrate_pi_amplitude(0.0, 100.0).is_err());
        assert!(calibrate_pi_amplitude(-1.0, 100.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(PulseTrain::new(vec![11.0], 0.05, 1.0, 100.0, (0.0, 10.0)).is_err());
        assert!(PulseTrain::new(vec![1.0], 0.0, 1.0, 100.0, (0.0, 10.0)).is_err());
        assert!(PulseTrain::new(vec![], 0.1, 1.0, 100.0, (3.0, 3.0)).is_err());
        let p = train(vec![5.0, 1.0, 3.0]);
        assert_eq!(p.centers, vec![5.0, 1.0, 3.0]);
        assert_eq!(p.sorted_centers(), vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn json_layout() {
        let p = train(vec![1.0, 2.5]);
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v["g_sigma"], 0.05);
        assert_eq!(v["omega_p"], 100.0);
        assert_eq!(v["window"], serde_json::json!([0.0, 10.0]));
        let back: PulseTrain = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn amplitude_bounded(centers in proptest::collection::vec(0.0f64..10.0, 0..20), t in -1.0f64..11.0) {
            let p = train(centers);
            prop_assert!(p.drive_amplitude(t).abs() <= p.len() as f64 * p.omega0_amp + 1e-12);
        }

        #[test]
        fn envelope_shift_covariance(centers in proptest::collection::vec(1.0f64..9.0, 1..10), t in 0.0f64..10.0, d in -1.0f64..1.0) {
            let p = train(centers.clone());
            let q = train(centers.iter().map(|c| c + d).collect());
            prop_assert!((p.envelope(t) - q.envelope(t + d)).abs() <= 1e-9 * p.omega0_amp);
        }
    }
}

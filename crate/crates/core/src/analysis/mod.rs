//! Reporting quantities: squeezing reduction, Wigner functions and the
//! large-amplitude branch-state decomposition.

mod branches;
mod wigner;

use crate::quantum::SHOT_NOISE;

pub use branches::{approximate_branch_states, branch_cutoff, inner, normalized_overlap, BranchStates, BRANCH_OVERLAP_FLOOR};
pub use wigner::{wigner, wigner_with, WignerConvention, WignerGrid};

/// `R% = (1/4 - ΔX²) / (1/4) · 100`. Negative for anti-squeezed states.
pub fn reduction_percent(var_x: f64) -> f64 {
    (SHOT_NOISE - var_x) / SHOT_NOISE * 100.0
}

/// Inverse of [`reduction_percent`].
pub fn variance_from_reduction(percent: f64) -> f64 {
    SHOT_NOISE * (1.0 - percent / 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_fixed_points() {
        assert_eq!(reduction_percent(0.25), 0.0);
        assert_eq!(reduction_percent(0.0), 100.0);
        assert!((reduction_percent(0.028175) - 88.73).abs() < 1e-10);
        assert!(reduction_percent(0.3) < 0.0);
    }

    proptest::proptest! {
        #[test]
        fn reduction_round_trip(v in 0.0f64..2.0, dv in 1e-9f64..1.0) {
            proptest::prop_assert!((variance_from_reduction(reduction_percent(v)) - v).abs() < 1e-12);
            proptest::prop_assert!(reduction_percent(v + dv) < reduction_percent(v));
        }
    }
}

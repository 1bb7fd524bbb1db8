// SPDX-License-Identifier: Apache-2.0

//! Scalar diagnostics of a multi-mode state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::Accumulator;
use crate::dynamics::DiagonalModeState;
use crate::error::{QuenchError, Result};

/// Scalar summary of the chain at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub h0: f64,
    pub defect_density: f64,
    pub sz: f64,
    pub mean_purity: f64,
    /// Modes whose populations were clamped from round-off negatives.
    pub clamp_count: usize,
}

fn require_states(states: &[DiagonalModeState]) -> Result<()> {
    if states.is_empty() {
        return Err(QuenchError::input("empty mode list"));
    }
    Ok(())
}

/// Mean excitation probability over all `N` momenta, `(2/N) Σ_{k>0} d22(k)`.
pub fn defect_density(states: &[DiagonalModeState]) -> Result<f64> {
    require_states(states)?;
    let mut acc = Accumulator::default();
    for s in states {
        acc.add(Complex64::new(s.d22, 0.0));
    }
    Ok(acc.value().re / states.len() as f64)
}

/// Average of `Tr ρ_k²` over the modes.
pub fn mean_purity(states: &[DiagonalModeState]) -> Result<f64> {
    require_states(states)?;
    let mut acc = Accumulator::default();
    for s in states {
        acc.add(Complex64::new(s.purity(), 0.0));
    }
    Ok(acc.value().re / states.len() as f64)
}

/// Number of modes flagged as clamped.
pub fn clamp_count(states: &[DiagonalModeState]) -> usize {
    states.iter().filter(|s| s.clamped).count()
}

/// Asymptotic excitation probability `exp(-4π sin²k τ)` of an infinitely long ramp.
pub fn landau_zener_reference(k: f64, tau: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(QuenchError::input(format!("tau must be non-negative, got {tau}")));
    }
    let s = k.sin();
    Ok((-4.0 * std::f64::consts::PI * s * s * tau).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn states(d22: &[f64]) -> Vec<DiagonalModeState> {
        d22.iter()
            .enumerate()
            .map(|(j, &p)| DiagonalModeState::new(0.1 * j as f64, 0.0, p, Complex64::new(0.0, 0.0)))
            .collect()
    }

    #[test]
    fn defect_density_limits() {
        assert_eq!(defect_density(&states(&[0.0; 5])).unwrap(), 0.0);
        assert_eq!(defect_density(&states(&[1.0; 5])).unwrap(), 1.0);
        assert_abs_diff_eq!(defect_density(&states(&[0.2, 0.4])).unwrap(), 0.3, epsilon = 1e-15);
        assert!(defect_density(&[]).is_err());
    }

    #[test]
    fn purity_limits() {
        assert_eq!(mean_purity(&states(&[0.0, 1.0])).unwrap(), 1.0);
        assert_abs_diff_eq!(mean_purity(&states(&[0.5])).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn reference_values() {
        assert_eq!(landau_zener_reference(1.3, 0.0).unwrap(), 1.0);
        let v = landau_zener_reference(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert_abs_diff_eq!(v, (-4.0 * std::f64::consts::PI).exp(), epsilon = 1e-20);
        assert_abs_diff_eq!(v, 3.4873423562089e-6, epsilon = 1e-15);
        assert!(landau_zener_reference(0.3, -1.0).is_err());
    }
}

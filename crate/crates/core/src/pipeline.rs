// SPDX-License-Identifier: Apache-2.0

//! From mode states to chain observables: correlators, reduced states,
//! concurrences and scalar diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{ab_correlators, onsite_sz, spin_correlators, SpinCorrelators};
use crate::dynamics::{evolve_all_modes_readouts, DiagonalModeState, IntegratorParams};
use crate::entanglement::{concurrence, reduced_rho};
use crate::error::{QuenchError, Result};
use crate::model::{mode_coefficients, ModeGrid, NoiseSpec, QuenchProtocol};
use crate::observables::{clamp_count, defect_density, mean_purity, ObservableRecord};

/// Chain observables at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSnapshot {
    pub t: f64,
    pub h0: f64,
    pub sz: f64,
    /// Spin correlators for separations `1..=spin.len()`.
    pub spin: Vec<SpinCorrelators>,
    /// Nearest-neighbour concurrence `C_{l,l+1}`.
    pub c_nn: f64,
    /// Next-nearest-neighbour concurrence `C_{l,l+2}`.
    pub c_nnn: f64,
    pub defect_density: f64,
    pub mean_purity: f64,
    pub clamp_count: usize,
}

impl ChainSnapshot {
    pub fn record(&self) -> ObservableRecord {
        ObservableRecord {
            t: self.t,
            h0: self.h0,
            defect_density: self.defect_density,
            sz: self.sz,
            mean_purity: self.mean_purity,
            clamp_count: self.clamp_count,
        }
    }
}

/// Mode states of the ground state at field `h0`.
pub fn equilibrium_states(grid: &ModeGrid, h0: f64) -> Vec<DiagonalModeState> {
    grid.momenta()
        .iter()
        .map(|&k| DiagonalModeState::new(k, mode_coefficients(h0, k).theta_k, 0.0, Complex64::new(0.0, 0.0)))
        .collect()
}

/// Evaluates all chain observables; `r_max ≥ 2` selects how many spin
/// correlator separations are kept.
pub fn snapshot(states: &[DiagonalModeState], h0: f64, r_max: usize) -> Result<ChainSnapshot> {
    let r_max = r_max.max(2);
    let corr = ab_correlators(states, r_max)?;
    let sz = onsite_sz(&corr);
    let spin = (1..=r_max)
        .map(|r| spin_correlators(&corr, r))
        .collect::<Result<Vec<_>>>()?;
    let c_nn = concurrence(&reduced_rho(sz, &spin[0])?).c;
    let c_nnn = concurrence(&reduced_rho(sz, &spin[1])?).c;
    Ok(ChainSnapshot {
        t: states[0].t,
        h0,
        sz,
        spin,
        c_nn,
        c_nnn,
        defect_density: defect_density(states)?,
        mean_purity: mean_purity(states)?,
        clamp_count: clamp_count(states),
    })
}

/// Ground-state observables at field `h0`.
pub fn static_snapshot(grid: &ModeGrid, h0: f64, r_max: usize) -> Result<ChainSnapshot> {
    snapshot(&equilibrium_states(grid, h0), h0, r_max)
}

/// Runs one ramp and evaluates the chain when the field passes each of
/// `fields`, which must lie inside the ramp and be monotone along it.
pub fn quench_snapshots(
    grid: &ModeGrid,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    fields: &[f64],
    params: &IntegratorParams,
    r_max: usize,
) -> Result<Vec<ChainSnapshot>> {
    let (lo, hi) = if protocol.h_i <= protocol.h_f {
        (protocol.h_i, protocol.h_f)
    } else {
        (protocol.h_f, protocol.h_i)
    };
    if let Some(h) = fields.iter().find(|&&h| !(h >= lo && h <= hi)) {
        return Err(QuenchError::input(format!("readout field {h} outside the ramp [{lo}, {hi}]")));
    }
    let times: Vec<f64> = fields
        .iter()
        .map(|&h| protocol.time_at_field(h).clamp(protocol.t_i, protocol.t_f()))
        .collect();
    let states = evolve_all_modes_readouts(grid, protocol, noise, &times, params)?;
    states
        .iter()
        .zip(fields)
        .map(|(s, &h)| snapshot(s, h, r_max))
        .collect()
}

/// Observables at the end of the ramp.
pub fn final_snapshot(
    grid: &ModeGrid,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    params: &IntegratorParams,
) -> Result<ChainSnapshot> {
    let mut out = quench_snapshots(grid, protocol, noise, &[protocol.h_f], params, 2)?;
    Ok(out.pop().expect("one readout requested"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn strong_field_ground_state_is_nearly_polarized() {
        let grid = build_grid(40).unwrap();
        let s = static_snapshot(&grid, 1e4, 3).unwrap();
        assert_abs_diff_eq!(s.sz, -0.5, epsilon = 1e-6);
        // C_nn falls off as 1/(2h); C_nnn vanishes faster.
        let t = static_snapshot(&grid, 2e4, 3).unwrap();
        assert_abs_diff_eq!(t.c_nn / s.c_nn, 0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(s.c_nn, 0.5e-4, epsilon = 1e-8);
        assert!(s.c_nnn < 1e-6);
        assert_eq!(s.spin.len(), 3);
        assert_eq!(s.defect_density, 0.0);
        assert_eq!(s.mean_purity, 1.0);
    }

    #[test]
    fn critical_ground_state_is_entangled() {
        let grid = build_grid(200).unwrap();
        let s = static_snapshot(&grid, 1.0, 2).unwrap();
        assert!(s.c_nn > 0.1, "C_nn = {}", s.c_nn);
        assert!(s.c_nnn < s.c_nn);
    }

    #[test]
    fn readouts_follow_the_ramp() {
        let grid = build_grid(20).unwrap();
        let protocol = QuenchProtocol::new(-5.0, 5.0, 1.0).unwrap();
        let params = IntegratorParams::default();
        let fields = [-5.0, 0.0, 5.0];
        let snaps =
            quench_snapshots(&grid, &protocol, &NoiseSpec::noiseless(), &fields, &params, 2).unwrap();
        for (s, &h) in snaps.iter().zip(&fields) {
            assert_eq!(s.h0, h);
            assert_abs_diff_eq!(s.t, protocol.time_at_field(h), epsilon = 1e-12);
        }
        let start = static_snapshot(&grid, -5.0, 2).unwrap();
        assert_abs_diff_eq!(snaps[0].sz, start.sz, epsilon = 1e-12);
        let bad = [6.0];
        assert!(quench_snapshots(&grid, &protocol, &NoiseSpec::noiseless(), &bad, &params, 2).is_err());
    }
}

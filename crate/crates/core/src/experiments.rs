// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps over ramps of the full chain.
//!
//! Every function here is deterministic: sweep points are evaluated
//! independently and reassembled in input order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorParams;
use crate::error::{QuenchError, Result};
use crate::model::{ModeGrid, NoiseSpec, QuenchProtocol};
use crate::pipeline::{final_snapshot, ChainSnapshot};
use crate::scaling::{
    estimate_tau0, fit_log_scaling, tau_c_from_scan, FitResult, FitWindow, SweepSeries,
    SweepVariable, CONCURRENCE_THRESHOLD,
};

/// Ramp endpoints shared by all points of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampEnds {
    pub h_i: f64,
    pub h_f: f64,
}

/// Final-time observables of one `(ξ, τ)` ramp.
pub fn ramp_point(
    grid: &ModeGrid,
    ends: RampEnds,
    xi: f64,
    tau: f64,
    params: &IntegratorParams,
) -> Result<ChainSnapshot> {
    let protocol = QuenchProtocol::new(ends.h_i, ends.h_f, tau)?;
    final_snapshot(grid, &protocol, &NoiseSpec::white(xi), params)
}

/// Final-time observables for each `(ξ, τ)` job, in job order.
pub fn sweep_points(
    grid: &ModeGrid,
    ends: RampEnds,
    jobs: &[(f64, f64)],
    params: &IntegratorParams,
) -> Result<Vec<ChainSnapshot>> {
    jobs.par_iter()
        .map(|&(xi, tau)| ramp_point(grid, ends, xi, tau, params))
        .collect()
}

/// Next-nearest-neighbour concurrence at the end of one ramp.
pub fn final_c_nnn(grid: &ModeGrid, ends: RampEnds, xi: f64, tau: f64, params: &IntegratorParams) -> Result<f64> {
    Ok(ramp_point(grid, ends, xi, tau, params)?.c_nnn)
}

/// Onset time scale of noiseless next-nearest-neighbour entanglement,
/// bracketed in `[1, 4]`.
pub fn noiseless_tau0(grid: &ModeGrid, ends: RampEnds, params: &IntegratorParams) -> Result<f64> {
    estimate_tau0(
        |tau| final_c_nnn(grid, ends, 0.0, tau, params),
        1.0,
        4.0,
        CONCURRENCE_THRESHOLD,
    )
}

/// Concurrence scan over τ at fixed noise strength, with derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseScan {
    pub xi: f64,
    pub taus: Vec<f64>,
    pub c_nnn: Vec<f64>,
    /// End of the entangled window; `None` when the scan never finds one.
    pub tau_c: Option<f64>,
    /// Largest scanned concurrence and where it occurs.
    pub tau_at_max: f64,
    pub c_max: f64,
    /// `C = c ln τ + b` over `(2τ₀, τ_c)` when that window holds enough points.
    pub log_fit: Option<FitResult>,
}

impl NoiseScan {
    pub fn series(&self) -> Result<SweepSeries> {
        Ok(SweepSeries::new(SweepVariable::Tau, self.taus.clone(), self.c_nnn.clone())?.with_fixed("xi", self.xi))
    }
}

/// Scans `C_{l,l+2}` over the (increasing) grid `taus`.
///
/// With `stop_after = Some(m)`, the scan ends once `m` consecutive points
/// vanish after an entangled stretch; the remaining grid is not evaluated.
pub fn noise_scan(
    grid: &ModeGrid,
    ends: RampEnds,
    xi: f64,
    taus: &[f64],
    params: &IntegratorParams,
    tau0: f64,
    stop_after: Option<usize>,
) -> Result<NoiseScan> {
    let eval = |tau: f64| final_c_nnn(grid, ends, xi, tau, params);
    let values: Vec<f64> = match stop_after {
        None => taus.par_iter().map(|&t| eval(t)).collect::<Result<_>>()?,
        Some(m) => {
            let mut out = Vec::new();
            let mut entangled = false;
            let mut run = 0;
            for &t in taus {
                let c = eval(t)?;
                out.push(c);
                if c > CONCURRENCE_THRESHOLD {
                    entangled = true;
                    run = 0;
                } else if entangled {
                    run += 1;
                    if run >= m {
                        break;
                    }
                }
            }
            out
        }
    };
    let scanned = &taus[..values.len()];
    let tau_c = match tau_c_from_scan(eval, scanned, &values, CONCURRENCE_THRESHOLD) {
        Ok(t) => Some(t),
        Err(QuenchError::Search(_)) => None,
        Err(e) => return Err(e),
    };
    let (imax, &c_max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| QuenchError::input("empty τ grid"))?;
    let mut scan = NoiseScan {
        xi,
        taus: scanned.to_vec(),
        c_nnn: values.clone(),
        tau_c,
        tau_at_max: scanned[imax],
        c_max,
        log_fit: None,
    };
    if let Some(tc) = tau_c {
        scan.log_fit = match fit_log_scaling(&scan.series()?, FitWindow::new(2.0 * tau0, tc)) {
            Ok(f) => Some(f),
            Err(QuenchError::Fit(_)) => None,
            Err(e) => return Err(e),
        };
    }
    Ok(scan)
}

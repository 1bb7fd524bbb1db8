// SPDX-License-Identifier: Apache-2.0

//! Transverse-field Ising chain in the momentum representation.
//!
//! The chain `H = -Σ (2 s^x_n s^x_{n+1} - h0(t) s^z_n)` (J = ħ = 1, periodic
//! spins, even fermion parity) decouples into independent two-level problems,
//! one per positive momentum `k = (2j-1)π/N`. Each mode lives in the pair
//! occupation basis `{|0⟩, c†_k c†_{-k}|0⟩}` where the Hamiltonian reads
//! `-h_k σ_z + Δ_k σ_y` with `h_k = h0 - cos k` and `Δ_k = sin k`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::ModeState;
use crate::error::{QuenchError, Result};

/// Positive half of the antiperiodic momentum grid of an `N`-site chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    n_sites: usize,
    momenta: Vec<f64>,
}

impl ModeGrid {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

/// Builds the grid `k_j = (2j-1)π/N`, `j = 1..N/2`.
pub fn build_grid(n_sites: usize) -> Result<ModeGrid> {
    if n_sites < 4 || n_sites % 2 != 0 {
        return Err(QuenchError::config(format!(
            "number of sites must be even and at least 4, got {n_sites}"
        )));
    }
    let momenta = (1..=n_sites / 2)
        .map(|j| (2 * j - 1) as f64 * PI / n_sites as f64)
        .collect();
    Ok(ModeGrid { n_sites, momenta })
}

/// Linear ramp `h0(t) = h_i ± (t - t_i)/τ` from `h_i` to `h_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchProtocol {
    pub h_i: f64,
    pub h_f: f64,
    pub tau: f64,
    #[serde(default)]
    pub t_i: f64,
}

impl QuenchProtocol {
    pub fn new(h_i: f64, h_f: f64, tau: f64) -> Result<Self> {
        Self::with_start(h_i, h_f, tau, 0.0)
    }

    pub fn with_start(h_i: f64, h_f: f64, tau: f64, t_i: f64) -> Result<Self> {
        let p = Self { h_i, h_f, tau, t_i };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(QuenchError::config(format!(
                "quench time scale must be positive and finite, got {}",
                self.tau
            )));
        }
        if !(self.h_i.is_finite() && self.h_f.is_finite()) || self.h_i == self.h_f {
            return Err(QuenchError::config(format!(
                "ramp endpoints must be finite and distinct, got h_i = {}, h_f = {}",
                self.h_i, self.h_f
            )));
        }
        if !self.t_i.is_finite() {
            return Err(QuenchError::config("start time must be finite"));
        }
        Ok(())
    }

    /// Signed sweep rate `dh0/dt`.
    pub fn rate(&self) -> f64 {
        (self.h_f - self.h_i).signum() / self.tau
    }

    pub fn field_at(&self, t: f64) -> f64 {
        self.h_i + (t - self.t_i) * self.rate()
    }

    /// Time at which the ramp reaches the field value `h0`.
    pub fn time_at_field(&self, h0: f64) -> f64 {
        self.t_i + (h0 - self.h_i) / self.rate()
    }

    pub fn t_f(&self) -> f64 {
        self.time_at_field(self.h_f)
    }

    pub fn duration(&self) -> f64 {
        self.tau * (self.h_f - self.h_i).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    White,
    OrnsteinUhlenbeck,
}

/// Gaussian field noise `η(t)` added to `h0(t)`.
///
/// White noise has `⟨η(t)η(t')⟩ = ξ² δ(t-t')`; the Ornstein-Uhlenbeck kind has
/// `⟨η(t)η(t')⟩ = ξ²/(2τ_n) exp(-|t-t'|/τ_n)` and is only understood by the
/// trajectory sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub xi: f64,
    #[serde(default)]
    pub tau_n: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self::white(0.0)
    }

    pub fn white(xi: f64) -> Self {
        Self {
            kind: NoiseKind::White,
            xi,
            tau_n: 0.0,
        }
    }

    pub fn ornstein_uhlenbeck(xi: f64, tau_n: f64) -> Self {
        Self {
            kind: NoiseKind::OrnsteinUhlenbeck,
            xi,
            tau_n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return Err(QuenchError::config(format!(
                "noise intensity must be finite and non-negative, got {}",
                self.xi
            )));
        }
        if self.kind == NoiseKind::OrnsteinUhlenbeck && !(self.tau_n > 0.0 && self.tau_n.is_finite())
        {
            return Err(QuenchError::config(format!(
                "Ornstein-Uhlenbeck correlation time must be positive, got {}",
                self.tau_n
            )));
        }
        Ok(())
    }

    /// Rate of the double-commutator dephasing term, `ξ²/2`.
    pub fn dephasing_strength(&self) -> f64 {
        0.5 * self.xi * self.xi
    }

    pub fn is_noiseless(&self) -> bool {
        self.xi == 0.0
    }
}

/// Per-mode Hamiltonian data at a fixed field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub h_k: f64,
    pub delta_k: f64,
    pub theta_k: f64,
    pub eps_k: f64,
}

/// Bogoliubov data of mode `k` at field `h0`.
///
/// `θ_k = atan2(Δ_k, h_k)/2`, continuous through `h_k = 0`.
pub fn mode_coefficients(h0: f64, k: f64) -> ModeCoefficients {
    let h_k = h0 - k.cos();
    let delta_k = k.sin();
    ModeCoefficients {
        h_k,
        delta_k,
        theta_k: 0.5 * delta_k.atan2(h_k),
        eps_k: h_k.hypot(delta_k),
    }
}

/// `-h_k σ_z + Δ_k σ_y` in the pair occupation basis `{|0⟩, |k,-k⟩}`.
pub fn mode_hamiltonian(h0: f64, k: f64) -> Matrix2<Complex64> {
    let c = mode_coefficients(h0, k);
    let i = Complex64::i();
    Matrix2::new(
        Complex64::new(-c.h_k, 0.0),
        -i * c.delta_k,
        i * c.delta_k,
        Complex64::new(c.h_k, 0.0),
    )
}

/// Lower (`|φ⁻⟩ = (cos θ, -i sin θ)`) and upper (`|φ⁺⟩ = (-i sin θ, cos θ)`)
/// eigenvectors of the mode Hamiltonian, with energies `∓ε_k`.
pub fn eigenvectors(theta: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let (s, c) = theta.sin_cos();
    let lower = [Complex64::new(c, 0.0), Complex64::new(0.0, -s)];
    let upper = [Complex64::new(0.0, -s), Complex64::new(c, 0.0)];
    (lower, upper)
}

/// Projector onto the instantaneous ground state of mode `k` at field `h0`.
pub fn ground_state_density(h0: f64, k: f64) -> ModeState {
    let (lower, _) = eigenvectors(mode_coefficients(h0, k).theta_k);
    let rho = Matrix2::from_fn(|a, b| lower[a] * lower[b].conj());
    ModeState { rho, k, t: 0.0 }
}

/// `1/(τ ε_k)`; infinite at an exact level crossing.
pub fn adiabaticity_index(tau: f64, eps_k: f64) -> f64 {
    if eps_k == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (tau * eps_k)
    }
}

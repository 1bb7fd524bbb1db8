// SPDX-License-Identifier: Apache-2.0

//! Time evolution of single momentum modes.
//!
//! Each mode density matrix is integrated in the fixed pair-occupation basis,
//! where the noise-averaged white-noise master equation reads
//!
//! ```text
//! dρ/dt = -i[H_k(t), ρ] - (ξ²/2) [σ_z, [σ_z, ρ]],   H_k(t) = -h_k(t) σ_z + Δ_k σ_y.
//! ```
//!
//! Internally the state is the Bloch vector `r` of `ρ = (1 + r·σ)/2`, which
//! obeys `dr/dt = 2 b(t) × r - 2ξ² (r_x, r_y, 0)` with `b = (0, Δ_k, -h_k)`.
//! The generator is affine in time, so each step applies the exact
//! exponential of a sixth-order Magnus generator. For `ξ = 0` that
//! exponential is a rotation.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QuenchError, Result};
use crate::model::{
    eigenvectors, ground_state_density, mode_coefficients, ModeGrid, NoiseKind, NoiseSpec,
    QuenchProtocol,
};

/// Tolerance below which negative populations are treated as round-off.
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// 2×2 density matrix of one `(k, -k)` pair in the basis `{|0⟩, c†_k c†_{-k}|0⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub rho: Matrix2<Complex64>,
    pub k: f64,
    pub t: f64,
}

impl ModeState {
    pub fn from_bloch(r: [f64; 3], k: f64, t: f64) -> Self {
        let half = 0.5;
        let rho = Matrix2::new(
            Complex64::new(half * (1.0 + r[2]), 0.0),
            Complex64::new(half * r[0], -half * r[1]),
            Complex64::new(half * r[0], half * r[1]),
            Complex64::new(half * (1.0 - r[2]), 0.0),
        );
        Self { rho, k, t }
    }

    /// Bloch vector of the Hermitian part of `ρ`.
    pub fn bloch(&self) -> [f64; 3] {
        let off = 0.5 * (self.rho[(1, 0)] + self.rho[(0, 1)].conj());
        [
            2.0 * off.re,
            2.0 * off.im,
            (self.rho[(0, 0)] - self.rho[(1, 1)]).re,
        ]
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.rho - self.rho.adjoint()).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let r = self.bloch();
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        0.5 * (self.trace().re - len)
    }

    /// Checks the trace, Hermiticity and positivity invariants.
    pub fn check(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).norm() > tol || self.hermiticity_defect() > tol {
            return Err(QuenchError::Positivity {
                k: self.k,
                t: self.t,
                detail: format!(
                    "trace {tr} / hermiticity defect {:.3e}",
                    self.hermiticity_defect()
                ),
            });
        }
        let lmin = self.min_eigenvalue();
        if lmin < -POSITIVITY_TOLERANCE {
            return Err(QuenchError::Positivity {
                k: self.k,
                t: self.t,
                detail: format!("smallest eigenvalue {lmin:.3e}"),
            });
        }
        Ok(())
    }

    /// Trace distance `½‖ρ - σ‖₁` between two mode states.
    pub fn trace_distance(&self, other: &ModeState) -> f64 {
        let a = self.bloch();
        let b = other.bloch();
        0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// Mode state in the instantaneous eigenbasis `{|φ⁻⟩, |φ⁺⟩}` of `H_k(t)`.
///
/// `d11 = ⟨φ⁻|ρ|φ⁻⟩`, `d22 = ⟨φ⁺|ρ|φ⁺⟩`, `d12 = ⟨φ⁻|ρ|φ⁺⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalModeState {
    pub k: f64,
    pub t: f64,
    pub theta_k: f64,
    pub d11: f64,
    pub d22: f64,
    pub d12_re: f64,
    pub d12_im: f64,
    /// Set when a round-off negative population was clamped to zero.
    pub clamped: bool,
}

impl DiagonalModeState {
    pub fn d12(&self) -> Complex64 {
        Complex64::new(self.d12_re, self.d12_im)
    }

    pub fn d21(&self) -> Complex64 {
        self.d12().conj()
    }

    pub fn purity(&self) -> f64 {
        self.d11 * self.d11 + self.d22 * self.d22 + 2.0 * self.d12().norm_sqr()
    }

    /// Builds a diagonal-basis state directly; used for limits and tests.
    pub fn new(k: f64, theta_k: f64, d22: f64, d12: Complex64) -> Self {
        Self {
            k,
            t: 0.0,
            theta_k,
            d11: 1.0 - d22,
            d22,
            d12_re: d12.re,
            d12_im: d12.im,
            clamped: false,
        }
    }
}

/// Rotates `state` into the eigenbasis of `H_k` at field `h0`.
pub fn to_diagonal_basis(state: &ModeState, h0: f64) -> DiagonalModeState {
    let theta = mode_coefficients(h0, state.k).theta_k;
    let (lower, upper) = eigenvectors(theta);
    let rho = &state.rho;
    let sandwich = |bra: &[Complex64; 2], ket: &[Complex64; 2]| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += bra[a].conj() * rho[(a, b)] * ket[b];
            }
        }
        acc
    };
    let mut d11 = sandwich(&lower, &lower).re;
    let mut d22 = sandwich(&upper, &upper).re;
    let d12 = sandwich(&lower, &upper);
    let mut clamped = false;
    for d in [&mut d11, &mut d22] {
        if *d < 0.0 && *d >= -POSITIVITY_TOLERANCE {
            *d = 0.0;
            clamped = true;
        }
    }
    DiagonalModeState {
        k: state.k,
        t: state.t,
        theta_k: theta,
        d11,
        d22,
        d12_re: d12.re,
        d12_im: d12.im,
        clamped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorMethod {
    /// Sixth-order Magnus step with an exact exponential of the generator.
    Magnus6,
}

/// Step-size policy `dt = min(dt_max, safety·τ, max_phase/(2ε(t)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorParams {
    pub dt_max: f64,
    pub safety: f64,
    /// Largest Bloch rotation angle `2 ε dt` taken in one step.
    pub max_phase: f64,
    pub method: IntegratorMethod,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        Self {
            dt_max: 0.2,
            safety: 0.01,
            max_phase: 2.0,
            method: IntegratorMethod::Magnus6,
        }
    }
}

impl IntegratorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dt_max", self.dt_max),
            ("safety", self.safety),
            ("max_phase", self.max_phase),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QuenchError::config(format!(
                    "integrator {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Same policy with every step bound halved.
    pub fn halved(&self) -> Self {
        Self {
            dt_max: 0.5 * self.dt_max,
            safety: 0.5 * self.safety,
            max_phase: 0.5 * self.max_phase,
            method: self.method,
        }
    }
}

#[inline]
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rotation of `r` about `omega` by the angle `|omega|`.
#[inline]
fn rotate(omega: [f64; 3], r: [f64; 3]) -> [f64; 3] {
    let phi2 = omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2];
    let phi = phi2.sqrt();
    let (s_over, c_over) = if phi < 1e-4 {
        // sin(φ)/φ and (1 - cos φ)/φ² to O(φ⁶)
        (
            1.0 - phi2 / 6.0 + phi2 * phi2 / 120.0,
            0.5 - phi2 / 24.0 + phi2 * phi2 / 720.0,
        )
    } else {
        let (s, c) = phi.sin_cos();
        (s / phi, (1.0 - c) / phi2)
    };
    let wxr = cross(omega, r);
    let wxwxr = cross(omega, wxr);
    [
        r[0] + s_over * wxr[0] + c_over * wxwxr[0],
        r[1] + s_over * wxr[1] + c_over * wxwxr[1],
        r[2] + s_over * wxr[2] + c_over * wxwxr[2],
    ]
}

/// `exp(M) r` for `M r = omega × r - g (r_x, r_y, 0)`.
///
/// The characteristic polynomial is
/// `λ³ + 2gλ² + (g² + |ω|²)λ + g(ω_x² + ω_y²)`, with one real root `λ₀` and a
/// complex pair `μ, μ*`. The exponential is the quadratic interpolant
/// `e^{λ₀} + (M - λ₀)(a + bM)` with `a + bμ = (e^μ - e^{λ₀})/(μ - λ₀)`.
#[inline]
fn rotate_dephase(omega: [f64; 3], g: f64, r: [f64; 3]) -> [f64; 3] {
    let rho2 = omega[0] * omega[0] + omega[1] * omega[1];
    let w2 = rho2 + omega[2] * omega[2];
    if w2 < 1e-2 {
        return rotate_dephase_series(omega, g, r);
    }
    let c1 = g * g + w2;
    let c0 = g * rho2;
    // f is increasing near the origin once |ω|² > g²/3; Newton from the
    // first-order estimate converges in a few iterations.
    let mut l0 = -c0 / c1;
    for _ in 0..6 {
        let f = ((l0 + 2.0 * g) * l0 + c1) * l0 + c0;
        let df = (3.0 * l0 + 4.0 * g) * l0 + c1;
        let step = f / df;
        l0 -= step;
        if step.abs() <= 1e-17 * (1.0 + l0.abs()) {
            break;
        }
    }
    let alpha = -0.5 * (2.0 * g + l0);
    let prod = c1 + l0 * (2.0 * g + l0);
    let beta = (prod - alpha * alpha).max(0.0).sqrt();
    let e0 = l0.exp();
    let (sb, cb) = beta.sin_cos();
    let ea = alpha.exp();
    // S = (e^μ - e^{λ₀}) / (μ - λ₀)
    let num_re = ea * cb - e0;
    let num_im = ea * sb;
    let den_re = alpha - l0;
    let den_im = beta;
    let den2 = den_re * den_re + den_im * den_im;
    let s_re = (num_re * den_re + num_im * den_im) / den2;
    let s_im = (num_im * den_re - num_re * den_im) / den2;
    let b = s_im / beta;
    let a = s_re - b * alpha;
    let apply = |v: [f64; 3]| -> [f64; 3] {
        let c = cross(omega, v);
        [c[0] - g * v[0], c[1] - g * v[1], c[2]]
    };
    let mr = apply(r);
    let u = [
        a * r[0] + b * mr[0],
        a * r[1] + b * mr[1],
        a * r[2] + b * mr[2],
    ];
    let mu = apply(u);
    [
        e0 * r[0] + mu[0] - l0 * u[0],
        e0 * r[1] + mu[1] - l0 * u[1],
        e0 * r[2] + mu[2] - l0 * u[2],
    ]
}

/// Taylor-series version of [`rotate_dephase`] with substepping so that each
/// factor has norm below one half.
#[inline]
fn rotate_dephase_series(omega: [f64; 3], g: f64, r: [f64; 3]) -> [f64; 3] {
    let norm = (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt() + g;
    let pieces = ((norm / 0.5).ceil() as usize).max(1);
    let scale = 1.0 / pieces as f64;
    let w = [omega[0] * scale, omega[1] * scale, omega[2] * scale];
    let gs = g * scale;
    let mut out = r;
    for _ in 0..pieces {
        let mut term = out;
        let mut acc = out;
        for n in 1..40 {
            let wxt = cross(w, term);
            let inv = 1.0 / n as f64;
            term = [
                (wxt[0] - gs * term[0]) * inv,
                (wxt[1] - gs * term[1]) * inv,
                wxt[2] * inv,
            ];
            acc[0] += term[0];
            acc[1] += term[1];
            acc[2] += term[2];
            if term[0].abs() + term[1].abs() + term[2].abs() < 1e-18 {
                break;
            }
        }
        out = acc;
    }
    out
}

/// Propagator for a single mode along a ramp.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ModePropagator {
    delta: f64,
    /// `h_{0,k}` at `t_i`, i.e. `h_i - cos k`.
    hk_start: f64,
    t_i: f64,
    rate: f64,
    /// Bloch-vector dephasing rate `2ξ²`.
    gamma: f64,
    dt_cap: f64,
    half_phase: f64,
    /// Bound on the change of `ε` over one step.
    eps_pad: f64,
}

impl ModePropagator {
    pub(crate) fn new(
        k: f64,
        protocol: QuenchProtocol,
        xi: f64,
        params: IntegratorParams,
    ) -> Self {
        let rate = protocol.rate();
        let dt_cap = params.dt_max.min(params.safety * protocol.tau);
        Self {
            delta: k.sin(),
            hk_start: protocol.h_i - k.cos(),
            t_i: protocol.t_i,
            rate,
            gamma: 2.0 * xi * xi,
            dt_cap,
            half_phase: 0.5 * params.max_phase,
            eps_pad: dt_cap * rate.abs(),
        }
    }

    #[inline]
    fn h_k(&self, t: f64) -> f64 {
        self.hk_start + (t - self.t_i) * self.rate
    }

    #[inline]
    fn step_size(&self, t: f64) -> f64 {
        let h_k = self.h_k(t);
        let eps = (h_k * h_k + self.delta * self.delta).sqrt() + self.eps_pad;
        self.dt_cap.min(self.half_phase / eps)
    }

    /// Magnus rotation vector for the step `[t, t + dt]` with an extra constant
    /// field offset `eta` (zero for the averaged equation).
    #[inline]
    fn omega(&self, t: f64, dt: f64, eta: f64) -> [f64; 3] {
        let rate = self.rate;
        let h_mid = self.h_k(t + 0.5 * dt) + eta;
        // Sixth-order Magnus for a generator affine in time, written with
        // cross products: α₁ = dt·a(mid), α₂ = dt²·ȧ. The time-dependent part
        // commutes with the dephasing projector, so the fourth-order terms are
        // exact with noise; the dephasing enters the fifth-order nested
        // commutators only at O(ξ² dt⁶) and is dropped there.
        let a1 = [0.0, 2.0 * self.delta * dt, -2.0 * h_mid * dt];
        let a2 = [0.0, 0.0, -2.0 * rate * dt * dt];
        let c1 = cross(a1, a2);
        let c2 = cross(a1, c1);
        let left = [
            -20.0 * a1[0] + c1[0],
            -20.0 * a1[1] + c1[1],
            -20.0 * a1[2] + c1[2],
        ];
        let right = [
            a2[0] - c2[0] / 60.0,
            a2[1] - c2[1] / 60.0,
            a2[2] - c2[2] / 60.0,
        ];
        let corr = cross(left, right);
        [
            a1[0] + corr[0] / 240.0,
            a1[1] + corr[1] / 240.0,
            a1[2] + corr[2] / 240.0,
        ]
    }

    #[inline]
    fn step(&self, r: [f64; 3], t: f64, dt: f64) -> [f64; 3] {
        let omega = self.omega(t, dt, 0.0);
        if self.gamma == 0.0 {
            rotate(omega, r)
        } else {
            rotate_dephase(omega, self.gamma * dt, r)
        }
    }

    /// Advances `r` from `t0` to `t1`, landing exactly on `t1`.
    pub(crate) fn advance(&self, mut r: [f64; 3], t0: f64, t1: f64) -> [f64; 3] {
        // Compensated time accumulation: over ~10⁶ steps plain summation
        // drifts enough to shift the accumulated dynamical phase.
        let mut t = t0;
        let mut carry = 0.0;
        while t < t1 {
            let mut dt = self.step_size(t);
            if t + dt >= t1 || t1 - (t + dt) < 1e-3 * dt {
                dt = t1 - t;
                r = self.step(r, t, dt);
                break;
            }
            r = self.step(r, t, dt);
            let y = dt - carry;
            let next = t + y;
            carry = (next - t) - y;
            t = next;
        }
        r
    }
}

fn check_evolution_args(protocol: &QuenchProtocol, noise: &NoiseSpec, t_end: f64) -> Result<()> {
    protocol.validate()?;
    noise.validate()?;
    if noise.kind != NoiseKind::White {
        return Err(QuenchError::input(
            "the averaged master equation is exact only for white noise; \
             use the trajectory sampler for Ornstein-Uhlenbeck noise",
        ));
    }
    if !(t_end >= protocol.t_i) || !t_end.is_finite() {
        return Err(QuenchError::input(format!(
            "end time {t_end} precedes ramp start {}",
            protocol.t_i
        )));
    }
    Ok(())
}

/// Integrates one mode from its initial ground state to `t_end`.
pub fn evolve_mode(
    k: f64,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    t_end: f64,
    params: &IntegratorParams,
) -> Result<ModeState> {
    let mut out = evolve_mode_readouts(k, protocol, noise, &[t_end], params)?;
    Ok(out.pop().expect("one readout requested"))
}

/// Integrates one mode and records the state at each (non-decreasing) time.
pub fn evolve_mode_readouts(
    k: f64,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    times: &[f64],
    params: &IntegratorParams,
) -> Result<Vec<ModeState>> {
    params.validate()?;
    for (i, &t) in times.iter().enumerate() {
        check_evolution_args(protocol, noise, t)?;
        if i > 0 && t < times[i - 1] {
            return Err(QuenchError::input("readout times must be non-decreasing"));
        }
    }
    let init = ground_state_density(protocol.h_i, k);
    let prop = ModePropagator::new(k, *protocol, noise.xi, *params);
    let mut r = ModeState {
        t: protocol.t_i,
        ..init
    }
    .bloch();
    let mut t = protocol.t_i;
    let mut out = Vec::with_capacity(times.len());
    for &t_next in times {
        r = prop.advance(r, t, t_next);
        t = t_next;
        out.push(ModeState::from_bloch(r, k, t));
    }
    Ok(out)
}

/// Evolves every mode of `grid` to `t_end` and rotates to the eigenbasis at `h0(t_end)`.
pub fn evolve_all_modes(
    grid: &ModeGrid,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    t_end: f64,
    params: &IntegratorParams,
) -> Result<Vec<DiagonalModeState>> {
    let mut out = evolve_all_modes_readouts(grid, protocol, noise, &[t_end], params)?;
    Ok(out.pop().expect("one readout requested"))
}

/// Multi-time version of [`evolve_all_modes`]; the outer index runs over `times`.
///
/// Modes are integrated independently (in parallel when a thread pool is
/// available) and reassembled in grid order, so the result does not depend
/// on scheduling.
pub fn evolve_all_modes_readouts(
    grid: &ModeGrid,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    times: &[f64],
    params: &IntegratorParams,
) -> Result<Vec<Vec<DiagonalModeState>>> {
    let per_mode: Vec<Vec<DiagonalModeState>> = grid
        .momenta()
        .par_iter()
        .map(|&k| {
            let states = evolve_mode_readouts(k, protocol, noise, times, params)
                .map_err(|e| QuenchError::Mode {
                    k,
                    source: Box::new(e),
                })?;
            states
                .iter()
                .map(|s| {
                    s.check(1e-10).map_err(|e| QuenchError::Mode {
                        k,
                        source: Box::new(e),
                    })?;
                    Ok(to_diagonal_basis(s, protocol.field_at(s.t)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..times.len())
        .map(|ti| per_mode.iter().map(|m| m[ti]).collect())
        .collect())
}

/// Settings of the stochastic trajectory sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySettings {
    pub trajectories: usize,
    pub dt: f64,
    pub seed: u64,
}

/// Bloch vectors of individual noise realizations at `t_end`, in trajectory order.
///
/// Each realization integrates the pure-state equation with `h0(t) + η(t)`,
/// `η` held constant over each step. White noise draws `η ~ N(0, ξ²/dt)`;
/// Ornstein-Uhlenbeck noise uses the exact stationary AR(1) update.
/// Trajectory `j` draws from its own ChaCha stream `(seed, j)`.
pub fn trajectory_ensemble(
    k: f64,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    t_end: f64,
    settings: &TrajectorySettings,
) -> Result<Vec<[f64; 3]>> {
    protocol.validate()?;
    noise.validate()?;
    if settings.trajectories == 0 {
        return Err(QuenchError::input("trajectory count must be positive"));
    }
    if !(settings.dt > 0.0 && settings.dt.is_finite()) {
        return Err(QuenchError::input("trajectory time step must be positive"));
    }
    if !(t_end >= protocol.t_i) {
        return Err(QuenchError::input("end time precedes ramp start"));
    }
    let span = t_end - protocol.t_i;
    let steps = ((span / settings.dt).ceil() as usize).max(1);
    let dt = span / steps as f64;
    let prop = ModePropagator::new(k, *protocol, 0.0, IntegratorParams::default());
    let r0 = ground_state_density(protocol.h_i, k).bloch();
    let xi = noise.xi;

    Ok((0..settings.trajectories)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(j as u64);
            let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
            let mut r = r0;
            match noise.kind {
                NoiseKind::White => {
                    let sd = xi / dt.sqrt();
                    for n in 0..steps {
                        let t = protocol.t_i + n as f64 * dt;
                        let eta = if xi == 0.0 { 0.0 } else { sd * normal() };
                        r = rotate(prop.omega(t, dt, eta), r);
                    }
                }
                NoiseKind::OrnsteinUhlenbeck => {
                    let sd = xi / (2.0 * noise.tau_n).sqrt();
                    let decay = (-dt / noise.tau_n).exp();
                    let kick = sd * (1.0 - decay * decay).sqrt();
                    let mut eta = sd * normal();
                    for n in 0..steps {
                        let t = protocol.t_i + n as f64 * dt;
                        r = rotate(prop.omega(t, dt, eta), r);
                        eta = decay * eta + kick * normal();
                    }
                }
            }
            r
        })
        .collect())
}

/// Ensemble average of [`trajectory_ensemble`] as a mode density matrix.
pub fn trajectory_oracle(
    k: f64,
    protocol: &QuenchProtocol,
    noise: &NoiseSpec,
    t_end: f64,
    settings: &TrajectorySettings,
) -> Result<ModeState> {
    let ensemble = trajectory_ensemble(k, protocol, noise, t_end, settings)?;
    Ok(ensemble_mean(&ensemble, k, t_end))
}

/// Averages the first trajectories of an ensemble into a density matrix.
pub fn ensemble_mean(ensemble: &[[f64; 3]], k: f64, t: f64) -> ModeState {
    let mut acc = [0.0; 3];
    for r in ensemble {
        for a in 0..3 {
            acc[a] += r[a];
        }
    }
    let m = ensemble.len() as f64;
    ModeState::from_bloch([acc[0] / m, acc[1] / m, acc[2] / m], k, t)
}

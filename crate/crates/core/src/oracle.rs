// SPDX-License-Identifier: Apache-2.0

//! Exact diagonalization and state-vector evolution of short periodic chains.
//!
//! Site `j` is bit `j` of a basis index; a clear bit is spin up (`σ^z = +1`).
//! The Hamiltonian is `H = -½ Σ σ^x_j σ^x_{j+1} + (h/2) Σ σ^z_j`.

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::SpinCorrelators;
use crate::entanglement::{concurrence_of_matrix, ConcurrenceValue};
use crate::error::{QuenchError, Result};
use crate::model::{build_grid, mode_coefficients, QuenchProtocol};

pub const MAX_ED_SITES: usize = 12;
/// Largest chain accepted by the time evolution.
pub const MAX_ED_EVOLVE_SITES: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Full state vector of an `N`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseChainState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseChainState {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_sites(n, MAX_ED_SITES)?;
        if amps.len() != 1 << n {
            return Err(QuenchError::input(format!(
                "{} amplitudes for {n} sites",
                amps.len()
            )));
        }
        Ok(Self { n, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &DenseChainState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨H(h0)⟩`.
    pub fn energy(&self, h0: f64) -> f64 {
        let op = ChainOperator::new(self.n);
        let mut out = vec![ZERO; self.amps.len()];
        op.apply(h0, &self.amps, &mut out);
        self.overlap(&DenseChainState {
            n: self.n,
            amps: out,
        })
        .re
    }
}

fn check_sites(n: usize, max: usize) -> Result<()> {
    if n < 4 || n > max || n % 2 != 0 {
        return Err(QuenchError::input(format!(
            "exact diagonalization needs an even chain length in [4, {max}], got {n}"
        )));
    }
    Ok(())
}

/// Sparse action of `-½ Σ σ^x σ^x + (h/2) Σ σ^z`.
struct ChainOperator {
    bond_masks: Vec<usize>,
    z_sum: Vec<f64>,
}

impl ChainOperator {
    fn new(n: usize) -> Self {
        let bond_masks = (0..n).map(|j| (1 << j) | (1 << ((j + 1) % n))).collect();
        let z_sum = (0..1usize << n)
            .map(|b| n as f64 - 2.0 * b.count_ones() as f64)
            .collect();
        Self { bond_masks, z_sum }
    }

    fn apply(&self, h: f64, v: &[Complex64], out: &mut [Complex64]) {
        let hx = -0.5;
        let hz = 0.5 * h;
        for (b, o) in out.iter_mut().enumerate() {
            let mut flip = ZERO;
            for &m in &self.bond_masks {
                flip += v[b ^ m];
            }
            *o = v[b] * (hz * self.z_sum[b]) + flip * hx;
        }
    }

    /// Upper bound on the spectral norm at field `h`.
    fn norm_bound(&self, h: f64) -> f64 {
        let n = self.bond_masks.len() as f64;
        0.5 * n * (1.0 + h.abs())
    }

    /// `v ← exp(-i s (H_x + h H_z)) v` by a truncated Taylor series,
    /// sub-stepped so every factor has norm below one.
    fn exp_apply(&self, h: f64, s: f64, v: &mut Vec<Complex64>, scratch: &mut [Vec<Complex64>; 2]) {
        let pieces = (self.norm_bound(h) * s.abs()).ceil().max(1.0) as usize;
        let step = s / pieces as f64;
        let minus_i = Complex64::new(0.0, -1.0);
        for _ in 0..pieces {
            let [term, next] = scratch;
            term.copy_from_slice(v);
            for order in 1..=40 {
                self.apply(h, term, next);
                let f = minus_i * (step / order as f64);
                let mut size = 0.0;
                for ((t, n), acc) in term.iter_mut().zip(next.iter()).zip(v.iter_mut()) {
                    *t = n * f;
                    *acc += *t;
                    size += t.norm_sqr();
                }
                if size < 1e-34 {
                    break;
                }
            }
        }
    }
}

/// Lowest eigenvector of the chain Hamiltonian in the sector with an even
/// number of down spins.
pub fn ed_ground_state(n: usize, h0: f64) -> Result<DenseChainState> {
    check_sites(n, MAX_ED_SITES)?;
    if !h0.is_finite() {
        return Err(QuenchError::input("field must be finite"));
    }
    let sector: Vec<usize> = (0..1usize << n).filter(|b| b.count_ones() % 2 == 0).collect();
    let mut index = vec![usize::MAX; 1 << n];
    for (i, &b) in sector.iter().enumerate() {
        index[b] = i;
    }
    let dim = sector.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (i, &b) in sector.iter().enumerate() {
        h[(i, i)] = 0.5 * h0 * (n as f64 - 2.0 * b.count_ones() as f64);
        for j in 0..n {
            let m = (1 << j) | (1 << ((j + 1) % n));
            h[(index[b ^ m], i)] -= 0.5;
        }
    }
    let eig = SymmetricEigen::new(h);
    let lowest = eig.eigenvalues.imin();
    let mut amps = vec![ZERO; 1 << n];
    for (i, &b) in sector.iter().enumerate() {
        amps[b] = Complex64::new(eig.eigenvectors[(i, lowest)], 0.0);
    }
    DenseChainState::new(n, amps)
}

/// Evolves under the ramp from `t0` to `t1` with at most `dt_max` per step,
/// using the fourth-order commutator-free Magnus scheme.
pub fn ed_evolve_between(
    state: &DenseChainState,
    protocol: &QuenchProtocol,
    t0: f64,
    t1: f64,
    dt_max: f64,
) -> Result<DenseChainState> {
    check_sites(state.n, MAX_ED_EVOLVE_SITES)?;
    protocol.validate()?;
    if !(dt_max > 0.0 && dt_max.is_finite()) {
        return Err(QuenchError::input("time step must be positive"));
    }
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(QuenchError::input("evolution interval must be ordered and finite"));
    }
    let mut v = state.amps.clone();
    let span = t1 - t0;
    let steps = (span / dt_max).ceil() as usize;
    if steps > 0 {
        let op = ChainOperator::new(state.n);
        let dt = span / steps as f64;
        let r3 = 3f64.sqrt();
        let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
        let (a1, a2) = ((3.0 - 2.0 * r3) / 12.0, (3.0 + 2.0 * r3) / 12.0);
        let mut scratch = [vec![ZERO; v.len()], vec![ZERO; v.len()]];
        for s in 0..steps {
            let t = t0 + s as f64 * dt;
            let h1 = protocol.field_at(t + c1 * dt);
            let h2 = protocol.field_at(t + c2 * dt);
            // a2 H(t1) + a1 H(t2) = ½ (H_x + 2(a2 h1 + a1 h2) H_z) acts first.
            op.exp_apply(2.0 * (a2 * h1 + a1 * h2), 0.5 * dt, &mut v, &mut scratch);
            op.exp_apply(2.0 * (a1 * h1 + a2 * h2), 0.5 * dt, &mut v, &mut scratch);
        }
    }
    Ok(DenseChainState { n: state.n, amps: v })
}

/// Evolves `state` over the whole ramp.
pub fn ed_evolve(state: &DenseChainState, protocol: &QuenchProtocol, dt: f64) -> Result<DenseChainState> {
    ed_evolve_between(state, protocol, protocol.t_i, protocol.t_f(), dt)
}

/// Reduced density matrix of sites `l` and `m` in the basis `↑↑, ↑↓, ↓↑, ↓↓`.
pub fn ed_reduced_rho(state: &DenseChainState, l: usize, m: usize) -> Result<Matrix4<Complex64>> {
    let n = state.n;
    if l >= n || m >= n || l == m {
        return Err(QuenchError::input(format!("invalid site pair ({l}, {m}) for {n} sites")));
    }
    let local = |b: usize| 2 * ((b >> l) & 1) + ((b >> m) & 1);
    let clear = !((1usize << l) | (1usize << m));
    let mut rho = Matrix4::zeros();
    for (b, &amp) in state.amps.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let rest = b & clear;
        let i = local(b);
        for j in 0..4 {
            let b2 = rest | (((j >> 1) & 1) << l) | ((j & 1) << m);
            rho[(i, j)] += amp * state.amps[b2].conj();
        }
    }
    Ok(rho)
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    [
        Matrix2::new(ZERO, one, one, ZERO),
        Matrix2::new(ZERO, -i, i, ZERO),
        Matrix2::new(one, ZERO, ZERO, -one),
    ]
}

fn two_site_expectation(rho: &Matrix4<Complex64>, a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Complex64 {
    let op = Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)]);
    (rho * op).trace()
}

/// `⟨s^α_0 s^β_r⟩` from the reduced state of sites `0` and `r`.
pub fn ed_spin_correlators(state: &DenseChainState, r: usize) -> Result<SpinCorrelators> {
    let rho = ed_reduced_rho(state, 0, r)?;
    let [x, y, z] = pauli();
    let e = |a, b| two_site_expectation(&rho, a, b) * 0.25;
    Ok(SpinCorrelators {
        r,
        xx: e(&x, &x),
        yy: e(&y, &y),
        zz: e(&z, &z),
        xy: e(&x, &y),
        yx: e(&y, &x),
    })
}

/// `⟨s^z_0⟩`.
pub fn ed_sz(state: &DenseChainState) -> f64 {
    state
        .amps
        .iter()
        .enumerate()
        .map(|(b, a)| if b & 1 == 0 { 0.5 } else { -0.5 } * a.norm_sqr())
        .sum()
}

/// Concurrence of sites `0` and `r`.
pub fn ed_concurrence(state: &DenseChainState, r: usize) -> Result<ConcurrenceValue> {
    Ok(concurrence_of_matrix(&ed_reduced_rho(state, 0, r)?))
}

/// Free-fermion ground-state energy `-Σ_{k>0} ε_k` of the even sector.
pub fn free_fermion_ground_energy(n: usize, h0: f64) -> Result<f64> {
    let grid = build_grid(n)?;
    Ok(-grid.momenta().iter().map(|&k| mode_coefficients(h0, k).eps_k).sum::<f64>())
}

/// One line of a pipeline-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub n: usize,
    pub h0: f64,
    pub tau: Option<f64>,
    pub quantity: String,
    pub pipeline: f64,
    pub oracle: f64,
    pub deviation: f64,
}

fn row(n: usize, h0: f64, tau: Option<f64>, quantity: String, pipeline: Complex64, oracle: Complex64) -> OracleRow {
    OracleRow {
        n,
        h0,
        tau,
        quantity,
        pipeline: pipeline.re,
        oracle: oracle.re,
        deviation: (pipeline - oracle).norm(),
    }
}

fn compare_snapshot(
    rows: &mut Vec<OracleRow>,
    snap: &crate::pipeline::ChainSnapshot,
    state: &DenseChainState,
    tau: Option<f64>,
) -> Result<()> {
    let (n, h0) = (state.n, snap.h0);
    let re = |x: f64| Complex64::new(x, 0.0);
    rows.push(row(n, h0, tau, "sz".into(), re(snap.sz), re(ed_sz(state))));
    for ff in &snap.spin {
        let ed = ed_spin_correlators(state, ff.r)?;
        let names = ["xx", "yy", "zz", "xy", "yx"];
        let a = [ff.xx, ff.yy, ff.zz, ff.xy, ff.yx];
        let b = [ed.xx, ed.yy, ed.zz, ed.xy, ed.yx];
        for ((name, p), o) in names.iter().zip(a).zip(b) {
            rows.push(row(n, h0, tau, format!("{name}(r={})", ff.r), p, o));
        }
    }
    rows.push(row(n, h0, tau, "C_nn".into(), re(snap.c_nn), re(ed_concurrence(state, 1)?.c)));
    rows.push(row(n, h0, tau, "C_nnn".into(), re(snap.c_nnn), re(ed_concurrence(state, 2)?.c)));
    Ok(())
}

/// Ground-state comparison at field `h0`: energy, `⟨s^z⟩`, correlators up
/// to `r = 3` and both concurrences.
pub fn static_comparison(n: usize, h0: f64) -> Result<Vec<OracleRow>> {
    let state = ed_ground_state(n, h0)?;
    let grid = build_grid(n)?;
    let snap = crate::pipeline::static_snapshot(&grid, h0, 3)?;
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut rows = vec![row(
        n,
        h0,
        None,
        "energy".into(),
        re(free_fermion_ground_energy(n, h0)?),
        re(state.energy(h0)),
    )];
    compare_snapshot(&mut rows, &snap, &state, None)?;
    Ok(rows)
}

/// Noiseless ramp comparison at the readout `fields`.
pub fn ramp_comparison(
    n: usize,
    protocol: &QuenchProtocol,
    fields: &[f64],
    params: &crate::dynamics::IntegratorParams,
    ed_dt: f64,
) -> Result<Vec<OracleRow>> {
    let grid = build_grid(n)?;
    let snaps = crate::pipeline::quench_snapshots(
        &grid,
        protocol,
        &crate::model::NoiseSpec::noiseless(),
        fields,
        params,
        3,
    )?;
    let mut state = ed_ground_state(n, protocol.h_i)?;
    let mut t = protocol.t_i;
    let mut rows = Vec::new();
    for snap in &snaps {
        state = ed_evolve_between(&state, protocol, t, snap.t, ed_dt)?;
        t = snap.t;
        compare_snapshot(&mut rows, snap, &state, Some(protocol.tau))?;
    }
    Ok(rows)
}

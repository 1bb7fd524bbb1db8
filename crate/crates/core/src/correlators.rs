// SPDX-License-Identifier: Apache-2.0

//! Fermionic two-point functions, Majorana contractions and spin correlators.
//!
//! With `A_j = c†_j + c_j` and `B_j = c†_j - c_j`, every spin correlator of
//! the chain is a Pfaffian of pairwise Majorana contractions. The
//! contractions follow from four translation-invariant fermion pair functions,
//! each a sum over the positive momenta of the per-mode density matrices in
//! their instantaneous eigenbasis.
//!
//! Displacements follow the Fourier convention `c_k = N^{-1/2} Σ_n e^{ikn} c_n`,
//! so the anomalous functions carry `sin(-kr)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::DiagonalModeState;
use crate::error::{QuenchError, Result};
use crate::model::build_grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Compensated (Neumaier) accumulator for complex sums over momenta.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: [f64; 2],
    carry: [f64; 2],
}

impl Accumulator {
    pub(crate) fn add(&mut self, z: Complex64) {
        for (i, x) in [z.re, z.im].into_iter().enumerate() {
            let s = self.sum[i];
            let t = s + x;
            if s.abs() >= x.abs() {
                self.carry[i] += (s - t) + x;
            } else {
                self.carry[i] += (x - t) + s;
            }
            self.sum[i] = t;
        }
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.sum[0] + self.carry[0], self.sum[1] + self.carry[1])
    }
}

/// Translation-invariant fermion pair functions at displacement `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermionPairSet {
    pub r: i64,
    /// `⟨c†_l c†_{l+r}⟩`
    pub cdag_cdag: Complex64,
    /// `⟨c_l c_{l+r}⟩`
    pub c_c: Complex64,
    /// `⟨c†_l c_{l+r}⟩`
    pub cdag_c: Complex64,
    /// `⟨c_l c†_{l+r}⟩`
    pub c_cdag: Complex64,
}

/// Checks that `states` cover the positive antiperiodic grid at one time.
/// Returns the number of sites.
fn check_states(states: &[DiagonalModeState]) -> Result<usize> {
    if states.is_empty() {
        return Err(QuenchError::input("no mode states supplied"));
    }
    let n = 2 * states.len();
    let grid = build_grid(n).map_err(|e| QuenchError::input(e.to_string()))?;
    let t0 = states[0].t;
    for (s, &k) in states.iter().zip(grid.momenta()) {
        if (s.k - k).abs() > 1e-12 {
            return Err(QuenchError::input(format!(
                "mode momentum {} does not match grid value {k} for N = {n}",
                s.k
            )));
        }
        if (s.t - t0).abs() > 1e-9 * (1.0 + t0.abs()) {
            return Err(QuenchError::input(format!(
                "mode states taken at different times ({} vs {t0})",
                s.t
            )));
        }
    }
    Ok(n)
}

fn pairs_unchecked(states: &[DiagonalModeState], n: usize, r: i64) -> FermionPairSet {
    let i = Complex64::i();
    let mut acc = [Accumulator::default(); 4];
    for s in states {
        let (sin_t, cos_t) = s.theta_k.sin_cos();
        let c2 = cos_t * cos_t;
        let s2 = sin_t * sin_t;
        let s2t = 2.0 * sin_t * cos_t;
        let d12 = s.d12();
        let d21 = s.d21();
        let skr = (-s.k * r as f64).sin();
        let ckr = (s.k * r as f64).cos();
        acc[0].add(skr * (s2t * (s.d22 - s.d11) + 2.0 * i * (c2 * d12 + s2 * d21)));
        acc[1].add(skr * (s2t * (s.d11 - s.d22) + 2.0 * i * (c2 * d21 + s2 * d12)));
        acc[2].add(ckr * (2.0 * c2 * s.d22 + 2.0 * s2 * s.d11 - i * s2t * (d12 - d21)));
        acc[3].add(ckr * (2.0 * c2 * s.d11 + 2.0 * s2 * s.d22 - i * s2t * (d21 - d12)));
    }
    let norm = 1.0 / n as f64;
    FermionPairSet {
        r,
        cdag_cdag: acc[0].value() * norm,
        c_c: acc[1].value() * norm,
        cdag_c: acc[2].value() * norm,
        c_cdag: acc[3].value() * norm,
    }
}

/// Evaluates the four pair functions at displacement `r`.
pub fn fermion_pairs(states: &[DiagonalModeState], r: i64) -> Result<FermionPairSet> {
    let n = check_states(states)?;
    Ok(pairs_unchecked(states, n, r))
}

/// Majorana contractions `⟨A_l A_{l+r}⟩`, `⟨B_l B_{l+r}⟩`, `⟨A_l B_{l+r}⟩`
/// for `|r| ≤ r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    r_max: usize,
    aa: Vec<Complex64>,
    bb: Vec<Complex64>,
    ab: Vec<Complex64>,
}

/// A Majorana operator `A_j` or `B_j` at site `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Majorana {
    A(i64),
    B(i64),
}

impl CorrelatorSet {
    /// Builds a set from explicit tables indexed by `r + r_max`.
    pub fn from_tables(
        r_max: usize,
        aa: Vec<Complex64>,
        bb: Vec<Complex64>,
        ab: Vec<Complex64>,
    ) -> Result<Self> {
        let len = 2 * r_max + 1;
        if aa.len() != len || bb.len() != len || ab.len() != len {
            return Err(QuenchError::input("contraction tables have the wrong length"));
        }
        Ok(Self { r_max, aa, bb, ab })
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    fn index(&self, r: i64) -> usize {
        assert!(
            r.unsigned_abs() as usize <= self.r_max,
            "displacement {r} outside |r| <= {}",
            self.r_max
        );
        (r + self.r_max as i64) as usize
    }

    pub fn aa(&self, r: i64) -> Complex64 {
        self.aa[self.index(r)]
    }

    pub fn bb(&self, r: i64) -> Complex64 {
        self.bb[self.index(r)]
    }

    pub fn ab(&self, r: i64) -> Complex64 {
        self.ab[self.index(r)]
    }

    /// `⟨B_l A_{l+r}⟩ = -⟨A_{l+r} B_l⟩`.
    pub fn ba(&self, r: i64) -> Complex64 {
        -self.ab(-r)
    }

    /// Two-point contraction `⟨x y⟩` of Majorana operators.
    pub fn contract(&self, x: Majorana, y: Majorana) -> Complex64 {
        match (x, y) {
            (Majorana::A(i), Majorana::A(j)) => self.aa(j - i),
            (Majorana::B(i), Majorana::B(j)) => self.bb(j - i),
            (Majorana::A(i), Majorana::B(j)) => self.ab(j - i),
            (Majorana::B(i), Majorana::A(j)) => self.ba(j - i),
        }
    }
}

/// Assembles the Majorana contractions from the pair functions:
/// `AA = c†c† + cc + c†c + cc†`, `BB = c†c† + cc - c†c - cc†`,
/// `AB = c†c† - cc - c†c + cc†`.
pub fn ab_correlators(states: &[DiagonalModeState], r_max: usize) -> Result<CorrelatorSet> {
    let n = check_states(states)?;
    let r_max_i = r_max as i64;
    let mut aa = Vec::with_capacity(2 * r_max + 1);
    let mut bb = Vec::with_capacity(2 * r_max + 1);
    let mut ab = Vec::with_capacity(2 * r_max + 1);
    for r in -r_max_i..=r_max_i {
        let p = pairs_unchecked(states, n, r);
        aa.push(p.cdag_cdag + p.c_c + p.cdag_c + p.c_cdag);
        bb.push(p.cdag_cdag + p.c_c - p.cdag_c - p.c_cdag);
        ab.push(p.cdag_cdag - p.c_c - p.cdag_c + p.c_cdag);
    }
    Ok(CorrelatorSet { r_max, aa, bb, ab })
}

/// Compact contraction formulas in the widely quoted pruned form
///
/// ```text
/// ⟨A_l A_{l+r}⟩ = (2i/N) Σ_{k>0} Re ρ₁₂ sin(kr) + δ_{r0}
/// ⟨B_l B_{l+r}⟩ = (2i/N) Σ_{k>0} Re ρ₁₂ sin(kr) - δ_{r0}
/// ⟨A_l B_{l+r}⟩ = (1/N) Σ_k [(1 - 2ρ₂₂) cos(kr + 2θ_k) - 2 Im ρ₁₂ sin(kr + 2θ_k)]
/// ```
///
/// with the all-`k` sum folded onto `k > 0` using `θ_{-k} = -θ_k`.
/// Relative to [`ab_correlators`] these use the opposite displacement
/// direction, and the anomalous part of `AA`, `BB` is half as large; they are
/// kept as a cross-check only.
pub fn compact_correlators(states: &[DiagonalModeState], r_max: usize) -> Result<CorrelatorSet> {
    let n = check_states(states)?;
    let nf = n as f64;
    let i = Complex64::i();
    let r_max_i = r_max as i64;
    let mut aa = Vec::with_capacity(2 * r_max + 1);
    let mut bb = Vec::with_capacity(2 * r_max + 1);
    let mut ab = Vec::with_capacity(2 * r_max + 1);
    for r in -r_max_i..=r_max_i {
        let rf = r as f64;
        let mut anomalous = 0.0;
        let mut mixed = 0.0;
        for s in states {
            let d12 = s.d12();
            anomalous += d12.re * (s.k * rf).sin();
            let phase = s.k * rf + 2.0 * s.theta_k;
            // ±k pair gives twice the positive-k term.
            mixed += 2.0 * ((1.0 - 2.0 * s.d22) * phase.cos() - 2.0 * d12.im * phase.sin());
        }
        let delta = if r == 0 { 1.0 } else { 0.0 };
        let a = 2.0 * i * anomalous / nf;
        aa.push(a + delta);
        bb.push(a - delta);
        ab.push(Complex64::new(mixed / nf, 0.0));
    }
    Ok(CorrelatorSet { r_max, aa, bb, ab })
}

/// Pfaffian of a complex skew-symmetric matrix of even dimension.
///
/// Dimensions up to six use the direct expansion along the first row; larger
/// matrices use a skew-symmetric `L T Lᵀ` reduction with partial pivoting.
pub fn pfaffian(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(QuenchError::input("Pfaffian of a non-square matrix"));
    }
    if n % 2 == 1 {
        return Err(QuenchError::input(format!("Pfaffian of odd dimension {n}")));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] + m[(j, i)]).norm() > 1e-10 * scale {
                return Err(QuenchError::input(format!(
                    "matrix is not skew-symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if n <= 6 {
        let idx: Vec<usize> = (0..n).collect();
        return Ok(pfaffian_expand(m, &idx));
    }
    Ok(pfaffian_reduce(m.clone()))
}

fn pfaffian_expand(m: &DMatrix<Complex64>, idx: &[usize]) -> Complex64 {
    match idx.len() {
        0 => Complex64::new(1.0, 0.0),
        2 => m[(idx[0], idx[1])],
        len => {
            let mut total = ZERO;
            let mut rest = Vec::with_capacity(len - 2);
            for j in 1..len {
                rest.clear();
                rest.extend(idx[1..].iter().enumerate().filter(|&(p, _)| p + 1 != j).map(|(_, &v)| v));
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                total += sign * m[(idx[0], idx[j])] * pfaffian_expand(m, &rest);
            }
            total
        }
    }
}

fn pfaffian_reduce(mut a: DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for i in k + 2..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        if a[(k + 1, k)] == ZERO {
            return ZERO;
        }
        let pivot = a[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    pf
}

/// Equal-time spin correlators `⟨s^α_l s^β_{l+r}⟩` at one separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCorrelators {
    pub r: usize,
    pub xx: Complex64,
    pub yy: Complex64,
    pub zz: Complex64,
    pub xy: Complex64,
    pub yx: Complex64,
}

impl SpinCorrelators {
    /// Largest imaginary part among the five values.
    pub fn imaginary_residue(&self) -> f64 {
        [self.xx, self.yy, self.zz, self.xy, self.yx]
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_difference(&self, other: &SpinCorrelators) -> f64 {
        [
            self.xx - other.xx,
            self.yy - other.yy,
            self.zz - other.zz,
            self.xy - other.xy,
            self.yx - other.yx,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

fn require_range(corr: &CorrelatorSet, r: usize) -> Result<()> {
    if corr.r_max() < r {
        return Err(QuenchError::input(format!(
            "contractions cover |r| <= {}, need {r}",
            corr.r_max()
        )));
    }
    Ok(())
}

/// Nearest-neighbour closed forms.
pub fn spin_correlators_r1(corr: &CorrelatorSet) -> Result<SpinCorrelators> {
    use Majorana::{A, B};
    require_range(corr, 1)?;
    let q = 0.25;
    let iq = Complex64::new(0.0, 0.25);
    Ok(SpinCorrelators {
        r: 1,
        xx: q * corr.contract(B(0), A(1)),
        yy: q * corr.contract(B(1), A(0)),
        xy: -iq * corr.contract(B(0), B(1)),
        yx: -iq * corr.contract(A(0), A(1)),
        zz: q * (corr.contract(B(0), A(0)) * corr.contract(B(1), A(1))
            - corr.contract(A(0), A(1)) * corr.contract(B(0), B(1))
            - corr.contract(B(0), A(1)) * corr.contract(B(1), A(0))),
    })
}

/// Next-nearest-neighbour closed forms (three-term Wick expansions).
pub fn spin_correlators_r2(corr: &CorrelatorSet) -> Result<SpinCorrelators> {
    use Majorana::{A, B};
    require_range(corr, 2)?;
    let q = 0.25;
    let iq = Complex64::new(0.0, 0.25);
    let c = |x, y| corr.contract(x, y);
    Ok(SpinCorrelators {
        r: 2,
        xx: q * (c(B(0), A(1)) * c(B(1), A(2)) - c(A(1), A(2)) * c(B(0), B(1))
            - c(B(0), A(2)) * c(B(1), A(1))),
        yy: q * (c(B(1), A(0)) * c(B(2), A(1)) - c(A(0), A(1)) * c(B(1), B(2))
            - c(B(2), A(0)) * c(B(1), A(1))),
        xy: -iq
            * (c(B(0), A(1)) * c(B(1), B(2)) - c(B(0), B(1)) * c(A(1), B(2))
                - c(B(0), B(2)) * c(B(1), A(1))),
        yx: iq
            * (c(A(0), B(1)) * c(A(1), A(2)) - c(A(0), A(1)) * c(B(1), A(2))
                + c(A(0), A(2)) * c(B(1), A(1))),
        zz: q * (c(B(0), A(0)) * c(B(2), A(2)) - c(A(0), A(2)) * c(B(0), B(2))
            - c(B(2), A(0)) * c(B(0), A(2))),
    })
}

/// Majorana strings of the five correlators at separation `r`, as
/// `(prefactor, operators)` in the order xx, yy, xy, yx, zz.
fn operator_strings(r: usize) -> [(Complex64, Vec<Majorana>); 5] {
    use Majorana::{A, B};
    let r_i = r as i64;
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    let mut ab_mid = Vec::new();
    let mut ba_mid = Vec::new();
    for j in 1..r_i {
        ab_mid.extend([A(j), B(j)]);
        ba_mid.extend([B(j), A(j)]);
    }
    let string = |first: Majorana, mid: &[Majorana], last: Majorana| {
        let mut v = Vec::with_capacity(2 * r);
        v.push(first);
        v.extend_from_slice(mid);
        v.push(last);
        v
    };
    [
        (Complex64::new(0.25, 0.0), string(B(0), &ab_mid, A(r_i))),
        (Complex64::new(0.25 * sign, 0.0), string(A(0), &ba_mid, B(r_i))),
        (Complex64::new(0.0, -0.25), string(B(0), &ab_mid, B(r_i))),
        (Complex64::new(0.0, 0.25 * sign), string(A(0), &ba_mid, A(r_i))),
        (Complex64::new(0.25, 0.0), vec![A(0), B(0), A(r_i), B(r_i)]),
    ]
}

fn string_expectation(corr: &CorrelatorSet, ops: &[Majorana]) -> Result<Complex64> {
    let n = ops.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i < j {
            corr.contract(ops[i], ops[j])
        } else if i > j {
            -corr.contract(ops[j], ops[i])
        } else {
            ZERO
        }
    });
    pfaffian(&m)
}

/// Spin correlators at any separation `1 ≤ r ≤ r_max` via Pfaffians of the
/// Majorana strings.
pub fn spin_correlators_general(corr: &CorrelatorSet, r: usize) -> Result<SpinCorrelators> {
    if r == 0 {
        return Err(QuenchError::input("separation must be at least 1"));
    }
    require_range(corr, r)?;
    let strings = operator_strings(r);
    let mut vals = [ZERO; 5];
    for (v, (pre, ops)) in vals.iter_mut().zip(strings.iter()) {
        *v = pre * string_expectation(corr, ops)?;
    }
    Ok(SpinCorrelators {
        r,
        xx: vals[0],
        yy: vals[1],
        xy: vals[2],
        yx: vals[3],
        zz: vals[4],
    })
}

/// Closed forms for `r ≤ 2`, Pfaffians beyond.
pub fn spin_correlators(corr: &CorrelatorSet, r: usize) -> Result<SpinCorrelators> {
    match r {
        1 => spin_correlators_r1(corr),
        2 => spin_correlators_r2(corr),
        _ => spin_correlators_general(corr, r),
    }
}

/// Transverse magnetization `⟨s^z_l⟩ = ½⟨B_l A_l⟩ = -½ Re ⟨A_l B_l⟩`.
pub fn onsite_sz(corr: &CorrelatorSet) -> f64 {
    -0.5 * corr.ab(0).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mode_coefficients;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ground_states(n: usize, h0: f64) -> Vec<DiagonalModeState> {
        build_grid(n)
            .unwrap()
            .momenta()
            .iter()
            .map(|&k| DiagonalModeState::new(k, mode_coefficients(h0, k).theta_k, 0.0, ZERO))
            .collect()
    }

    fn mixed_states(n: usize, h0: f64) -> Vec<DiagonalModeState> {
        ground_states(n, h0)
            .into_iter()
            .map(|s| DiagonalModeState::new(s.k, s.theta_k, 0.5, ZERO))
            .collect()
    }

    /// Random admissible diagonal-basis states.
    fn random_states(n: usize, seed: u64) -> Vec<DiagonalModeState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        build_grid(n)
            .unwrap()
            .momenta()
            .iter()
            .map(|&k| {
                let d22: f64 = rng.random();
                let bound = (d22 * (1.0 - d22)).sqrt();
                let mag = bound * rng.random::<f64>();
                let phase = std::f64::consts::TAU * rng.random::<f64>();
                let theta = std::f64::consts::FRAC_PI_2 * (rng.random::<f64>() - 0.5) * 2.0;
                DiagonalModeState::new(k, theta, d22, Complex64::from_polar(mag, phase))
            })
            .collect()
    }

    #[test]
    fn ground_state_onsite_pairs() {
        let n = 12;
        let states = ground_states(n, 0.7);
        let p = fermion_pairs(&states, 0).unwrap();
        let s2: f64 = states.iter().map(|s| s.theta_k.sin().powi(2)).sum();
        let c2: f64 = states.iter().map(|s| s.theta_k.cos().powi(2)).sum();
        assert_abs_diff_eq!(p.cdag_c.re, 2.0 * s2 / n as f64, epsilon = 1e-14);
        assert_abs_diff_eq!(p.c_cdag.re, 2.0 * c2 / n as f64, epsilon = 1e-14);
    }

    #[test]
    fn fully_mixed_pairs() {
        let states = mixed_states(10, 1.3);
        for r in -4..=4 {
            let p = fermion_pairs(&states, r).unwrap();
            let delta = if r == 0 { 0.5 } else { 0.0 };
            assert!(p.cdag_cdag.norm() < 1e-15 && p.c_c.norm() < 1e-15);
            assert_abs_diff_eq!(p.cdag_c.re, delta, epsilon = 1e-15);
            assert_abs_diff_eq!(p.c_cdag.re, delta, epsilon = 1e-15);
        }
    }

    #[test]
    fn diagonal_states_anomalous_terms_by_direct_resummation() {
        // Second implementation: weight the pair amplitude
        // a_k = ⟨c†_k c†_{-k}⟩ = (i/2) sin2θ (ρ₁₁ - ρ₂₂) with e^{-ipr} over p = ±k,
        // using ⟨c†_{-k} c†_k⟩ = -a_k.
        let n = 14;
        let states: Vec<_> = random_states(n, 5)
            .into_iter()
            .map(|s| DiagonalModeState::new(s.k, s.theta_k, s.d22, ZERO))
            .collect();
        for r in -3..=3_i64 {
            let p = fermion_pairs(&states, r).unwrap();
            let mut direct = ZERO;
            for s in &states {
                let amp = Complex64::new(0.0, 0.5 * (2.0 * s.theta_k).sin() * (s.d11 - s.d22));
                let rf = r as f64;
                direct += (Complex64::from_polar(1.0, -s.k * rf) - Complex64::from_polar(1.0, s.k * rf)) * amp;
            }
            direct /= n as f64;
            assert!((p.cdag_cdag - direct).norm() < 1e-14, "r = {r}");
            assert!((p.c_c + direct).norm() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn rejects_mismatched_metadata() {
        let mut states = ground_states(8, 0.5);
        states[1].k += 0.01;
        assert!(fermion_pairs(&states, 0).is_err());
        let mut states = ground_states(8, 0.5);
        states[2].t = 3.0;
        assert!(ab_correlators(&states, 2).is_err());
        assert!(fermion_pairs(&[], 0).is_err());
    }

    #[test]
    fn ground_state_contractions() {
        let n = 16;
        let h0 = 0.4;
        let states = ground_states(n, h0);
        let corr = ab_correlators(&states, 5).unwrap();
        for r in -5..=5_i64 {
            let delta = if r == 0 { 1.0 } else { 0.0 };
            assert!((corr.aa(r) - delta).norm() < 1e-14);
            assert!((corr.bb(r) + delta).norm() < 1e-14);
            let mut expect = 0.0;
            for s in &states {
                let rf = r as f64;
                let t2 = 2.0 * s.theta_k;
                expect += 2.0 * ((s.k * rf).cos() * t2.cos() + (s.k * rf).sin() * t2.sin());
            }
            expect /= n as f64;
            assert_abs_diff_eq!(corr.ab(r).re, expect, epsilon = 1e-14);
            assert!(corr.ab(r).im.abs() < 1e-14);
        }
    }

    #[test]
    fn upper_level_limit() {
        let states: Vec<_> = ground_states(12, 50.0)
            .into_iter()
            .map(|s| DiagonalModeState::new(s.k, 0.0, 1.0, ZERO))
            .collect();
        let corr = ab_correlators(&states, 3).unwrap();
        for r in -3..=3_i64 {
            let delta = if r == 0 { 1.0 } else { 0.0 };
            assert!((corr.ab(r) + delta).norm() < 1e-14);
        }
    }

    #[test]
    fn large_field_quench_limit() {
        let states: Vec<_> = random_states(12, 8)
            .into_iter()
            .map(|s| DiagonalModeState::new(s.k, 0.0, s.d22, ZERO))
            .collect();
        let corr = ab_correlators(&states, 4).unwrap();
        for r in -4..=4_i64 {
            let expect: f64 = states
                .iter()
                .map(|s| 2.0 * (1.0 - 2.0 * s.d22) * (s.k * r as f64).cos())
                .sum::<f64>()
                / 12.0;
            assert_abs_diff_eq!(corr.ab(r).re, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn compact_forms_relation() {
        let states = random_states(12, 21);
        let full = ab_correlators(&states, 3).unwrap();
        let compact = compact_correlators(&states, 3).unwrap();
        for r in -3..=3_i64 {
            let delta = if r == 0 { 1.0 } else { 0.0 };
            let anomalous = full.aa(r) - delta;
            assert!((anomalous - 2.0 * (compact.aa(-r) - delta)).norm() < 1e-14);
            assert!((full.bb(r) + delta - 2.0 * (compact.bb(-r) + delta)).norm() < 1e-14);
            assert!((full.ab(r) - compact.ab(-r)).norm() < 1e-14);
        }
    }

    #[test]
    fn pfaffian_small_cases() {
        let a = Complex64::new(0.3, -1.2);
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, a, -a, ZERO]);
        assert_eq!(pfaffian(&m).unwrap(), a);

        let v: Vec<Complex64> = (1..=6).map(|x| Complex64::new(x as f64, 0.5 * x as f64)).collect();
        let (a12, a13, a14, a23, a24, a34) = (v[0], v[1], v[2], v[3], v[4], v[5]);
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                ZERO, a12, a13, a14, -a12, ZERO, a23, a24, -a13, -a23, ZERO, a34, -a14, -a24,
                -a34, ZERO,
            ],
        );
        let expect = a12 * a34 - a13 * a24 + a14 * a23;
        assert!((pfaffian(&m).unwrap() - expect).norm() < 1e-14);
        assert!((pfaffian_reduce(m) - expect).norm() < 1e-12);
    }

    #[test]
    fn pfaffian_rejects_bad_input() {
        let m = DMatrix::from_element(3, 3, ZERO);
        assert!(pfaffian(&m).is_err());
        let mut m = DMatrix::from_element(4, 4, ZERO);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        m[(1, 0)] = Complex64::new(1.0, 0.0);
        assert!(pfaffian(&m).is_err());
    }

    fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(n, n, ZERO);
        for i in 0..n {
            for j in i + 1..n {
                let z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                m[(i, j)] = z;
                m[(j, i)] = -z;
            }
        }
        m
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..200 {
            let n = 2 * (1 + trial % 6);
            let m = random_skew(n, &mut rng);
            let pf = pfaffian(&m).unwrap();
            let det = m.clone().determinant();
            assert!(
                (pf * pf - det).norm() <= 1e-8 * det.norm().max(1e-300),
                "n = {n}: pf² = {}, det = {det}",
                pf * pf
            );
        }
    }

    #[test]
    fn pfaffian_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4, 6] {
            let m = random_skew(n, &mut rng);
            let idx: Vec<usize> = (0..n).collect();
            let a = pfaffian_expand(&m, &idx);
            let b = pfaffian_reduce(m);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_pfaffian_route() {
        for seed in 0..5 {
            let states = random_states(16, 100 + seed);
            let corr = ab_correlators(&states, 3).unwrap();
            for r in [1, 2] {
                let closed = spin_correlators(&corr, r).unwrap();
                let general = spin_correlators_general(&corr, r).unwrap();
                assert!(closed.max_difference(&general) < 1e-10, "r = {r}");
            }
        }
    }

    #[test]
    fn fully_mixed_spin_correlators_vanish() {
        let corr = ab_correlators(&mixed_states(12, 0.8), 3).unwrap();
        assert!(onsite_sz(&corr).abs() < 1e-15);
        for r in 1..=3 {
            let s = spin_correlators(&corr, r).unwrap();
            for v in [s.xx, s.yy, s.zz, s.xy, s.yx] {
                assert!(v.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn polarized_limit() {
        let corr = ab_correlators(&ground_states(20, 1e6), 2).unwrap();
        assert_abs_diff_eq!(onsite_sz(&corr), -0.5, epsilon = 1e-6);
        let s = spin_correlators(&corr, 1).unwrap();
        assert_abs_diff_eq!(s.zz.re, 0.25, epsilon = 1e-6);
        assert!(s.xx.norm() < 1e-6);
    }

    #[test]
    fn out_of_range_is_rejected() {
        let corr = ab_correlators(&ground_states(8, 0.5), 1).unwrap();
        assert!(spin_correlators_r2(&corr).is_err());
        assert!(spin_correlators_general(&corr, 2).is_err());
        assert!(spin_correlators_general(&corr, 0).is_err());
    }

    proptest! {
        #[test]
        fn anticommutation_sum_rule(seed in 0u64..10_000, half in 2usize..12) {
            let states = random_states(2 * half, seed);
            for r in -3..=3_i64 {
                let p = fermion_pairs(&states, r).unwrap();
                let delta = if r == 0 { 1.0 } else { 0.0 };
                prop_assert!((p.c_cdag + p.cdag_c - delta).norm() < 1e-10);
            }
            let corr = ab_correlators(&states, 2).unwrap();
            prop_assert!((corr.aa(0) - 1.0).norm() < 1e-10);
            prop_assert!((corr.bb(0) + 1.0).norm() < 1e-10);
        }

        #[test]
        fn spin_correlators_are_real_and_bounded(seed in 0u64..10_000, half in 3usize..10) {
            let states = random_states(2 * half, seed);
            let corr = ab_correlators(&states, 2).unwrap();
            prop_assert!(onsite_sz(&corr).abs() <= 0.5 + 1e-9);
            for r in [1, 2] {
                let s = spin_correlators(&corr, r).unwrap();
                prop_assert!(s.imaginary_residue() < 1e-9);
                for v in [s.xx, s.yy, s.zz, s.xy, s.yx] {
                    prop_assert!(v.re.abs() <= 0.25 + 1e-9);
                }
            }
        }

        #[test]
        fn equilibrium_reduction(h0 in -4.0f64..4.0, half in 2usize..16) {
            let n = 2 * half;
            let states = ground_states(n, h0);
            let corr = ab_correlators(&states, 5.min(half)).unwrap();
            let r_max = corr.r_max() as i64;
            for r in -r_max..=r_max {
                let delta = if r == 0 { 1.0 } else { 0.0 };
                prop_assert!((corr.aa(r) - delta).norm() < 1e-12);
                prop_assert!((corr.bb(r) + delta).norm() < 1e-12);
                // Sum over both signs of k of cos(kr' + 2θ_k) at r' = -r.
                let expect: f64 = states.iter()
                    .map(|s| 2.0 * (-s.k * r as f64 + 2.0 * s.theta_k).cos())
                    .sum::<f64>() / n as f64;
                prop_assert!((corr.ab(r).re - expect).abs() < 1e-12);
            }
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Two-spin reduced density matrices and Wootters concurrence.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::SpinCorrelators;
use crate::error::{QuenchError, Result};

/// Smallest admissible eigenvalue of a reduced two-spin state.
pub const KAPPA_POSITIVITY_TOLERANCE: f64 = 1e-7;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reduced density matrix of two spins in the basis `↑↑, ↑↓, ↓↑, ↓↓`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTwoSpinState {
    kappa: Matrix4<Complex64>,
}

impl ReducedTwoSpinState {
    /// Builds the X-shaped matrix from the one-point function and the two-point
    /// correlators of one separation. Imaginary residues of the correlators
    /// are discarded.
    pub fn from_correlators(sz: f64, spin: &SpinCorrelators) -> Result<Self> {
        let (xx, yy, zz, xy, yx) = (spin.xx.re, spin.yy.re, spin.zz.re, spin.xy.re, spin.yx.re);
        let i = Complex64::i();
        let k11 = Complex64::new(sz + zz + 0.25, 0.0);
        let k22 = Complex64::new(0.25 - zz, 0.0);
        let k44 = Complex64::new(-sz + zz + 0.25, 0.0);
        let k23 = xx + yy + i * (xy - yx);
        let k14 = xx - yy - i * (xy + yx);
        #[rustfmt::skip]
        let kappa = Matrix4::new(
            k11,         ZERO,        ZERO, k14,
            ZERO,        k22,         k23,  ZERO,
            ZERO,        k23.conj(),  k22,  ZERO,
            k14.conj(),  ZERO,        ZERO, k44,
        );
        Self::from_matrix(kappa)
    }

    /// Wraps an arbitrary two-spin density matrix after validating it.
    pub fn from_matrix(kappa: Matrix4<Complex64>) -> Result<Self> {
        let tr = kappa.trace();
        if (tr - 1.0).norm() > 1e-6 {
            return Err(QuenchError::input(format!("reduced state has trace {tr}")));
        }
        let herm = (kappa - kappa.adjoint()).norm();
        if herm > 1e-9 {
            return Err(QuenchError::input(format!(
                "reduced state is not Hermitian (defect {herm:.3e})"
            )));
        }
        let state = Self { kappa };
        let lmin = state.min_eigenvalue();
        if lmin < -KAPPA_POSITIVITY_TOLERANCE {
            return Err(QuenchError::Positivity {
                k: f64::NAN,
                t: f64::NAN,
                detail: format!("reduced two-spin state has eigenvalue {lmin:.3e}"),
            });
        }
        Ok(state)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.kappa
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.kappa + self.kappa.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }
}

/// Reduced state of two spins from correlators; see
/// [`ReducedTwoSpinState::from_correlators`].
pub fn reduced_rho(sz: f64, spin: &SpinCorrelators) -> Result<ReducedTwoSpinState> {
    ReducedTwoSpinState::from_correlators(sz, spin)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceValue {
    pub c: f64,
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub lambdas: [f64; 4],
}

/// Wootters concurrence from the spectrum of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence(rho: &ReducedTwoSpinState) -> ConcurrenceValue {
    concurrence_of_matrix(&rho.kappa)
}

/// Concurrence of an arbitrary 4×4 density matrix.
pub fn concurrence_of_matrix(rho: &Matrix4<Complex64>) -> ConcurrenceValue {
    // σ_y⊗σ_y is real and antidiagonal: (-1, +1, +1, -1) on the antidiagonal.
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let yy = Matrix4::new(
        ZERO, ZERO, ZERO, -one,
        ZERO, ZERO, one,  ZERO,
        ZERO, one,  ZERO, ZERO,
        -one, ZERO, ZERO, ZERO,
    );
    let flipped = yy * rho.conjugate() * yy;
    let product = rho * flipped;
    let eig = product
        .schur()
        .eigenvalues()
        .expect("complex Schur form always has an eigenvalue diagonal");
    let mut lambdas = [0.0; 4];
    for (l, mu) in lambdas.iter_mut().zip(eig.iter()) {
        *l = mu.re.max(0.0).sqrt();
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    ConcurrenceValue { c, lambdas }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix2, Vector4};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn projector(v: Vector4<Complex64>) -> Matrix4<Complex64> {
        let v = v / Complex64::new(v.norm(), 0.0);
        v * v.adjoint()
    }

    /// Closed form for X-shaped states, used as an independent check.
    fn x_state_concurrence(m: &Matrix4<Complex64>) -> f64 {
        let a = m[(1, 2)].norm() - (m[(0, 0)].re * m[(3, 3)].re).max(0.0).sqrt();
        let b = m[(0, 3)].norm() - (m[(1, 1)].re * m[(2, 2)].re).max(0.0).sqrt();
        2.0 * a.max(b).max(0.0)
    }

    fn spin_set(xx: f64, yy: f64, zz: f64, xy: f64, yx: f64) -> SpinCorrelators {
        SpinCorrelators { r: 1, xx: c(xx), yy: c(yy), zz: c(zz), xy: c(xy), yx: c(yx) }
    }

    #[test]
    fn maximally_mixed_pair() {
        let rho = reduced_rho(0.0, &spin_set(0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!((rho.matrix() - Matrix4::identity() * c(0.25)).norm() < 1e-15);
        assert_eq!(concurrence(&rho).c, 0.0);
    }

    #[test]
    fn polarized_pair() {
        let rho = reduced_rho(-0.5, &spin_set(0.0, 0.0, 0.25, 0.0, 0.0)).unwrap();
        let mut expect = Matrix4::zeros();
        expect[(3, 3)] = c(1.0);
        assert!((rho.matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn bell_and_product_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bells = [
            Vector4::new(c(s), c(0.0), c(0.0), c(s)),
            Vector4::new(c(0.0), c(s), c(-s), c(0.0)),
            Vector4::new(c(0.0), c(s), Complex64::new(0.0, s), c(0.0)),
        ];
        for b in bells {
            assert_abs_diff_eq!(concurrence_of_matrix(&projector(b)).c, 1.0, epsilon = 1e-10);
        }
        let a = [Complex64::new(0.6, 0.1), Complex64::new(-0.3, 0.7)];
        let b = [Complex64::new(0.2, -0.5), Complex64::new(0.9, 0.0)];
        let product = Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
        assert!(concurrence_of_matrix(&projector(product)).c < 1e-7);
    }

    #[test]
    fn werner_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = projector(Vector4::new(c(s), c(0.0), c(0.0), c(s)));
        for p in [0.2, 0.5, 0.8] {
            let m = bell * c(p) + Matrix4::identity() * c(0.25 * (1.0 - p));
            let expect = (0.5 * (3.0 * p - 1.0)).max(0.0);
            assert_abs_diff_eq!(concurrence_of_matrix(&m).c, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_invalid_states() {
        // zz = 0.4 gives κ₂₂ < 0.
        assert!(matches!(
            reduced_rho(0.0, &spin_set(0.0, 0.0, 0.4, 0.0, 0.0)),
            Err(QuenchError::Positivity { .. })
        ));
        let mut m = Matrix4::identity() * c(0.3);
        assert!(ReducedTwoSpinState::from_matrix(m).is_err());
        m = Matrix4::identity() * c(0.25);
        m[(0, 1)] = c(0.1);
        assert!(ReducedTwoSpinState::from_matrix(m).is_err());
    }

    fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
        let a: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let (p1, p2, p3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let e = |x: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * x);
        Matrix2::new(
            e(p1) * a.cos(),
            e(p2) * a.sin(),
            -e(-p2) * e(p3) * a.sin(),
            e(-p1) * e(p3) * a.cos(),
        )
    }

    fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
    }

    /// Random valid X-shaped reduced state from random correlators.
    fn random_x_state(rng: &mut ChaCha8Rng) -> Option<ReducedTwoSpinState> {
        let mut u = |s: f64| s * (2.0 * rng.random::<f64>() - 1.0);
        let sz = u(0.5);
        let set = spin_set(u(0.25), u(0.25), u(0.25), u(0.25), u(0.25));
        reduced_rho(sz, &set).ok()
    }

    #[test]
    fn general_route_matches_x_state_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 300 {
            if let Some(rho) = random_x_state(&mut rng) {
                let general = concurrence(&rho).c;
                let closed = x_state_concurrence(rho.matrix());
                assert_abs_diff_eq!(general, closed, epsilon = 1e-8);
                checked += 1;
            }
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        while checked < 100 {
            if let Some(rho) = random_x_state(&mut rng) {
                let u = kron(&random_unitary(&mut rng), &random_unitary(&mut rng));
                let rotated = u * rho.matrix() * u.adjoint();
                let a = concurrence(&rho).c;
                let b = concurrence_of_matrix(&rotated).c;
                assert_abs_diff_eq!(a, b, epsilon = 1e-8);
                checked += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn mixing_with_identity_never_increases(seed in 0u64..100_000, p in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Some(rho) = random_x_state(&mut rng) {
                let mixed = rho.matrix() * c(1.0 - p) + Matrix4::identity() * c(0.25 * p);
                let before = concurrence(&rho);
                let after = concurrence_of_matrix(&mixed);
                prop_assert!(after.c <= before.c + 1e-10);
                prop_assert!(before.c <= 1.0 + 1e-9);
                prop_assert!(before.lambdas.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use proptest::prelude::*;
use quenchlab::dynamics::{evolve_mode, evolve_mode_readouts, IntegratorParams};
use quenchlab::model::{build_grid, NoiseSpec, QuenchProtocol};
use quenchlab::observables::landau_zener_reference;

fn deep_ramp(tau: f64) -> QuenchProtocol {
    QuenchProtocol::new(-30.0, 30.0, tau).unwrap()
}

#[test]
fn halving_the_step_bound_changes_nothing_at_reference_run() {
    let grid = build_grid(200).unwrap();
    let protocol = deep_ramp(10.0);
    let noise = NoiseSpec::white(0.01);
    let coarse = IntegratorParams::default();
    let fine = coarse.halved();
    let mut worst: f64 = 0.0;
    for &k in grid.momenta() {
        let a = evolve_mode(k, &protocol, &noise, protocol.t_f(), &coarse).unwrap();
        let b = evolve_mode(k, &protocol, &noise, protocol.t_f(), &fine).unwrap();
        for (x, y) in a.bloch().iter().zip(b.bloch()) {
            worst = worst.max((x - y).abs());
        }
    }
    // Matrix elements are half the Bloch components.
    assert!(0.5 * worst <= 1e-8, "max element change {:.3e}", 0.5 * worst);
}

#[test]
fn deep_ramp_excitation_near_landau_zener() {
    let k = PI / 200.0;
    let protocol = deep_ramp(2.0);
    let state = evolve_mode(k, &protocol, &NoiseSpec::noiseless(), protocol.t_f(), &IntegratorParams::default()).unwrap();
    let d22 = quenchlab::dynamics::to_diagonal_basis(&state, protocol.h_f).d22;
    let p = landau_zener_reference(k, 2.0).unwrap();
    assert!((d22 - p).abs() < 0.05, "d22 {d22} vs {p}");
}

#[test]
fn deep_ramp_excitation_follows_exact_two_level_formula() {
    // For H = -h σz + Δ σy with h swept at rate 1/τ, the asymptotic
    // excitation probability is exp(-π Δ² τ), Δ = sin k.
    let protocol = QuenchProtocol::new(-200.0, 200.0, 3.0).unwrap();
    let params = IntegratorParams::default();
    for k in [0.2, 0.35, 0.5] {
        let state = evolve_mode(k, &protocol, &NoiseSpec::noiseless(), protocol.t_f(), &params).unwrap();
        let d22 = quenchlab::dynamics::to_diagonal_basis(&state, protocol.h_f).d22;
        let s = f64::sin(k);
        let exact = (-PI * s * s * 3.0).exp();
        assert!((d22 - exact).abs() < 5e-3, "k {k}: d22 {d22} vs {exact}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn purity_never_increases_with_noise(k in 0.01f64..3.13, tau in 0.2f64..6.0, xi in 0.001f64..0.2) {
        let protocol = QuenchProtocol::new(-5.0, 5.0, tau).unwrap();
        let times: Vec<f64> = (0..=40).map(|i| protocol.t_i + protocol.duration() * i as f64 / 40.0).collect();
        let states = evolve_mode_readouts(k, &protocol, &NoiseSpec::white(xi), &times, &IntegratorParams::default()).unwrap();
        for w in states.windows(2) {
            prop_assert!(w[1].purity() <= w[0].purity() + 1e-12);
        }
        for s in &states {
            prop_assert!((s.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(s.hermiticity_defect() < 1e-12);
            prop_assert!(s.min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn noiseless_purity_is_conserved(k in 0.01f64..3.13, tau in 0.2f64..6.0) {
        let protocol = QuenchProtocol::new(-5.0, 5.0, tau).unwrap();
        let s = evolve_mode(k, &protocol, &NoiseSpec::noiseless(), protocol.t_f(), &IntegratorParams::default()).unwrap();
        prop_assert!((s.purity() - 1.0).abs() < 1e-10);
    }
}

//! Torus states and Floquet evolution: unitarity, dense-matrix oracle, echo
//! invariants and determinism.

use std::f64::consts::{PI, TAU};

use echolab_core::analysis::saturation_check;
use echolab_core::maps::{echo_values, ensemble_echo, loschmidt_echo, EnsembleSpec, FloquetOperator, KickedModel};
use echolab_core::rng::task_rng;
use echolab_core::torus::{gaussian_packet, GaussianPacketSpec, Representation, StateVector, TorusGrid};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_state(grid: TorusGrid, seed: u64) -> StateVector {
    let mut rng = task_rng(seed, 0);
    let amps = (0..grid.dim())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    StateVector::normalized(amps, Representation::Position, grid).unwrap()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn model(rotator: bool, k: f64) -> KickedModel {
    if rotator {
        KickedModel::rotator(k).unwrap()
    } else {
        KickedModel::sawtooth(k).unwrap()
    }
}

/// `U = exp(-i p̂²/2ħ) exp(-i (K+ε) V(r̂)/ħ)` as a dense matrix in the position
/// basis, built straight from the definition: the kinetic factor is summed
/// over the centered momenta `l` with `p = ħl`.
fn dense_floquet(m: KickedModel, n: usize, sigma: f64) -> Vec<Vec<Complex64>> {
    let hbar = TAU / n as f64;
    let ls: Vec<i64> = (-(n as i64) / 2..(n as i64 + 1) / 2).collect();
    assert_eq!(ls.len(), n);
    let strength = m.k + sigma * hbar;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|jj| {
                    let r = TAU * jj as f64 / n as f64;
                    let kick = Complex64::from_polar(1.0, -strength * m.kind.potential(r) / hbar);
                    let kin: Complex64 = ls
                        .iter()
                        .map(|&l| {
                            let p = hbar * l as f64;
                            let phase = p * (TAU * (j as f64 - jj as f64) / n as f64) / hbar - p * p / (2.0 * hbar);
                            Complex64::from_polar(1.0 / n as f64, phase)
                        })
                        .sum();
                    kin * kick
                })
                .collect()
        })
        .collect()
}

fn mat_vec(u: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

#[test]
fn norm_is_kept_over_ten_thousand_steps() {
    let grid = TorusGrid::new(8192).unwrap();
    for m in [model(false, 2.0), model(true, 15.0)] {
        let op = FloquetOperator::new(m, grid, 20.5).unwrap();
        let mut psi = random_state(grid, 1).into_amplitudes();
        for _ in 0..10_000 {
            op.apply(&mut psi);
        }
        assert!((norm(&psi) - 1.0).abs() < 1e-10, "{:?}: {}", m.kind, norm(&psi));
    }
}

#[test]
fn fft_evolution_matches_dense_definition() {
    for n in [2usize, 3, 4, 7, 8, 13, 16] {
        for (m, sigma) in [(model(false, 2.0), 0.5), (model(true, 11.0), 0.3), (model(true, 1.7), 3.0)] {
            let grid = TorusGrid::new(n).unwrap();
            let op = FloquetOperator::new(m, grid, sigma).unwrap();
            let u = dense_floquet(m, n, sigma);
            let mut psi = random_state(grid, n as u64).into_amplitudes();
            for step in 0..20 {
                let expect = mat_vec(&u, &psi);
                op.apply(&mut psi);
                let err = psi.iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-12, "N={n} {:?} step {step}: {err:e}", m.kind);
                // keep the comparison per step
                psi = expect;
            }
        }
    }
}

#[test]
fn echo_equals_the_forward_backward_overlap() {
    let n = 16;
    let m = model(false, 2.0);
    let grid = TorusGrid::new(n).unwrap();
    let u0 = dense_floquet(m, n, 0.0);
    let u1 = dense_floquet(m, n, 1.5);
    let psi = gaussian_packet(&GaussianPacketSpec::coherent(1.0, 2.0, &grid).unwrap(), &grid);
    let ops = (
        FloquetOperator::new(m, grid, 0.0).unwrap(),
        FloquetOperator::new(m, grid, 1.5).unwrap(),
    );
    let fast = echo_values(&ops.0, &ops.1, &psi, 12).unwrap();
    // ⟨ψ|U₀†ᵗ U₁ᵗ|ψ⟩: apply U₁ t times, then U₀† t times
    let adjoint: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| u0[j][i].conj()).collect()).collect();
    for (t, &m_fast) in fast.iter().enumerate() {
        let mut v = psi.amplitudes().to_vec();
        for _ in 0..t {
            v = mat_vec(&u1, &v);
        }
        for _ in 0..t {
            v = mat_vec(&adjoint, &v);
        }
        let amp: Complex64 = psi.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        assert!((amp.norm_sqr() - m_fast).abs() < 1e-12, "t={t}");
    }
}

#[test]
fn saturation_sits_at_one_over_n() {
    let n = 64;
    let grid = TorusGrid::new(n).unwrap();
    let s = ensemble_echo(model(false, 2.0), 3.0, grid, &EnsembleSpec::new(40, 2), 80).unwrap();
    let sat = saturation_check(&s, n, 20.0, 80.0).unwrap();
    assert!((0.5..=2.0).contains(&sat.ratio), "ratio {}", sat.ratio);
}

#[test]
fn reruns_are_bit_identical() {
    let grid = TorusGrid::new(256).unwrap();
    let ens = EnsembleSpec::new(10, 77);
    let a = ensemble_echo(model(true, 11.0), 0.3, grid, &ens, 25).unwrap();
    let b = ensemble_echo(model(true, 11.0), 0.3, grid, &ens, 25).unwrap();
    assert_eq!(a, b);
    let c = ensemble_echo(model(true, 11.0), 0.3, grid, &EnsembleSpec::new(10, 78), 25).unwrap();
    assert_ne!(a.m, c.m);
}

#[test]
fn ensemble_mean_decreases_with_sigma() {
    let grid = TorusGrid::new(1024).unwrap();
    let ens = EnsembleSpec::new(30, 4);
    let at = |sigma: f64| ensemble_echo(model(false, 2.0), sigma, grid, &ens, 6).unwrap().m[6];
    let (a, b, c) = (at(0.1), at(0.2), at(0.4));
    assert!(a > b && b > c, "{a} {b} {c}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_sigma_never_decays(rot in any::<bool>(), k in 0.5f64..20.0, n in 4usize..200, r0 in 0.0..TAU, p0 in 0.0..TAU) {
        let grid = TorusGrid::new(n).unwrap();
        let spec = GaussianPacketSpec::coherent(r0, p0, &grid).unwrap();
        let s = loschmidt_echo(model(rot, k), 0.0, grid, &spec, 30).unwrap();
        for m in &s.m {
            prop_assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn echo_starts_at_one_and_stays_in_unit_interval(
        rot in any::<bool>(), k in 0.5f64..20.0, sigma in 0.0f64..25.0, n in 4usize..300, seed in any::<u64>()
    ) {
        let grid = TorusGrid::new(n).unwrap();
        let s = ensemble_echo(model(rot, k), sigma, grid, &EnsembleSpec::new(3, seed), 20).unwrap();
        prop_assert!((s.m[0] - 1.0).abs() < 1e-12);
        prop_assert!(s.check_invariants().is_ok());
    }

    #[test]
    fn dft_preserves_norm_and_round_trips(n in prop::sample::select(vec![8usize, 64, 1024, 12, 100]), seed in any::<u64>()) {
        let grid = TorusGrid::new(n).unwrap();
        let psi = random_state(grid, seed);
        let p = psi.clone().to_momentum().unwrap();
        prop_assert!((p.norm() - 1.0).abs() < 1e-12);
        let back = p.to_position().unwrap();
        let err = back.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn packet_circular_mean_is_the_center(r0 in 0.0..TAU, p0 in 0.0..TAU, xi in 0.05f64..(PI / 4.0)) {
        let grid = TorusGrid::new(2048).unwrap();
        let psi = gaussian_packet(&GaussianPacketSpec::new(r0, p0, xi).unwrap(), &grid);
        let z: Complex64 = psi
            .density()
            .iter()
            .enumerate()
            .map(|(j, w)| Complex64::from_polar(*w, grid.position(j)))
            .sum();
        let mean = z.arg().rem_euclid(TAU);
        let d = (mean - r0 + PI).rem_euclid(TAU) - PI;
        prop_assert!(d.abs() <= 0.02 * xi, "offset {d}");
    }
}

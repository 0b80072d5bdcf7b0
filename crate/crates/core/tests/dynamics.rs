//! Classical maps, semiclassical curves and the free-fermion Ising echo.

use std::f64::consts::TAU;

use echolab_core::classical::{
    self, action_diffusion, jacobian, lambda1_of_t, potential_correlation, sawtooth_lyapunov, ActionHistogram,
    PhasePoint, TangentInit,
};
use echolab_core::ising::{ising_echo, uniform_times, IsingQuench};
use echolab_core::maps::ModelKind;
use echolab_core::semiclassics::{fgr_prediction, lyapunov_prediction, many_mode_rate, regular_1d_prediction};
use echolab_core::classical::integrated_potential_samples;
use proptest::prelude::*;

fn kind(rot: bool) -> ModelKind {
    if rot {
        ModelKind::Rotator
    } else {
        ModelKind::Sawtooth
    }
}

proptest! {
    #[test]
    fn jacobian_preserves_area(rot in any::<bool>(), k in -30.0f64..30.0, r in 0.0..TAU, p in 0.0..TAU) {
        let j = jacobian(kind(rot), k, PhasePoint::new(r, p));
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        prop_assert!((det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_lambda1_is_the_lyapunov_exponent(k in 0.2f64..5.0, seed in any::<u64>()) {
        let l1 = lambda1_of_t(ModelKind::Sawtooth, k, 100, 12, TangentInit::default(), seed).unwrap();
        let exact = sawtooth_lyapunov(k);
        for v in &l1.values {
            prop_assert!((v - exact).abs() < 1e-9 * exact.max(1.0), "{v} vs {exact}");
        }
    }

    #[test]
    fn histogram_moments_match_streamed_moments(samples in prop::collection::vec(-50.0f64..50.0, 1..400)) {
        let h = ActionHistogram::from_samples(&samples, 0.05).unwrap();
        let (mean, var) = h.binned_moments();
        prop_assert!((mean - h.mean).abs() < 1e-10);
        prop_assert!((var - h.variance).abs() < 1e-10 * (1.0 + h.variance));
    }

    #[test]
    fn prediction_curves_are_positive(sigma in 0.0f64..2.0, r in 0.01f64..2.0, gamma in 0.0f64..3.0, xi in 0.0f64..3.0, c0 in 0.1f64..1.0) {
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let f = fgr_prediction(sigma, r, &t).unwrap();
        prop_assert_eq!(f.m[0], 1.0);
        // ln M exactly linear in t
        for w in f.m.windows(3) {
            let d = (w[2].ln() - w[1].ln()) - (w[1].ln() - w[0].ln());
            prop_assert!(d.abs() < 1e-12 * (1.0 - w[2].ln()));
        }
        let g = regular_1d_prediction(gamma, xi, c0, &t).unwrap();
        prop_assert!(g.m.iter().all(|m| *m >= 0.0));
        prop_assert!(g.m[1] <= 1.0f64.max(c0));
    }

    #[test]
    fn ising_mode_factors_lie_in_unit_interval(n_p in 2usize..300, l0 in 0.2f64..2.0, l in 0.2f64..2.0, t in 0.0f64..200.0) {
        let q = IsingQuench::new(n_p, l0, l).unwrap();
        for mode in q.modes() {
            let f = mode.log_factor(t).exp();
            prop_assert!((0.0..=1.0).contains(&f));
        }
        let s = ising_echo(&q, &[0.0, t.max(1e-3)]).unwrap();
        prop_assert!(s.check_invariants().is_ok());
    }
}

#[test]
fn lyapunov_prediction_passes_through_its_anchor() {
    let l1 = lambda1_of_t(ModelKind::Sawtooth, 2.0, 100, 10, TangentInit::default(), 1).unwrap();
    let t: Vec<f64> = (0..=10).map(f64::from).collect();
    let c = lyapunov_prediction(&l1, &t, (4.0, 0.01)).unwrap();
    assert!((c.m[4] - 0.01).abs() < 1e-15);
    let lam = sawtooth_lyapunov(2.0);
    assert!((c.m[5] / c.m[4] - (-lam).exp()).abs() < 1e-9);
}

#[test]
fn many_mode_rate_agrees_with_correlation_sum() {
    // both estimate R for the sawtooth at K = 2 (π⁴/90 exactly)
    let corr = potential_correlation(ModelKind::Sawtooth, 2.0, 20, 16, 50_000, 3).unwrap();
    let r_corr = action_diffusion(&corr).r;
    let t = 40;
    let s = integrated_potential_samples(ModelKind::Sawtooth, 2.0, t, 40_000, 5);
    let r_mm = many_mode_rate(&s, t as f64).unwrap();
    assert!((r_mm / r_corr - 1.0).abs() < 0.05, "{r_mm} vs {r_corr}");
}

#[test]
fn ising_echo_revives_at_finite_size() {
    let n_p = 24;
    let q = IsingQuench::new(n_p, 0.96, 0.99).unwrap();
    let t = uniform_times(0.01, 24_000);
    let s = ising_echo(&q, &t).unwrap();
    let dip = s.m.iter().position(|m| *m < 0.96).expect("echo decays first");
    let revival = s.m[dip..].iter().position(|m| *m > 0.99);
    assert!(revival.is_some(), "no revival before t = {}", 10 * n_p);
}

#[test]
fn classical_trajectories_are_seed_reproducible() {
    let a = classical::log_stretch_path(ModelKind::Rotator, 15.0, 50, TangentInit::Random, 3, 17);
    let b = classical::log_stretch_path(ModelKind::Rotator, 15.0, 50, TangentInit::Random, 3, 17);
    assert_eq!(a, b);
}

//! Free-fermion product formula against dense exact diagonalization.

use echolab::ed;
use echolab_core::ising::{ground_state_energy, ising_log_echo, uniform_times, IsingQuench};

const PAIRS: [(f64, f64); 2] = [(0.8, 1.1), (0.96, 0.99)];

fn times() -> Vec<f64> {
    // 200 points on [0, 19.9]
    uniform_times(0.1, 199)
}

#[test]
fn product_formula_matches_exact_diagonalization() {
    let t = times();
    assert_eq!(t.len(), 200);
    for n_p in [8, 10] {
        for (l0, l) in PAIRS {
            let ff = ising_log_echo(&IsingQuench::new(n_p, l0, l).unwrap(), &t);
            let exact = ed::survival_probability(n_p, l0, l, &t).unwrap();
            let worst = ff
                .iter()
                .zip(&exact)
                .map(|(a, b)| (a - b.ln()).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-8, "N_p={n_p} ({l0},{l}): max |ΔlnM| = {worst:e}");
        }
    }
}

#[test]
fn ground_energy_matches_exact_diagonalization() {
    for lambda in [0.5, 0.99, 1.0, 1.3] {
        let (e0, _) = ed::ground_state(8, lambda).unwrap();
        let ff = ground_state_energy(8, lambda).unwrap();
        assert!((e0 - ff).abs() < 1e-10, "λ={lambda}: {e0} vs {ff}");
    }
}

#[test]
fn pinned_survival_probability() {
    // N_p = 8, (0.8, 1.1), t = 1; the reference value is the four-mode
    // product evaluated by hand in double precision
    let m = ed::survival_probability(8, 0.8, 1.1, &[1.0]).unwrap()[0];
    assert!((m - GOLDEN).abs() < 1e-12, "got {m:.15}");
}

const GOLDEN: f64 = 0.721_833_145_702_722;

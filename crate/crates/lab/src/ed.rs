//! Exact diagonalization of the periodic transverse-field Ising chain.
//!
//! Used as an independent oracle for the free-fermion product formula: the
//! Hamiltonian is built directly in the σᶻ product basis and diagonalized
//! densely, so no Jordan-Wigner convention enters.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

/// Largest chain handled by the dense solver (`2^12 = 4096` states).
pub const MAX_SPINS: usize = 12;

#[derive(Debug, Error)]
pub enum EdError {
    #[error("chain of {0} spins exceeds the exact-diagonalization limit of {MAX_SPINS}")]
    TooLarge(usize),
    #[error("need at least two spins, got {0}")]
    TooSmall(usize),
    #[error("ground state of H({lambda}) is degenerate (gap {gap:e})")]
    DegenerateGround { lambda: f64, gap: f64 },
}

/// `H(λ) = -Σ_j (σᶻ_j σᶻ_{j+1} + λ σˣ_j)` with `σᶻ_{N+1} = σᶻ_1`.
/// Bit `j` of a basis index set means spin `j` points down.
pub fn hamiltonian(n_p: usize, lambda: f64) -> Result<DMatrix<f64>, EdError> {
    if n_p < 2 {
        return Err(EdError::TooSmall(n_p));
    }
    if n_p > MAX_SPINS {
        return Err(EdError::TooLarge(n_p));
    }
    let dim = 1usize << n_p;
    let mut h = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let spin = |j: usize| if b >> (j % n_p) & 1 == 0 { 1.0 } else { -1.0 };
        let zz: f64 = (0..n_p).map(|j| spin(j) * spin(j + 1)).sum();
        h[(b, b)] = -zz;
        for j in 0..n_p {
            h[(b ^ (1 << j), b)] -= lambda;
        }
    }
    Ok(h)
}

/// Spectrum and eigenvectors, eigenvalues ascending.
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn diagonalize(n_p: usize, lambda: f64) -> Result<Spectrum, EdError> {
    let eig = SymmetricEigen::new(hamiltonian(n_p, lambda)?);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok(Spectrum { energies, vectors })
}

pub fn ground_state(n_p: usize, lambda: f64) -> Result<(f64, DVector<f64>), EdError> {
    let s = diagonalize(n_p, lambda)?;
    let gap = s.energies[1] - s.energies[0];
    if gap < 1e-9 {
        return Err(EdError::DegenerateGround { lambda, gap });
    }
    Ok((s.energies[0], s.vectors.column(0).into_owned()))
}

/// Survival probability `|⟨ψ₀|e^{-iH(λ)t}|ψ₀⟩|²` of the ground state of `H(λ₀)`.
pub fn survival_probability(n_p: usize, lambda0: f64, lambda: f64, times: &[f64]) -> Result<Vec<f64>, EdError> {
    let (_, psi0) = ground_state(n_p, lambda0)?;
    let s = diagonalize(n_p, lambda)?;
    let weights: Vec<f64> = (0..s.energies.len())
        .map(|n| s.vectors.column(n).dot(&psi0).powi(2))
        .collect();
    Ok(times
        .iter()
        .map(|&t| {
            let (re, im) = s
                .energies
                .iter()
                .zip(&weights)
                .fold((0.0, 0.0), |(re, im), (e, w)| (re + w * (e * t).cos(), im - w * (e * t).sin()));
            re * re + im * im
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_is_symmetric_with_known_limits() {
        let h = hamiltonian(4, 0.7).unwrap();
        assert_eq!(h, h.transpose());
        // all spins up: every bond satisfied
        assert_eq!(h[(0, 0)], -4.0);
        // classical ferromagnet: both polarized states are ground states
        assert!(matches!(ground_state(4, 0.0), Err(EdError::DegenerateGround { .. })));
        // deep paramagnet: E₀ → -Nλ
        let (e0, _) = ground_state(6, 50.0).unwrap();
        assert!((e0 / (-6.0 * 50.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn size_limits() {
        assert!(matches!(hamiltonian(13, 1.0), Err(EdError::TooLarge(13))));
        assert!(matches!(hamiltonian(1, 1.0), Err(EdError::TooSmall(1))));
    }

    #[test]
    fn trivial_quench_survives() {
        let m = survival_probability(6, 0.8, 0.8, &[0.0, 1.0, 5.0]).unwrap();
        for v in m {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }
}

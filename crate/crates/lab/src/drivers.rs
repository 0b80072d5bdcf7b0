//! Worker-pool versions of the core's ensemble and trajectory loops.
//!
//! Every task draws from its own random stream (see `echolab_core::rng`), and
//! results are collected in task order before any reduction. Per-task vectors
//! are reduced exactly as the sequential core functions do, so those drivers
//! return bit-identical results whatever the pool size. Λ₁(t) is reduced in
//! fixed-size chunks of trajectories, which keeps it independent of the pool
//! size too.

use echolab_core::classical::{
    self, combine_correlations, log_stretch_path, lyapunov_from_rates, lyapunov_rate,
    trajectory_correlation, transpose_paths, ActionSampling, CorrelationSeries, Lambda1Accumulator, Lambda1Series,
    LyapunovEstimate, TangentInit,
};
use echolab_core::ising::{ising_echo, IsingQuench};
use echolab_core::maps::{ensemble_series, EchoPair, EnsembleSpec, KickedModel, ModelKind};
use echolab_core::torus::TorusGrid;
use echolab_core::{EchoSeries, Error, Result};
use rayon::prelude::*;

/// Trajectories per Λ₁ accumulation chunk.
pub const LAMBDA1_CHUNK: usize = 4096;

fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}

pub fn ensemble_echo(
    model: KickedModel,
    sigma: f64,
    grid: TorusGrid,
    ens: &EnsembleSpec,
    t_max: usize,
) -> Result<EchoSeries> {
    if ens.n_states < 1 {
        return Err(invalid("n_states", "need at least one state"));
    }
    let pair = EchoPair::new(model, sigma, grid)?;
    let members = (0..ens.n_states)
        .into_par_iter()
        .map(|i| pair.member_echo(ens, i, t_max))
        .collect::<Result<Vec<_>>>()?;
    ensemble_series(model, sigma, grid, ens, &members)
}

pub fn potential_correlation(
    kind: ModelKind,
    k: f64,
    l_max: usize,
    n_traj: usize,
    length: usize,
    seed: u64,
) -> Result<CorrelationSeries> {
    if length <= l_max {
        return Err(invalid("length", "trajectories must be longer than l_max"));
    }
    let per: Vec<Vec<f64>> = (0..n_traj)
        .into_par_iter()
        .map(|i| trajectory_correlation(kind, k, l_max, length, seed, i))
        .collect();
    combine_correlations(kind, k, &per)
}

pub fn lyapunov_exponent(kind: ModelKind, k: f64, n_traj: usize, t_max: usize, seed: u64) -> Result<LyapunovEstimate> {
    if t_max < 1000 {
        return Err(invalid("t_max", "Lyapunov estimate needs at least 1000 steps"));
    }
    if n_traj < 1 {
        return Err(invalid("n_traj", "need at least one trajectory"));
    }
    let rates: Vec<f64> = (0..n_traj)
        .into_par_iter()
        .map(|i| lyapunov_rate(kind, k, t_max, seed, i))
        .collect();
    Ok(lyapunov_from_rates(&rates))
}

pub fn lambda1(
    kind: ModelKind,
    k: f64,
    n_traj: usize,
    t_max: usize,
    init: TangentInit,
    seed: u64,
) -> Result<Lambda1Series> {
    if n_traj < 100 {
        return Err(invalid("n_traj", "Λ₁(t) needs at least 100 trajectories"));
    }
    if t_max < 1 {
        return Err(invalid("t_max", "need at least one step"));
    }
    let chunks: Vec<Lambda1Accumulator> = (0..n_traj.div_ceil(LAMBDA1_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Lambda1Accumulator::new(t_max);
            for i in c * LAMBDA1_CHUNK..((c + 1) * LAMBDA1_CHUNK).min(n_traj) {
                acc.push_path(&log_stretch_path(kind, k, t_max, init, seed, i));
            }
            acc
        })
        .collect();
    let mut total = Lambda1Accumulator::new(t_max);
    for c in &chunks {
        total.merge(c);
    }
    Ok(total.finish())
}

/// `ΔS` samples indexed `[t][sample]`, as `classical::action_difference_samples`.
#[allow(clippy::too_many_arguments)]
pub fn action_difference_samples(
    kind: ModelKind,
    k: f64,
    sigma: f64,
    hbar: f64,
    sampling: &ActionSampling,
    t_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(invalid("hbar", "must be positive"));
    }
    let epsilon = sigma * hbar;
    let paths: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let x0 = classical::action_sample_start(sampling, hbar, seed, i);
            classical::action_difference_path(kind, k, epsilon, x0, t_max)
        })
        .collect();
    Ok(transpose_paths(&paths, t_max + 1))
}

/// Free-fermion echoes for several chain lengths on a shared time grid.
pub fn ising_echoes(n_ps: &[usize], lambda0: f64, lambda: f64, times: &[f64]) -> Result<Vec<EchoSeries>> {
    n_ps.par_iter()
        .map(|&n| ising_echo(&IsingQuench::new(n, lambda0, lambda)?, times))
        .collect()
}

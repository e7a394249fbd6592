//! Exact simulation of the density-profile jump process `X^N(t)`.
//!
//! From a lattice state `x` the process jumps to `x + l/N` with rate
//! `N * beta_l(x)`, `l` ranging over `+-e_i`. Sampling uses the direct
//! Gillespie method: an exponential holding time with the total rate,
//! then a channel chosen proportionally to its rate. This has the same law
//! as the random time-change construction with independent Poisson
//! processes `Y_l(N * int beta_l)`, but needs no bookkeeping of internal
//! clocks. All `2k` rates are recomputed from scratch after every event.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{jump_rate, DensityState, Grid, JumpDirection, LoopSpec};
use crate::rng::{replica_stream, stream_rng, SimRng};
use crate::trajectory::{Trajectory, TrajectoryKind, TrajectoryMeta};

/// Largest lumped state space [`density_generator`] will build.
pub const MAX_GENERATOR_STATES: usize = 20_000;

/// Default recording stride: every event up to `N = 1000`, then every
/// `ceil(N / 100)`-th event.
pub fn default_thinning(capacity: usize) -> usize {
    if capacity <= 1000 {
        1
    } else {
        capacity.div_ceil(100)
    }
}

/// Rates `N * beta_l(x)` of all `2k` channels, ordered as [`JumpDirection::all`].
fn channel_rates(spec: &LoopSpec, x: &[f64], out: &mut [f64]) {
    let n = spec.capacity() as f64;
    for i in 0..spec.k() {
        let e = spec.exponent(x, i);
        out[2 * i] = n * (1.0 - x[i]) * e.exp();
        out[2 * i + 1] = n * x[i] * (-e).exp();
    }
}

fn lattice_counts(spec: &LoopSpec, x0: &DensityState) -> Result<Vec<usize>> {
    match x0.grid() {
        Grid::Lattice(n) if n == spec.capacity() && x0.as_slice().len() == spec.k() => {
            Ok(x0.counts().expect("lattice state has counts"))
        }
        _ => Err(Error::InvalidState(format!(
            "initial state must be a length-{} point of the 1/{} grid",
            spec.k(),
            spec.capacity()
        ))),
    }
}

/// One exact sample path on `[0, t_end]` from the stream `(seed, 0)`.
///
/// `thinning = None` applies [`default_thinning`]. The initial state and the
/// state at `t_end` are always recorded.
pub fn ssa_simulate(
    spec: &LoopSpec,
    x0: &DensityState,
    t_end: f64,
    seed: u64,
    thinning: Option<usize>,
) -> Result<Trajectory> {
    ssa_simulate_stream(spec, x0, t_end, seed, 0, thinning)
}

/// As [`ssa_simulate`], drawing from an explicit stream id.
pub fn ssa_simulate_stream(
    spec: &LoopSpec,
    x0: &DensityState,
    t_end: f64,
    seed: u64,
    stream: u64,
    thinning: Option<usize>,
) -> Result<Trajectory> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::param(
            "t_end",
            format!("must be finite and >= 0, got {t_end}"),
        ));
    }
    let thinning = thinning.unwrap_or_else(|| default_thinning(spec.capacity()));
    if thinning == 0 {
        return Err(Error::param("thinning", "stride must be at least 1"));
    }
    let mut counts = lattice_counts(spec, x0)?;
    let mut rng = stream_rng(seed, stream);
    let k = spec.k();
    let cap = spec.capacity();
    let mut x: Vec<f64> = x0.as_slice().to_vec();
    let mut rates = vec![0.0; 2 * k];

    let mut traj = Trajectory::new(
        k,
        TrajectoryKind::Stochastic,
        TrajectoryMeta::Density {
            spec: spec.clone(),
            seed,
            stream,
            thinning,
        },
    );
    traj.push(0.0, &x);
    if t_end == 0.0 {
        return Ok(traj);
    }

    let mut t = 0.0;
    let mut events: u64 = 0;
    loop {
        channel_rates(spec, &x, &mut rates);
        let total: f64 = rates.iter().sum();
        if !(total > 0.0) {
            return Err(Error::AbsorbingState { time: t });
        }
        let wait: f64 = rng.sample::<f64, _>(Exp1) / total;
        if t + wait >= t_end {
            break;
        }
        t += wait;
        let channel = pick_channel(&rates, total, &mut rng);
        let i = channel / 2;
        if channel % 2 == 0 {
            counts[i] += 1;
        } else {
            counts[i] -= 1;
        }
        x[i] = counts[i] as f64 / cap as f64;
        events += 1;
        if events % thinning as u64 == 0 {
            traj.push(t, &x);
        }
    }
    traj.push(t_end, &x);
    Ok(traj)
}

fn pick_channel(rates: &[f64], total: f64, rng: &mut SimRng) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (c, &r) in rates.iter().enumerate() {
        acc += r;
        if target < acc {
            return c;
        }
    }
    // rounding left `target` past the last partial sum
    rates
        .iter()
        .rposition(|&r| r > 0.0)
        .expect("total rate is positive")
}

/// Independent replicas of [`ssa_simulate`] for parameter point `param`,
/// run in parallel and returned in replica order.
pub fn ssa_ensemble(
    spec: &LoopSpec,
    x0: &DensityState,
    t_end: f64,
    seed: u64,
    param: usize,
    replicas: usize,
    thinning: Option<usize>,
) -> Result<Vec<Trajectory>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| ssa_simulate_stream(spec, x0, t_end, seed, replica_stream(param, r), thinning))
        .collect()
}

/// Index of a count vector in the mixed-radix enumeration of `{0..=N}^k`.
pub fn lattice_index(counts: &[usize], capacity: usize) -> usize {
    counts
        .iter()
        .rev()
        .fold(0, |acc, &c| acc * (capacity + 1) + c)
}

/// Inverse of [`lattice_index`].
pub fn lattice_counts_of(mut index: usize, k: usize, capacity: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let c = index % (capacity + 1);
            index /= capacity + 1;
            c
        })
        .collect()
}

/// Generator matrix of `X^N` on the full lattice `{0, 1/N, ..., 1}^k`,
/// built from [`jump_rate`]. Rows and columns follow [`lattice_index`].
pub fn density_generator(spec: &LoopSpec) -> Result<DMatrix<f64>> {
    let k = spec.k();
    let cap = spec.capacity();
    let dim = (cap + 1)
        .checked_pow(k as u32)
        .filter(|&d| d <= MAX_GENERATOR_STATES)
        .ok_or_else(|| {
            Error::param(
                "N",
                format!("lattice (N+1)^k exceeds {MAX_GENERATOR_STATES} states"),
            )
        })?;
    let mut q = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        let counts = lattice_counts_of(row, k, cap);
        let state = DensityState::from_counts(&counts, cap)?;
        let mut out_rate = 0.0;
        for dir in JumpDirection::all(k) {
            let rate = cap as f64 * jump_rate(spec, &state, dir)?;
            if rate == 0.0 {
                continue;
            }
            let mut target = counts.clone();
            if dir.up {
                target[dir.index] += 1;
            } else {
                target[dir.index] -= 1;
            }
            q[(row, lattice_index(&target, cap))] += rate;
            out_rate += rate;
        }
        q[(row, row)] = -out_rate;
    }
    Ok(q)
}

//! Time-stamped state sequences shared by the jump simulator and the ODE
//! integrators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LoopSpec;
use crate::ode::IntegratorSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryKind {
    /// Right-continuous, piecewise-constant path.
    Stochastic,
    /// Continuous path, interpolated between recorded points.
    Deterministic,
}

/// Where a trajectory came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryMeta {
    Density {
        spec: LoopSpec,
        seed: u64,
        stream: u64,
        thinning: usize,
    },
    Micro {
        spec: LoopSpec,
        seed: u64,
    },
    Ode {
        settings: IntegratorSettings,
    },
    Unspecified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    // dx/dt at each recorded point; enables cubic Hermite dense output
    slopes: Option<Vec<f64>>,
    kind: TrajectoryKind,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(dim: usize, kind: TrajectoryKind, meta: TrajectoryMeta) -> Self {
        Self {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            slopes: None,
            kind,
            meta,
        }
    }

    pub(crate) fn with_slopes(mut self) -> Self {
        self.slopes = Some(Vec::new());
        self
    }

    pub fn push(&mut self, t: f64, state: &[f64]) {
        debug_assert_eq!(state.len(), self.dim);
        debug_assert!(self.slopes.is_none());
        self.times.push(t);
        self.states.extend_from_slice(state);
    }

    pub(crate) fn push_with_slope(&mut self, t: f64, state: &[f64], slope: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(state);
        self.slopes
            .as_mut()
            .expect("trajectory was created without slopes")
            .extend_from_slice(slope);
    }

    /// Builds a trajectory from raw columns; used by deserialisers and tests.
    pub fn from_parts(
        dim: usize,
        times: Vec<f64>,
        states: Vec<Vec<f64>>,
        kind: TrajectoryKind,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: states.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidState(
                "times must be strictly increasing".into(),
            ));
        }
        let mut traj = Self::new(dim, kind, meta);
        for (t, s) in times.into_iter().zip(states) {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.len(),
                });
            }
            traj.push(t, &s);
        }
        Ok(traj)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, idx: usize) -> &[f64] {
        &self.states[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn slope(&self, idx: usize) -> Option<&[f64]> {
        self.slopes
            .as_ref()
            .map(|s| &s[idx * self.dim..(idx + 1) * self.dim])
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim)
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    pub fn start_time(&self) -> Option<f64> {
        self.times.first().copied()
    }

    pub fn end_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    /// Whether the recorded times span `[0, t]`.
    pub fn covers(&self, t: f64) -> bool {
        matches!((self.start_time(), self.end_time()), (Some(a), Some(b)) if a <= 0.0 && b >= t)
    }

    /// Every state shifted by `offset`; metadata is kept.
    pub fn shifted(&self, offset: &[f64]) -> Self {
        let mut out = self.clone();
        for chunk in out.states.chunks_exact_mut(self.dim) {
            for (v, c) in chunk.iter_mut().zip(offset) {
                *v += c;
            }
        }
        out
    }

    /// Index of the last recorded time `<= t`.
    fn floor_index(&self, t: f64) -> Option<usize> {
        match self.times.partition_point(|&s| s <= t) {
            0 => None,
            p => Some(p - 1),
        }
    }

    /// Value of the path at time `t` (inside the recorded range).
    ///
    /// Stochastic paths are right-continuous step functions. Deterministic
    /// paths use cubic Hermite interpolation when slopes are recorded and
    /// linear interpolation otherwise.
    pub fn value_at(&self, t: f64, out: &mut [f64]) {
        let idx = self.floor_index(t).unwrap_or(0);
        let here = self.state(idx);
        if self.kind == TrajectoryKind::Stochastic || idx + 1 >= self.len() || t <= self.times[idx]
        {
            out.copy_from_slice(here);
            return;
        }
        let (t0, t1) = (self.times[idx], self.times[idx + 1]);
        let next = self.state(idx + 1);
        let h = t1 - t0;
        let s = (t - t0) / h;
        match (self.slope(idx), self.slope(idx + 1)) {
            (Some(f0), Some(f1)) => {
                let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
                let h10 = s * (1.0 - s) * (1.0 - s);
                let h01 = s * s * (3.0 - 2.0 * s);
                let h11 = s * s * (s - 1.0);
                for c in 0..self.dim {
                    out[c] = h00 * here[c] + h10 * h * f0[c] + h01 * next[c] + h11 * h * f1[c];
                }
            }
            _ => {
                for c in 0..self.dim {
                    out[c] = here[c] + s * (next[c] - here[c]);
                }
            }
        }
    }

    /// Left limit `x(t-)`; differs from [`Self::value_at`] only at jump times
    /// of stochastic paths.
    pub fn left_limit(&self, t: f64, out: &mut [f64]) {
        if self.kind == TrajectoryKind::Stochastic {
            let p = self.times.partition_point(|&s| s < t);
            out.copy_from_slice(self.state(p.saturating_sub(1)));
        } else {
            self.value_at(t, out);
        }
    }

    /// Interpolated value, allocating.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.value_at(t, &mut out);
        out
    }
}

/// `sup_{s <= t} |a(s) - b(s)|_inf`.
///
/// The supremum is taken over every recorded time of either path in `[0, t]`
/// plus `t` itself; at each such time both the value and the left limit of
/// stochastic paths are compared, so a jump cannot hide a gap.
pub fn sup_distance(a: &Trajectory, b: &Trajectory, t: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    for traj in [a, b] {
        if !traj.covers(t) {
            return Err(Error::InsufficientCoverage {
                start: traj.start_time().unwrap_or(f64::NAN),
                end: traj.end_time().unwrap_or(f64::NAN),
                required: t,
            });
        }
    }
    let dim = a.dim();
    let (mut va, mut vb) = (vec![0.0; dim], vec![0.0; dim]);
    let mut worst: f64 = 0.0;
    let mut probe = |s: f64, left: bool| {
        if left {
            a.left_limit(s, &mut va);
            b.left_limit(s, &mut vb);
        } else {
            a.value_at(s, &mut va);
            b.value_at(s, &mut vb);
        }
        for (x, y) in va.iter().zip(&vb) {
            worst = worst.max((x - y).abs());
        }
    };
    let times = a
        .times()
        .iter()
        .chain(b.times())
        .copied()
        .filter(|&s| (0.0..=t).contains(&s))
        .chain(std::iter::once(t));
    for s in times {
        probe(s, false);
        if s > 0.0 {
            probe(s, true);
        }
    }
    Ok(worst)
}

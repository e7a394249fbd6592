use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spectrum::{numerical_spectrum, symmetric_spectrum, Spectrum};
use super::{rotation_matrix, CENTER};
use crate::error::{Error, Result};
use crate::model::{jacobian, LoopSpec};
use crate::ode::{integrate, IntegratorSettings, T_BURN, T_OBS};
use crate::trajectory::Trajectory;

/// Real parts within this band of zero count as critical.
pub const EPS_LAMBDA: f64 = 1e-9;
/// Minimum peak-to-peak excursion of a sustained orbit.
pub const EPS_AMPLITUDE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StablePoint,
    Bistable,
    Oscillatory,
    Degenerate,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::StablePoint => "stable-point",
            Self::Bistable => "bistable",
            Self::Oscillatory => "oscillatory",
            Self::Degenerate => "degenerate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::StablePoint,
            Self::Bistable,
            Self::Oscillatory,
            Self::Degenerate,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// Linearisation has a critical eigenvalue.
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub x: [f64; 3],
    pub stability: Stability,
}

/// Per-coordinate extrema of an asymptotic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitExtrema {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl OrbitExtrema {
    /// Peak-to-peak excursion of coordinate `i`.
    pub fn amplitude(&self, i: usize) -> f64 {
        self.max[i] - self.min[i]
    }

    pub fn is_sustained(&self) -> bool {
        (0..3).all(|i| self.amplitude(i) > EPS_AMPLITUDE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRecord {
    pub coupling: f64,
    pub delta: f64,
    pub spectrum: Spectrum,
    pub classification: Classification,
    /// Sorted by the first coordinate.
    pub fixed_points: Vec<FixedPoint>,
    /// Present for oscillatory records only.
    pub orbit: Option<OrbitExtrema>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub burn_in: f64,
    pub observe: f64,
    /// Start of the orbit integration; must be off the diagonal.
    pub orbit_start: [f64; 3],
    pub settings: IntegratorSettings,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            burn_in: T_BURN,
            observe: T_OBS,
            orbit_start: [0.6, 0.5, 0.4],
            settings: IntegratorSettings::rk45(),
        }
    }
}

/// `sinh(2 J y) + 2 y cosh(2 J y)`: zero exactly at diagonal fixed points
/// `x = 1/2 + y` of the clock module.
pub fn branch_residual(coupling: f64, y: f64) -> f64 {
    (2.0 * coupling * y).sinh() + 2.0 * y * (2.0 * coupling * y).cosh()
}

/// All diagonal fixed points `x = (1/2 + y) (1, 1, 1)` with `y in (-1/2, 1/2)`,
/// sorted ascending: `{-y*, 0, y*}` for `J < -1`, `{0}` otherwise.
///
/// Uses the equivalent form `tanh(2 J y) + 2 y = 0`, which is negative on
/// `(0, y*)` and positive on `(y*, 1/2)`, and bisects on `(0, 1/2)`.
pub fn fixed_point_branch(coupling: f64) -> Vec<f64> {
    if !(coupling < -1.0) {
        return vec![0.0];
    }
    let g = |y: f64| (2.0 * coupling * y).tanh() + 2.0 * y;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let y = 0.5 * (lo + hi);
    vec![-y, 0.0, y]
}

/// Position `K` of the upper stable point on the rotated diagonal axis
/// (`z_3`), or `None` when there is no pair.
pub fn diagonal_axis_value(coupling: f64) -> Option<f64> {
    let branch = fixed_point_branch(coupling);
    let y = *branch.last()?;
    (y > 0.0).then(|| (rotation_matrix().transpose() * nalgebra::Vector3::repeat(y))[2])
}

fn stability_at(spec: &LoopSpec, x: &[f64; 3]) -> Stability {
    let max_re = numerical_spectrum(&jacobian(spec, x))[0].re;
    if max_re < -EPS_LAMBDA {
        Stability::Stable
    } else if max_re > EPS_LAMBDA {
        Stability::Unstable
    } else {
        Stability::Neutral
    }
}

/// Extrema of each coordinate over `[from, to]`, using the Hermite dense
/// output: interior extrema sit at roots of the interpolant's derivative.
pub fn orbit_extrema(traj: &Trajectory, from: f64, to: f64) -> OrbitExtrema {
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    let mut visit = |c: usize, v: f64| {
        min[c] = min[c].min(v);
        max[c] = max[c].max(v);
    };
    for t in [from, to] {
        let v = traj.sample(t);
        for c in 0..3 {
            visit(c, v[c]);
        }
    }
    let times = traj.times();
    for idx in 0..times.len().saturating_sub(1) {
        let (t0, t1) = (times[idx], times[idx + 1]);
        if t1 <= from || t0 >= to {
            continue;
        }
        let h = t1 - t0;
        let (y0, y1) = (traj.state(idx), traj.state(idx + 1));
        let (f0, f1) = match (traj.slope(idx), traj.slope(idx + 1)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                for c in 0..3 {
                    if (from..=to).contains(&t1) {
                        visit(c, y1[c]);
                    }
                }
                continue;
            }
        };
        for c in 0..3 {
            // d/ds of the cubic Hermite interpolant on s in [0, 1]
            let qa = 6.0 * (y0[c] - y1[c]) + 3.0 * h * (f0[c] + f1[c]);
            let qb = 6.0 * (y1[c] - y0[c]) - h * (4.0 * f0[c] + 2.0 * f1[c]);
            let qc = h * f0[c];
            for s in quadratic_roots(qa, qb, qc) {
                let t = t0 + s * h;
                if s > 0.0 && s < 1.0 && t >= from && t <= to {
                    visit(c, traj.sample(t)[c]);
                }
            }
        }
    }
    OrbitExtrema { min, max }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // numerically stable pair
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![q / a];
    if q != 0.0 {
        roots.push(c / q);
    }
    roots
}

/// [`classify_with`] under default options.
pub fn classify(coupling: f64, delta: f64) -> Result<BifurcationRecord> {
    classify_with(coupling, delta, &ClassifyOptions::default())
}

/// Classifies the long-run behaviour of the clock module at `(J, delta)`.
///
/// * every real part below `-EPS_LAMBDA`: stable point at the center;
/// * diagonal mode positive (`J < -1`): bistable, with the pair from
///   [`fixed_point_branch`];
/// * rotating pair positive and genuinely complex (`J > 2`, `delta != 1/2`):
///   oscillatory, with orbit extrema measured after a burn-in;
/// * any critical real part, or `delta = 1/2` with `J >= 2`: degenerate.
pub fn classify_with(
    coupling: f64,
    delta: f64,
    opts: &ClassifyOptions,
) -> Result<BifurcationRecord> {
    let spectrum = symmetric_spectrum(coupling, delta)?;
    let spec = LoopSpec::clock(coupling, delta, 1)?;
    let diagonal_mode = -2.0 * (coupling + 1.0);
    let pair_re = coupling - 2.0;
    let rotating = (delta - 0.5).abs() > 1e-12;

    let critical = spectrum
        .eigenvalues
        .iter()
        .any(|z| z.re.abs() <= EPS_LAMBDA);
    let classification = if critical || (!rotating && pair_re > EPS_LAMBDA) {
        Classification::Degenerate
    } else if spectrum.max_real() < -EPS_LAMBDA {
        Classification::StablePoint
    } else if diagonal_mode > EPS_LAMBDA {
        Classification::Bistable
    } else {
        Classification::Oscillatory
    };

    let center_stability = if spectrum.max_real() > EPS_LAMBDA {
        Stability::Unstable
    } else if critical {
        Stability::Neutral
    } else {
        Stability::Stable
    };
    let mut fixed_points = vec![FixedPoint {
        x: CENTER,
        stability: center_stability,
    }];
    let mut orbit = None;
    match classification {
        Classification::Bistable => {
            fixed_points.clear();
            for y in fixed_point_branch(coupling) {
                let x = [0.5 + y; 3];
                let stability = if y == 0.0 {
                    center_stability
                } else {
                    stability_at(&spec, &x)
                };
                fixed_points.push(FixedPoint { x, stability });
            }
        }
        Classification::Oscillatory => {
            let end = opts.burn_in + opts.observe;
            let traj = integrate(&spec, &opts.orbit_start, end, opts.settings)?;
            orbit = Some(orbit_extrema(&traj, opts.burn_in, end));
        }
        _ => {}
    }
    Ok(BifurcationRecord {
        coupling,
        delta,
        spectrum,
        classification,
        fixed_points,
        orbit,
    })
}

/// Classifies every coupling of `grid` at fixed `delta`, in grid order.
pub fn scan(grid: &[f64], delta: f64) -> Result<Vec<BifurcationRecord>> {
    scan_with(grid, delta, &ClassifyOptions::default())
}

pub fn scan_with(
    grid: &[f64],
    delta: f64,
    opts: &ClassifyOptions,
) -> Result<Vec<BifurcationRecord>> {
    if let Some(bad) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::param("grid", format!("non-finite coupling {bad}")));
    }
    grid.par_iter()
        .map(|&j| classify_with(j, delta, opts))
        .collect()
}

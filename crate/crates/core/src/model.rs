//! Loop parameterisation and the rates that drive every level of the model.
//!
//! Types are indexed `0..k` around a cycle. The clockwise neighbour of `i` is
//! `(i + 1) mod k`, the anticlockwise one `(i - 1) mod k`. A spin of type `i`
//! flips up at rate `exp(E_i)` and down at rate `exp(-E_i)` with
//!
//! ```text
//! E_i(x) = 2 [ -delta * J * x_{a(i)} - (1 - delta) * J * x_{h(i)} + kappa_i ]
//! ```
//!
//! where `x` is the vector of per-type densities of `+1` spins. Everything
//! else (jump rates, the vector field, the Jacobian) is built on `E_i`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest rate exponent accepted before `exp` leaves the f64 range.
pub const MAX_EXPONENT: f64 = 700.0;

/// Type labels used for `k <= 26`; larger loops fall back to numeric names.
pub fn type_label(i: usize) -> String {
    if i < 26 {
        ((b'A' + i as u8) as char).to_string()
    } else {
        format!("T{i}")
    }
}

/// Parameters of a cyclic feedback loop of `k` molecule types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLoopSpec", into = "RawLoopSpec")]
pub struct LoopSpec {
    types: usize,
    coupling: f64,
    asymmetry: f64,
    fields: Vec<f64>,
    capacity: usize,
}

#[derive(Serialize, Deserialize)]
struct RawLoopSpec {
    k: usize,
    coupling: f64,
    delta: f64,
    kappa: Vec<f64>,
    capacity: usize,
}

impl TryFrom<RawLoopSpec> for LoopSpec {
    type Error = Error;

    fn try_from(raw: RawLoopSpec) -> Result<Self> {
        LoopSpec::new(raw.k, raw.coupling, raw.delta, raw.kappa, raw.capacity)
    }
}

impl From<LoopSpec> for RawLoopSpec {
    fn from(spec: LoopSpec) -> Self {
        RawLoopSpec {
            k: spec.types,
            coupling: spec.coupling,
            delta: spec.asymmetry,
            kappa: spec.fields,
            capacity: spec.capacity,
        }
    }
}

impl LoopSpec {
    /// Builds a loop with explicit external fields `kappa` (one per type).
    ///
    /// Rejects non-finite values, `delta` outside `[0, 1]`, `k < 2`, `N < 1`
    /// and parameters whose rate exponent could exceed [`MAX_EXPONENT`]
    /// anywhere on `[0, 1]^k`.
    pub fn new(
        k: usize,
        coupling: f64,
        delta: f64,
        kappa: Vec<f64>,
        capacity: usize,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::param("k", format!("need at least 2 types, got {k}")));
        }
        if capacity < 1 {
            return Err(Error::param("N", "reservoir capacity must be at least 1"));
        }
        if !coupling.is_finite() {
            return Err(Error::param("J", format!("must be finite, got {coupling}")));
        }
        if !delta.is_finite() || !(0.0..=1.0).contains(&delta) {
            return Err(Error::param(
                "delta",
                format!("must lie in [0, 1], got {delta}"),
            ));
        }
        if kappa.len() != k {
            return Err(Error::param(
                "kappa",
                format!("expected {k} external fields, got {}", kappa.len()),
            ));
        }
        if let Some(bad) = kappa.iter().find(|v| !v.is_finite()) {
            return Err(Error::param("kappa", format!("must be finite, got {bad}")));
        }
        // |E_i| <= 2 (|J| (delta + 1 - delta) + |kappa_i|) on the unit box.
        for &field in &kappa {
            let bound = 2.0 * (coupling.abs() + field.abs());
            if bound > MAX_EXPONENT {
                return Err(Error::RateOverflow {
                    exponent: bound,
                    limit: MAX_EXPONENT,
                });
            }
        }
        Ok(Self {
            types: k,
            coupling,
            asymmetry: delta,
            fields: kappa,
            capacity,
        })
    }

    /// Loop with every external field set to `J / 2`, which pins a fixed
    /// point at `(1/2, ..., 1/2)`.
    pub fn with_half_coupling(
        k: usize,
        coupling: f64,
        delta: f64,
        capacity: usize,
    ) -> Result<Self> {
        Self::new(k, coupling, delta, vec![coupling / 2.0; k], capacity)
    }

    /// The three-type clock module with `kappa_i = J / 2`.
    pub fn clock(coupling: f64, delta: f64, capacity: usize) -> Result<Self> {
        Self::with_half_coupling(3, coupling, delta, capacity)
    }

    /// Same parameters with a different reservoir capacity.
    pub fn with_capacity(&self, capacity: usize) -> Result<Self> {
        Self::new(
            self.types,
            self.coupling,
            self.asymmetry,
            self.fields.clone(),
            capacity,
        )
    }

    pub fn k(&self) -> usize {
        self.types
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn delta(&self) -> f64 {
        self.asymmetry
    }

    pub fn kappa(&self) -> &[f64] {
        &self.fields
    }

    /// Reservoir capacity `N` (positions per type).
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Clockwise neighbour `h(i)`.
    pub fn clockwise(&self, i: usize) -> usize {
        (i + 1) % self.types
    }

    /// Anticlockwise neighbour `a(i)`.
    pub fn anticlockwise(&self, i: usize) -> usize {
        (i + self.types - 1) % self.types
    }

    pub(crate) fn require_types(&self, expected: usize) -> Result<()> {
        if self.types != expected {
            return Err(Error::UnsupportedTypeCount {
                expected,
                got: self.types,
            });
        }
        Ok(())
    }

    /// Rate exponent `E_i(x)`. No validation; callers guarantee `x.len() == k`.
    #[inline]
    pub fn exponent(&self, x: &[f64], i: usize) -> f64 {
        let a = self.anticlockwise(i);
        let h = self.clockwise(i);
        2.0 * (-self.asymmetry * self.coupling * x[a]
            - (1.0 - self.asymmetry) * self.coupling * x[h]
            + self.fields[i])
    }
}

/// Resolution of a [`DensityState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grid {
    /// Coordinates are multiples of `1 / N`.
    Lattice(usize),
    /// Any point of `[0, 1]^k` (deterministic states).
    Continuum,
}

/// Per-type activation densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityState {
    x: Vec<f64>,
    grid: Grid,
}

impl DensityState {
    /// Exact lattice state `counts / N`.
    pub fn from_counts(counts: &[usize], capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::param("N", "reservoir capacity must be at least 1"));
        }
        if let Some(&c) = counts.iter().find(|&&c| c > capacity) {
            return Err(Error::InvalidState(format!(
                "count {c} exceeds capacity {capacity}"
            )));
        }
        Ok(Self {
            x: counts.iter().map(|&c| c as f64 / capacity as f64).collect(),
            grid: Grid::Lattice(capacity),
        })
    }

    /// Lattice state from densities; each `N * x_i` must be an integer.
    pub fn on_grid(x: Vec<f64>, capacity: usize) -> Result<Self> {
        let counts = x
            .iter()
            .map(|&v| {
                let scaled = v * capacity as f64;
                let rounded = scaled.round();
                if !v.is_finite() || !(0.0..=1.0).contains(&v) || (scaled - rounded).abs() > 1e-9 {
                    Err(Error::InvalidState(format!(
                        "density {v} is not on the 1/{capacity} grid"
                    )))
                } else {
                    Ok(rounded as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_counts(&counts, capacity)
    }

    /// Lattice point nearest to an arbitrary point of the unit box.
    pub fn nearest(x: &[f64], capacity: usize) -> Result<Self> {
        let counts: Vec<usize> = x
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * capacity as f64).round() as usize)
            .collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite density".into()));
        }
        Self::from_counts(&counts, capacity)
    }

    pub fn continuum(x: Vec<f64>) -> Result<Self> {
        if let Some(v) = x
            .iter()
            .find(|v| !v.is_finite() || !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidState(format!("density {v} outside [0, 1]")));
        }
        Ok(Self {
            x,
            grid: Grid::Continuum,
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Integer counts `N * x_i`; `None` for continuum states.
    pub fn counts(&self) -> Option<Vec<usize>> {
        match self.grid {
            Grid::Lattice(n) => Some(
                self.x
                    .iter()
                    .map(|v| (v * n as f64).round() as usize)
                    .collect(),
            ),
            Grid::Continuum => None,
        }
    }
}

/// Direction of a macroscopic jump: `+e_i` (up) or `-e_i` (down).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JumpDirection {
    pub index: usize,
    pub up: bool,
}

impl JumpDirection {
    pub fn up(index: usize) -> Self {
        Self { index, up: true }
    }

    pub fn down(index: usize) -> Self {
        Self { index, up: false }
    }

    pub fn sign(&self) -> f64 {
        if self.up {
            1.0
        } else {
            -1.0
        }
    }

    /// All `2k` directions, ordered `+e_0, -e_0, +e_1, -e_1, ...`.
    pub fn all(k: usize) -> impl Iterator<Item = JumpDirection> {
        (0..k).flat_map(|i| [JumpDirection::up(i), JumpDirection::down(i)])
    }
}

/// Single-spin flip rates of type `i` at a given density profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipRates {
    /// `-1 -> +1`
    pub up: f64,
    /// `+1 -> -1`
    pub down: f64,
}

fn check_point(spec: &LoopSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            got: x.len(),
        });
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidState(format!("non-finite density {v}")));
    }
    Ok(())
}

/// Flip rates of a type-`i` spin given the current densities.
pub fn flip_rates(spec: &LoopSpec, x: &[f64], i: usize) -> Result<FlipRates> {
    check_point(spec, x)?;
    if i >= spec.k() {
        return Err(Error::param(
            "i",
            format!("type index {i} out of range 0..{}", spec.k()),
        ));
    }
    let exponent = spec.exponent(x, i);
    if exponent.abs() > MAX_EXPONENT {
        return Err(Error::RateOverflow {
            exponent,
            limit: MAX_EXPONENT,
        });
    }
    Ok(FlipRates {
        up: exponent.exp(),
        down: (-exponent).exp(),
    })
}

/// Per-capita jump intensity `beta_l(x)`; the process jumps at rate `N * beta_l(x)`.
pub fn jump_rate(spec: &LoopSpec, state: &DensityState, dir: JumpDirection) -> Result<f64> {
    if let Grid::Lattice(n) = state.grid() {
        if n != spec.capacity() {
            return Err(Error::InvalidState(format!(
                "state lives on the 1/{n} grid but the loop has N = {}",
                spec.capacity()
            )));
        }
    }
    let x = state.as_slice();
    let rates = flip_rates(spec, x, dir.index)?;
    Ok(beta(x[dir.index], rates, dir.up))
}

#[inline]
fn beta(xi: f64, rates: FlipRates, up: bool) -> f64 {
    if up {
        (1.0 - xi) * rates.up
    } else {
        xi * rates.down
    }
}

/// `F(x) = sum_l l * beta_l(x)` written into `out`.
pub fn vector_field_into(spec: &LoopSpec, x: &[f64], out: &mut [f64]) {
    for (i, slot) in out.iter_mut().enumerate().take(spec.k()) {
        let e = spec.exponent(x, i);
        *slot = (1.0 - x[i]) * e.exp() - x[i] * (-e).exp();
    }
}

/// Drift of the fluid limit, `F_i(x) = (1 - x_i) e^{E_i} - x_i e^{-E_i}`.
pub fn vector_field(spec: &LoopSpec, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; spec.k()];
    vector_field_into(spec, x, &mut out);
    out
}

/// Analytic Jacobian `dF_i / dx_j`.
pub fn jacobian(spec: &LoopSpec, x: &[f64]) -> DMatrix<f64> {
    let k = spec.k();
    let j = spec.coupling();
    let d = spec.delta();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        let e = spec.exponent(x, i);
        let (ep, em) = (e.exp(), (-e).exp());
        m[(i, i)] -= ep + em;
        // dF_i/dE_i = (1 - x_i) e^E + x_i e^-E; dE_i/dx_a = -2 delta J, dE_i/dx_h = -2 (1-delta) J
        let sens = (1.0 - x[i]) * ep + x[i] * em;
        m[(i, spec.anticlockwise(i))] += sens * (-2.0 * d * j);
        m[(i, spec.clockwise(i))] += sens * (-2.0 * (1.0 - d) * j);
    }
    m
}

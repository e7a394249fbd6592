use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jump::ssa_ensemble;
use crate::model::{DensityState, LoopSpec};
use crate::ode::{integrate, IntegratorSettings};
use crate::trajectory::sup_distance;

/// Reference integrator for the deterministic limit.
const REFERENCE_RTOL: f64 = 1e-8;
const REFERENCE_ATOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub capacity: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln median` against `ln N`; needs two rows.
    pub slope: Option<f64>,
    /// Medians strictly decrease in the order the capacities were given.
    pub medians_decreasing: bool,
}

/// Linearly interpolated sample quantile (the usual "type 7" definition).
///
/// `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn log_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.median > 0.0)
        .map(|r| ((r.capacity as f64).ln(), r.median.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Distance between jump paths and the deterministic limit as `N` grows.
///
/// For each capacity, `replicas` paths start from the grid point nearest
/// `x0`; each is compared in sup-norm on `[0, horizon]` against the ODE
/// solution from that same point. Capacity `j` of the list uses replica
/// streams `(j, 0..replicas)` of `seed`. With `replicas = 0` the table is
/// empty.
pub fn convergence_experiment(
    base: &LoopSpec,
    capacities: &[usize],
    x0: &[f64],
    horizon: f64,
    replicas: usize,
    seed: u64,
) -> Result<ConvergenceTable> {
    if x0.len() != base.k() {
        return Err(Error::DimensionMismatch {
            expected: base.k(),
            got: x0.len(),
        });
    }
    let mut rows = Vec::new();
    if replicas > 0 {
        let settings = IntegratorSettings::Rk45 {
            rtol: REFERENCE_RTOL,
            atol: REFERENCE_ATOL,
        };
        for (j, &cap) in capacities.iter().enumerate() {
            let spec = base.with_capacity(cap)?;
            let start = DensityState::nearest(x0, cap)?;
            let reference = integrate(&spec, start.as_slice(), horizon, settings)?;
            let paths = ssa_ensemble(&spec, &start, horizon, seed, j, replicas, None)?;
            let mut dists = paths
                .iter()
                .map(|p| sup_distance(p, &reference, horizon))
                .collect::<Result<Vec<f64>>>()?;
            dists.sort_by(f64::total_cmp);
            rows.push(ConvergenceRow {
                capacity: cap,
                median: quantile(&dists, 0.5),
                q25: quantile(&dists, 0.25),
                q75: quantile(&dists, 0.75),
                replicas,
            });
        }
    }
    let slope = log_slope(&rows);
    let medians_decreasing = rows.windows(2).all(|w| w[1].median < w[0].median);
    Ok(ConvergenceTable {
        rows,
        slope,
        medians_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.5), 2.5);
        assert_eq!(quantile(&s, 0.25), 1.75);
        assert_eq!(quantile(&s, 1.0), 4.0);
        assert_eq!(quantile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn zero_replicas_give_empty_table() {
        let spec = LoopSpec::new(3, 1.0, 0.3, vec![0.5; 3], 10).unwrap();
        let t = convergence_experiment(&spec, &[10, 100], &[0.5; 3], 1.0, 0, 1).unwrap();
        assert!(t.rows.is_empty());
        assert!(t.slope.is_none());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let rows: Vec<_> = [100usize, 1000, 10_000]
            .iter()
            .map(|&n| ConvergenceRow {
                capacity: n,
                median: 2.0 / (n as f64).sqrt(),
                q25: 0.0,
                q75: 0.0,
                replicas: 1,
            })
            .collect();
        assert!((log_slope(&rows).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_capacity_gives_one_row() {
        let spec = LoopSpec::new(3, 1.0, 0.3, vec![0.5; 3], 10).unwrap();
        let t = convergence_experiment(&spec, &[50], &[0.7, 0.2, 0.4], 1.0, 8, 3).unwrap();
        assert_eq!(t.rows.len(), 1);
        let r = &t.rows[0];
        assert!(r.q25 <= r.median && r.median <= r.q75);
        assert!(t.medians_decreasing);
    }
}

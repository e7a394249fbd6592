use tdsim_core::analysis::{
    convergence_experiment, scan, BifurcationRecord, Classification, Stability, CENTER,
};
use tdsim_core::jump::ssa_simulate;
use tdsim_core::micro::{micro_simulate, SpinConfiguration};
use tdsim_core::model::type_label;
use tdsim_core::ode::integrate;
use tdsim_core::{DensityState, Trajectory};

use crate::config::{CommandKind, Level, RunConfig};
use crate::dataset::{Cell, Dataset};
use crate::error::CliError;
use crate::validate::run_checks;

/// Runs the configured command. Stochastic commands need a seed in `cfg`.
pub fn execute(cfg: &RunConfig) -> Result<Dataset, CliError> {
    match cfg.command {
        CommandKind::Simulate => simulate(cfg),
        CommandKind::Ode => ode(cfg),
        CommandKind::Bifurcate => bifurcate(cfg),
        CommandKind::Converge => converge(cfg),
        CommandKind::Validate => run_checks(cfg),
    }
}

fn seed_of(cfg: &RunConfig) -> u64 {
    cfg.seed
        .expect("stochastic commands run with a resolved seed")
}

fn trajectory_columns(k: usize) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain((0..k).map(|i| format!("x_{}", type_label(i))))
        .collect()
}

fn trajectory_dataset(cfg: &RunConfig, traj: &Trajectory) -> Dataset {
    let cols = trajectory_columns(cfg.k);
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut data = Dataset::new(cfg.clone(), &names);
    for (idx, &t) in traj.times().iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(traj.state(idx).iter().map(|&v| Cell::Num(v)));
        data.push(row);
    }
    data
}

pub fn simulate(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let cap = cfg.capacities[0];
    let spec = cfg.spec(cap)?;
    let start = DensityState::nearest(&cfg.x0, cap)?;
    let traj = match cfg.level {
        Level::Density => ssa_simulate(&spec, &start, cfg.t_end, seed_of(cfg), cfg.thinning)?,
        Level::Micro => {
            let counts = start.counts().expect("nearest grid point has counts");
            let sigma = SpinConfiguration::from_counts(&spec, &counts)?;
            micro_simulate(&spec, &sigma, cfg.t_end, seed_of(cfg))?
        }
    };
    Ok(trajectory_dataset(cfg, &traj))
}

pub fn ode(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let spec = cfg.spec(cfg.capacities[0])?;
    let traj = integrate(&spec, &cfg.x0, cfg.t_end, cfg.integrator)?;
    Ok(trajectory_dataset(cfg, &traj))
}

pub const BIFURCATION_COLUMNS: [&str; 15] = [
    "J",
    "delta",
    "classification",
    "lambda1_re",
    "lambda1_im",
    "lambda2_re",
    "lambda2_im",
    "lambda3_re",
    "lambda3_im",
    "center_x_A",
    "center_stability",
    "branch_low_x_A",
    "branch_high_x_A",
    "orbit_min_x_A",
    "orbit_max_x_A",
];

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Neutral => "neutral",
    }
}

fn bifurcation_row(r: &BifurcationRecord) -> Vec<Cell> {
    let mut row = vec![
        Cell::Num(r.coupling),
        Cell::Num(r.delta),
        Cell::from(r.classification.as_str()),
    ];
    for z in r.spectrum.eigenvalues {
        row.push(Cell::Num(z.re));
        row.push(Cell::Num(z.im));
    }
    let center = r
        .fixed_points
        .iter()
        .find(|p| p.x == CENTER)
        .expect("center is always fixed");
    row.push(Cell::Num(center.x[0]));
    row.push(Cell::from(stability_name(center.stability)));
    let pair: Vec<f64> = r
        .fixed_points
        .iter()
        .filter(|p| r.classification == Classification::Bistable && p.x != CENTER)
        .map(|p| p.x[0])
        .collect();
    row.push(pair.first().copied().into());
    row.push(pair.last().copied().into());
    row.push(r.orbit.map(|o| o.min[0]).into());
    row.push(r.orbit.map(|o| o.max[0]).into());
    row
}

pub fn bifurcate(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let grid = cfg.grid.expect("bifurcate always has a grid").points();
    let records = scan(&grid, cfg.delta)?;
    let mut data = Dataset::new(cfg.clone(), &BIFURCATION_COLUMNS);
    for r in &records {
        data.push(bifurcation_row(r));
    }
    Ok(data)
}

pub fn converge(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let spec = cfg.spec(cfg.capacities[0])?;
    let table = convergence_experiment(
        &spec,
        &cfg.capacities,
        &cfg.x0,
        cfg.t_end,
        cfg.replicas,
        seed_of(cfg),
    )?;
    let mut data = Dataset::new(cfg.clone(), &["N", "median", "q25", "q75", "replicas"]);
    for r in &table.rows {
        data.push(vec![
            r.capacity.into(),
            r.median.into(),
            r.q25.into(),
            r.q75.into(),
            r.replicas.into(),
        ]);
    }
    data.summary.insert("slope".into(), table.slope.into());
    data.summary.insert(
        "medians_decreasing".into(),
        Cell::from(if table.medians_decreasing {
            "true"
        } else {
            "false"
        }),
    );
    Ok(data)
}

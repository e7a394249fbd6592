use tdsim_core::jump::{ssa_ensemble, ssa_simulate, ssa_simulate_stream};
use tdsim_core::model::vector_field;
use tdsim_core::ode::{integrate, IntegratorSettings};
use tdsim_core::trajectory::sup_distance;
use tdsim_core::{DensityState, LoopSpec, TrajectoryKind};

#[test]
fn raw_events_are_single_unit_jumps_on_the_grid() {
    let spec = LoopSpec::new(3, 1.0, 0.3, vec![0.5; 3], 40).unwrap();
    let x0 = DensityState::nearest(&[0.7, 0.2, 0.4], 40).unwrap();
    let traj = ssa_simulate(&spec, &x0, 5.0, 2024, Some(1)).unwrap();
    assert_eq!(traj.kind(), TrajectoryKind::Stochastic);
    assert!(traj.len() > 200);
    for s in traj.states() {
        let d = DensityState::on_grid(s.to_vec(), 40).unwrap();
        assert!(d.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }
    // the last entry repeats the final state at t_end
    for w in 0..traj.len() - 2 {
        let (a, b) = (traj.state(w), traj.state(w + 1));
        let diffs: Vec<f64> = a
            .iter()
            .zip(b)
            .map(|(p, q)| q - p)
            .filter(|d| *d != 0.0)
            .collect();
        assert_eq!(diffs.len(), 1);
        assert!((diffs[0].abs() - 1.0 / 40.0).abs() < 1e-12);
    }
    assert_eq!(traj.end_time(), Some(5.0));
}

#[test]
fn same_inputs_reproduce_the_path() {
    let spec = LoopSpec::clock(2.5, 0.0, 500).unwrap();
    let x0 = DensityState::nearest(&[0.6, 0.5, 0.4], 500).unwrap();
    let a = ssa_simulate(&spec, &x0, 2.0, 7, None).unwrap();
    let b = ssa_simulate(&spec, &x0, 2.0, 7, None).unwrap();
    assert_eq!(a, b);
    let other = ssa_simulate_stream(&spec, &x0, 2.0, 7, 1, None).unwrap();
    assert_ne!(a, other);
}

#[test]
fn ensembles_are_ordered_and_match_single_runs() {
    let spec = LoopSpec::clock(0.5, 0.2, 60).unwrap();
    let x0 = DensityState::nearest(&[0.5; 3], 60).unwrap();
    let runs = ssa_ensemble(&spec, &x0, 1.0, 3, 2, 6, None).unwrap();
    assert_eq!(runs.len(), 6);
    for (r, traj) in runs.iter().enumerate() {
        let single =
            ssa_simulate_stream(&spec, &x0, 1.0, 3, (2u64 << 32) | r as u64, None).unwrap();
        assert_eq!(*traj, single);
    }
}

#[test]
fn thinning_keeps_endpoints() {
    let spec = LoopSpec::clock(1.0, 0.3, 5000).unwrap();
    let x0 = DensityState::nearest(&[0.6, 0.3, 0.5], 5000).unwrap();
    let full = ssa_simulate(&spec, &x0, 0.2, 1, Some(1)).unwrap();
    let thin = ssa_simulate(&spec, &x0, 0.2, 1, None).unwrap();
    assert_eq!(thin.state(0), full.state(0));
    assert_eq!(thin.last_state(), full.last_state());
    let events = full.len() - 2;
    assert_eq!(thin.len() - 2, events / 50);
}

#[test]
fn mean_increment_matches_the_field() {
    // E[X(h) - x] / h -> F(x); the O(h) bias here is ~1e-3, well under 3 SE
    let cap = 1000;
    let spec = LoopSpec::new(3, 1.0, 0.3, vec![0.5; 3], cap).unwrap();
    let x0 = DensityState::nearest(&[0.7, 0.2, 0.4], cap).unwrap();
    let h = 1e-3;
    let replicas = 100_000;
    let runs = ssa_ensemble(&spec, &x0, h, 42, 0, replicas, Some(1)).unwrap();
    let f = vector_field(&spec, x0.as_slice());
    for i in 0..3 {
        let incs: Vec<f64> = runs
            .iter()
            .map(|t| (t.last_state().unwrap()[i] - x0.as_slice()[i]) / h)
            .collect();
        let mean = incs.iter().sum::<f64>() / replicas as f64;
        let var = incs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (replicas - 1) as f64;
        let se = (var / replicas as f64).sqrt();
        assert!(
            (mean - f[i]).abs() < 3.0 * se,
            "coord {i}: {mean} vs {} (se {se})",
            f[i]
        );
    }
}

#[test]
fn decoupled_chain_averages_one_half() {
    // each coordinate is a birth-death chain with rates (N - n) and n,
    // whose stationary law is Binomial(N, 1/2)
    let cap = 1000;
    let spec = LoopSpec::new(3, 0.0, 0.5, vec![0.0; 3], cap).unwrap();
    let x0 = DensityState::nearest(&[0.9, 0.1, 0.5], cap).unwrap();
    let traj = ssa_simulate(&spec, &x0, 100.0, 8, Some(1)).unwrap();
    let times = traj.times();
    let mut avg = [0.0; 3];
    for w in 0..traj.len() - 1 {
        let (a, b) = (times[w].max(10.0), times[w + 1].max(10.0));
        for i in 0..3 {
            avg[i] += traj.state(w)[i] * (b - a);
        }
    }
    for v in avg {
        let m = v / 90.0;
        assert!((0.48..=0.52).contains(&m), "time average {m}");
    }
}

#[test]
fn large_systems_track_the_deterministic_limit() {
    let cap = 10_000;
    let spec = LoopSpec::new(3, 1.0, 0.3, vec![0.5; 3], cap).unwrap();
    let x0 = DensityState::nearest(&[0.7, 0.2, 0.4], cap).unwrap();
    let ode = integrate(&spec, x0.as_slice(), 5.0, IntegratorSettings::rk45()).unwrap();
    let runs = ssa_ensemble(&spec, &x0, 5.0, 77, 0, 100, None).unwrap();
    let close = runs
        .iter()
        .filter(|t| sup_distance(t, &ode, 5.0).unwrap() < 0.05)
        .count();
    assert!(close >= 95, "{close} of 100 within 0.05");
}

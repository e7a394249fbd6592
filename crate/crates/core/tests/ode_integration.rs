use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdsim_core::analysis::z_system;
use tdsim_core::ode::{integrate, integrate_linear, IntegratorSettings};
use tdsim_core::LoopSpec;

fn decay(x0: f64, t: f64) -> f64 {
    0.5 + (x0 - 0.5) * (-2.0 * t).exp()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

#[test]
fn box_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for run in 0..1000 {
        let spec = LoopSpec::new(
            3,
            rng.random_range(-3.0..3.0),
            rng.random_range(0.0..=1.0),
            (0..3).map(|_| rng.random_range(-1.5..1.5)).collect(),
            1,
        )
        .unwrap();
        let x0: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..=1.0)).collect();
        let traj = integrate(&spec, &x0, 10.0, IntegratorSettings::rk45()).unwrap();
        for s in traj.states() {
            assert!(
                s.iter().all(|v| (-1e-8..=1.0 + 1e-8).contains(v)),
                "run {run} left the box: {s:?}"
            );
        }
    }
}

#[test]
fn rk4_is_fourth_order() {
    let spec = LoopSpec::new(3, 0.0, 0.5, vec![0.0; 3], 1).unwrap();
    let x0 = [0.95, 0.05, 0.3];
    let t = 2.0;
    let exact: Vec<f64> = x0.iter().map(|&v| decay(v, t)).collect();
    let err = |h: f64| {
        let traj = integrate(&spec, &x0, t, IntegratorSettings::Rk4 { step: h }).unwrap();
        linf(traj.last_state().unwrap(), &exact)
    };
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn methods_agree_on_reference_scenarios() {
    let cases: [(f64, f64, f64, [f64; 3], f64); 4] = [
        (1.0, 0.0, 0.5, [0.9, 0.1, 0.5], 20.0),
        (1.0, 0.3, 0.5, [0.7, 0.2, 0.4], 5.0),
        (1.9, 0.0, 0.95, [0.6, 0.5, 0.4], 50.0),
        (-1.5, 0.2, -0.75, [0.6, 0.55, 0.58], 30.0),
    ];
    for (j, d, kappa, x0, t) in cases {
        let spec = LoopSpec::new(3, j, d, vec![kappa; 3], 1).unwrap();
        let a = integrate(&spec, &x0, t, IntegratorSettings::rk4()).unwrap();
        let b = integrate(&spec, &x0, t, IntegratorSettings::rk45()).unwrap();
        let gap = linf(a.last_state().unwrap(), b.last_state().unwrap());
        assert!(gap < 1e-6, "J={j} delta={d}: {gap}");
    }
}

#[test]
fn stable_regime_converges_to_center() {
    let spec = LoopSpec::new(3, 1.0, 0.0, vec![0.5; 3], 1).unwrap();
    for settings in [IntegratorSettings::rk4(), IntegratorSettings::rk45()] {
        let traj = integrate(&spec, &[0.9, 0.1, 0.5], 20.0, settings).unwrap();
        assert!(linf(traj.last_state().unwrap(), &[0.5; 3]) < 1e-6);
    }
}

#[test]
fn linear_flow_at_threshold_conserves_radius() {
    for &d in &[0.0, 0.2, 1.0] {
        let a = z_system(2.0, d).unwrap();
        let a = nalgebra::DMatrix::from_column_slice(3, 3, a.as_slice());
        let z0 = [0.3, -0.1, 0.2];
        let r0 = z0[0] * z0[0] + z0[1] * z0[1];
        let traj = integrate_linear(&a, &z0, 10.0, IntegratorSettings::rk45()).unwrap();
        for s in traj.states() {
            let r = s[0] * s[0] + s[1] * s[1];
            assert!((r - r0).abs() / r0 < 1e-6);
        }
    }
}

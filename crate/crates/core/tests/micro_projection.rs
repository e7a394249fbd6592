use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdsim_core::jump::density_generator;
use tdsim_core::micro::{
    energy_deltas, generator_matrix, gibbs_measure, hamiltonian, lumped_generator, micro_simulate,
    reversibility_residual, MicroSimulator, SpinConfiguration,
};
use tdsim_core::model::jump_rate;
use tdsim_core::{DensityState, JumpDirection, LoopSpec};

fn configs(spec: &LoopSpec) -> Vec<SpinConfiguration> {
    let n = spec.k() * spec.capacity();
    (0..1usize << n)
        .map(|s| SpinConfiguration::from_index(spec, s).unwrap())
        .collect()
}

// Double sum over ordered site pairs, written against the coupling table
// directly rather than through the library's energy code.
fn brute_hamiltonian(c: &SpinConfiguration) -> f64 {
    let spec = c.spec();
    let (k, cap) = (spec.k(), spec.capacity());
    let (j, d) = (spec.coupling(), spec.delta());
    let mut sum = 0.0;
    for src in 0..k {
        for l in 0..cap {
            for dst in 0..k {
                for n in 0..cap {
                    let a = c.spin(src, l);
                    let b = c.spin(dst, n) as f64;
                    let alpha = if dst == src {
                        spec.kappa()[src]
                    } else if a == 1 && dst == (src + 1) % k {
                        -d * j * b
                    } else if a == 1 && dst == (src + k - 1) % k {
                        -(1.0 - d) * j * b
                    } else {
                        0.0
                    };
                    sum += alpha;
                }
            }
        }
    }
    -sum / cap as f64
}

#[test]
fn hamiltonian_matches_brute_force_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for cap in 1..=3 {
        for _ in 0..4 {
            let spec = LoopSpec::new(
                3,
                rng.random_range(-2.0..2.0),
                rng.random_range(0.0..=1.0),
                (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                cap,
            )
            .unwrap();
            for c in configs(&spec) {
                assert!((hamiltonian(&c).unwrap() - brute_hamiltonian(&c)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn decomposition_equals_energy_difference_on_all_flips() {
    let spec = LoopSpec::new(3, 1.7, 0.3, vec![0.4, -0.2, 0.9], 1).unwrap();
    for c in configs(&spec) {
        for i in 0..3 {
            for (from, to) in [(-1i8, 1i8), (1, -1)] {
                let mut before = c.clone();
                before.set(i, 0, from);
                let mut after = c.clone();
                after.set(i, 0, to);
                let d = energy_deltas(&c, (i, 0), from, to).unwrap();
                let direct = hamiltonian(&after).unwrap() - hamiltonian(&before).unwrap();
                assert!((d.total - direct).abs() < 1e-10);
                assert!((d.total - d.delta_in - d.delta_out).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn gibbs_weight_of_all_up_state() {
    let spec = LoopSpec::new(3, 2.0, 1.0, vec![0.0; 3], 1).unwrap();
    let mu = gibbs_measure(&spec).unwrap();
    let z: f64 = configs(&spec)
        .iter()
        .map(|c| (-brute_hamiltonian(c)).exp())
        .sum();
    let all_up = SpinConfiguration::uniform(&spec, 1).unwrap();
    assert!((mu[all_up.index()] - (-6.0f64).exp() / z).abs() < 1e-14);
    assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(mu.iter().all(|&p| p > 0.0));
}

#[test]
fn lumped_spin_generator_equals_density_generator() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for cap in 1..=4 {
        for _ in 0..5 {
            let spec = LoopSpec::new(
                3,
                rng.random_range(-3.0..3.0),
                rng.random_range(0.0..=1.0),
                (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                cap,
            )
            .unwrap();
            let lumped = lumped_generator(&spec).unwrap();
            assert!(lumped.lumpability_defect < 1e-12);
            let q = density_generator(&spec).unwrap();
            assert!((lumped.matrix - q).amax() < 1e-12);
        }
    }
}

// Residual recomputed from the Gibbs weights and hand-written flip rates.
fn residual_by_hand(spec: &LoopSpec) -> f64 {
    let cs = configs(spec);
    let w: Vec<f64> = cs.iter().map(|c| (-brute_hamiltonian(c)).exp()).collect();
    let z: f64 = w.iter().sum();
    let cap = spec.capacity() as f64;
    let rate = |c: &SpinConfiguration, i: usize, n: usize| {
        let x: Vec<f64> = c.counts().iter().map(|&v| v as f64 / cap).collect();
        let (j, d) = (spec.coupling(), spec.delta());
        let e = 2.0 * (-d * j * x[(i + 2) % 3] - (1.0 - d) * j * x[(i + 1) % 3] + spec.kappa()[i]);
        if c.spin(i, n) == 1 {
            (-e).exp()
        } else {
            e.exp()
        }
    };
    let mut worst: f64 = 0.0;
    for (s, c) in cs.iter().enumerate() {
        for i in 0..3 {
            for n in 0..spec.capacity() {
                let mut t = c.clone();
                t.set(i, n, -c.spin(i, n));
                let flux = w[s] / z * rate(c, i, n) - w[t.index()] / z * rate(&t, i, n);
                worst = worst.max(flux.abs());
            }
        }
    }
    worst
}

#[test]
fn reversibility_residual_against_enumeration() {
    let free = LoopSpec::new(3, 0.0, 0.3, vec![0.0; 3], 2).unwrap();
    assert!(reversibility_residual(&free).unwrap() <= 1e-12);

    let driven = LoopSpec::new(3, 2.0, 0.0, vec![1.0; 3], 1).unwrap();
    let r = reversibility_residual(&driven).unwrap();
    assert!(r > 1e-6);
    assert!((r - residual_by_hand(&driven)).abs() < 1e-12);

    let symmetric = LoopSpec::new(3, 1.5, 0.5, vec![0.75; 3], 2).unwrap();
    let r = reversibility_residual(&symmetric).unwrap();
    assert!((r - residual_by_hand(&symmetric)).abs() < 1e-12);
}

#[test]
fn reversibility_residual_is_rotation_invariant() {
    let kappa = vec![0.3, -0.5, 1.1];
    let base = LoopSpec::new(3, 1.2, 0.2, kappa.clone(), 2).unwrap();
    let rotated = LoopSpec::new(3, 1.2, 0.2, vec![kappa[2], kappa[0], kappa[1]], 2).unwrap();
    let (a, b) = (
        reversibility_residual(&base).unwrap(),
        reversibility_residual(&rotated).unwrap(),
    );
    assert!((a - b).abs() < 1e-12 * a.max(1.0));
}

#[test]
fn generator_rows_vanish_and_flips_are_single_site() {
    let spec = LoopSpec::new(3, -1.3, 0.6, vec![0.2; 3], 2).unwrap();
    let q = generator_matrix(&spec).unwrap();
    for s in 0..q.dim() {
        assert!(q.row_sum(s).abs() < 1e-12);
        for (t, rate) in q.row(s) {
            assert_eq!((s ^ t).count_ones(), 1);
            assert!(rate > 0.0);
        }
    }
}

#[test]
fn aggregate_spin_rates_equal_density_rates_at_every_event() {
    let spec = LoopSpec::new(3, 2.0, 1.0, vec![1.0; 3], 50).unwrap();
    let start = SpinConfiguration::from_counts(&spec, &[10, 25, 40]).unwrap();
    let mut sim = MicroSimulator::new(start, 5);
    let mut events = 0;
    while sim.step(2.0).unwrap().is_some() {
        let state = sim.config().projection();
        let agg = sim.aggregate_rates();
        for dir in JumpDirection::all(3) {
            let expected = 50.0 * jump_rate(&spec, &state, dir).unwrap();
            let got = agg[2 * dir.index + usize::from(!dir.up)];
            assert!(
                (got - expected).abs() <= 1e-12 * expected.max(1.0),
                "{got} vs {expected}"
            );
        }
        assert!((sim.total_rate() - agg.iter().sum::<f64>()).abs() < 1e-9);
        events += 1;
    }
    assert!(events > 100);
}

#[test]
fn micro_paths_are_seed_deterministic_and_on_grid() {
    let spec = LoopSpec::clock(1.5, 0.3, 6).unwrap();
    let start = SpinConfiguration::uniform(&spec, -1).unwrap();
    let a = micro_simulate(&spec, &start, 3.0, 17).unwrap();
    let b = micro_simulate(&spec, &start, 3.0, 17).unwrap();
    assert_eq!(a, b);
    let c = micro_simulate(&spec, &start, 3.0, 18).unwrap();
    assert_ne!(a, c);
    for s in a.states() {
        assert!(DensityState::on_grid(s.to_vec(), 6).is_ok());
    }
    assert_eq!(a.end_time(), Some(3.0));
}

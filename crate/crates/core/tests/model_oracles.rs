use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdsim_core::model::{flip_rates, jacobian, jump_rate, vector_field};
use tdsim_core::{DensityState, JumpDirection, LoopSpec};

fn random_spec(rng: &mut ChaCha8Rng, k: usize) -> LoopSpec {
    let j = rng.random_range(-3.0..3.0);
    let delta = rng.random_range(0.0..=1.0);
    let kappa = (0..k).map(|_| rng.random_range(-1.5..1.5)).collect();
    LoopSpec::new(k, j, delta, kappa, 10).unwrap()
}

// Rate exponent written out from scratch, without the library's helpers.
fn exponent_by_hand(spec: &LoopSpec, x: &[f64], i: usize) -> f64 {
    let k = spec.k();
    let clockwise = x[(i + 1) % k];
    let anticlockwise = x[(i + k - 1) % k];
    let j = spec.coupling();
    let d = spec.delta();
    2.0 * (-d * j * anticlockwise - (1.0 - d) * j * clockwise + spec.kappa()[i])
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let h = 1e-5;
    for _ in 0..50 {
        let spec = random_spec(&mut rng, 3);
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..=1.0)).collect();
        let a = jacobian(&spec, &x);
        for c in 0..3 {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[c] += h;
            minus[c] -= h;
            let (fp, fm) = (vector_field(&spec, &plus), vector_field(&spec, &minus));
            for r in 0..3 {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                assert!(
                    (a[(r, c)] - fd).abs() < 1e-6,
                    "entry ({r},{c}): {} vs {fd}",
                    a[(r, c)]
                );
            }
        }
    }
}

#[test]
fn field_is_expected_jump_per_unit_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let k = rng.random_range(3..6);
        let cap = rng.random_range(1..40);
        let mut spec = random_spec(&mut rng, k);
        spec = spec.with_capacity(cap).unwrap();
        let counts: Vec<usize> = (0..k).map(|_| rng.random_range(0..=cap)).collect();
        let state = DensityState::from_counts(&counts, cap).unwrap();
        let mut drift = vec![0.0; k];
        for dir in JumpDirection::all(k) {
            drift[dir.index] += dir.sign() * jump_rate(&spec, &state, dir).unwrap();
        }
        let f = vector_field(&spec, state.as_slice());
        for i in 0..k {
            assert!((f[i] - drift[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn rates_follow_hand_written_exponent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let k = rng.random_range(3..7);
        let spec = random_spec(&mut rng, k);
        let x: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=1.0)).collect();
        for i in 0..k {
            let e = exponent_by_hand(&spec, &x, i);
            let r = flip_rates(&spec, &x, i).unwrap();
            assert!((r.up - e.exp()).abs() <= 1e-12 * e.exp());
            assert!((r.down - (-e).exp()).abs() <= 1e-12 * (-e).exp());
            // up/down ratio is the Boltzmann-type factor of the exponent
            assert!((r.up / r.down - (2.0 * e).exp()).abs() <= 1e-10 * (2.0 * e).exp());
        }
    }
}

#[test]
fn mirrored_asymmetry_transposes_center_jacobian() {
    for &j in &[-2.5, -1.0, 0.3, 2.0, 3.0] {
        for &d in &[0.0, 0.1, 0.35, 0.5, 0.8] {
            let a = jacobian(&LoopSpec::clock(j, d, 1).unwrap(), &[0.5; 3]);
            let b = jacobian(&LoopSpec::clock(j, 1.0 - d, 1).unwrap(), &[0.5; 3]);
            assert!((a - b.transpose()).amax() < 1e-14);
        }
    }
}

proptest! {
    #[test]
    fn field_points_into_the_box(
        j in -3.0f64..3.0,
        d in 0.0f64..=1.0,
        kappa in proptest::collection::vec(-2.0f64..2.0, 3),
        x in proptest::collection::vec(0.0f64..=1.0, 3),
        face in 0usize..3,
    ) {
        let spec = LoopSpec::new(3, j, d, kappa, 1).unwrap();
        let mut lo = x.clone();
        lo[face] = 0.0;
        prop_assert!(vector_field(&spec, &lo)[face] > 0.0);
        let mut hi = x;
        hi[face] = 1.0;
        prop_assert!(vector_field(&spec, &hi)[face] < 0.0);
    }

    #[test]
    fn rates_are_positive_inside_and_vanish_at_edges(
        j in -3.0f64..3.0,
        d in 0.0f64..=1.0,
        counts in proptest::collection::vec(0usize..=8, 3),
    ) {
        let spec = LoopSpec::with_half_coupling(3, j, d, 8).unwrap();
        let state = DensityState::from_counts(&counts, 8).unwrap();
        for i in 0..3 {
            let up = jump_rate(&spec, &state, JumpDirection::up(i)).unwrap();
            let down = jump_rate(&spec, &state, JumpDirection::down(i)).unwrap();
            prop_assert!(up >= 0.0 && down >= 0.0);
            prop_assert_eq!(up == 0.0, counts[i] == 8);
            prop_assert_eq!(down == 0.0, counts[i] == 0);
        }
    }

    #[test]
    fn half_coupling_center_is_fixed(j in -5.0f64..5.0, d in 0.0f64..=1.0) {
        let spec = LoopSpec::clock(j, d, 1).unwrap();
        for v in vector_field(&spec, &[0.5; 3]) {
            prop_assert!(v.abs() < 1e-12);
        }
    }
}

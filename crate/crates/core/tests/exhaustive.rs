//! Exhaustive small-system checks against the first-principles oracles in
//! `support`: every self-map on up to four or five points, rather than
//! random samples, so structural claims have no sampling gaps.

mod support;

use support::{all_maps, brute_force_cycles, brute_force_operator_norm, two_point_spectral_radius};

use tshift::{
    DensityMeasure, FiniteDynSystem, InvariantPolytope, PotentialVector, WeightedShiftOperator,
};

/// Two mass profiles per map: uniform, and a spread that breaks symmetry.
fn mass_profiles(n: usize) -> [Vec<f64>; 2] {
    [
        vec![1.0; n],
        (0..n).map(|i| 0.5 + 0.75 * i as f64).collect(),
    ]
}

#[test]
fn invariant_polytope_extremes_match_brute_force_cycles_on_all_small_maps() {
    for n in 1..=5usize {
        for map in all_maps(n) {
            let expected = brute_force_cycles(&map);
            for mass in mass_profiles(n) {
                let sys = FiniteDynSystem::new(map.clone(), mass).unwrap();
                let poly = InvariantPolytope::of(&sys);
                assert_eq!(poly.num_extremes(), expected.len(), "map {map:?}");
                for (extreme, orbit) in poly.extreme_points().iter().zip(&expected) {
                    // Uniform weight on the orbit, zero elsewhere, and
                    // exactly invariant.
                    for (i, &p) in extreme.densities().iter().enumerate() {
                        let want = if orbit.contains(&i) {
                            1.0 / orbit.len() as f64
                        } else {
                            0.0
                        };
                        assert_eq!(p, want, "map {map:?}, point {i}");
                    }
                    assert_eq!(extreme.invariance_defect(&sys), 0.0, "map {map:?}");
                }
            }
        }
    }
}

/// Time-averaging any measure over one full period (after the transient
/// has drained) must land in the invariant polytope, and its cycle masses
/// must reproduce it through the polytope's own mixing.
#[test]
fn cesaro_averages_land_in_the_invariant_polytope() {
    fn lcm(a: usize, b: usize) -> usize {
        fn gcd(mut a: usize, mut b: usize) -> usize {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        }
        a / gcd(a, b) * b
    }

    for n in 2..=5usize {
        for (idx, map) in all_maps(n).into_iter().enumerate() {
            let cycles = brute_force_cycles(&map);
            let period = cycles.iter().fold(1, |acc, c| lcm(acc, c.len()));
            let sys = FiniteDynSystem::new(map.clone(), mass_profiles(n)[1].clone()).unwrap();

            // A deterministic, map-dependent starting measure.
            let raw: Vec<f64> = (0..n).map(|i| 1.0 + ((idx + i) % 7) as f64).collect();
            let mut current = DensityMeasure::normalized(raw).unwrap();
            for _ in 0..n {
                current = DensityMeasure::new(current.push_forward(&sys)).unwrap();
            }
            let mut avg = vec![0.0f64; n];
            for _ in 0..period {
                for (a, &p) in avg.iter_mut().zip(current.densities()) {
                    *a += p / period as f64;
                }
                current = DensityMeasure::new(current.push_forward(&sys)).unwrap();
            }
            let averaged = DensityMeasure::normalized(avg).unwrap();
            assert!(
                averaged.invariance_defect(&sys) <= 1e-15,
                "map {map:?}: defect {}",
                averaged.invariance_defect(&sys)
            );

            let poly = InvariantPolytope::of(&sys);
            let weights: Vec<f64> = cycles
                .iter()
                .map(|orbit| orbit.iter().map(|&p| averaged.densities()[p]).sum())
                .collect();
            let rebuilt = poly.mix(&weights).unwrap();
            for (&a, &b) in rebuilt.densities().iter().zip(averaged.densities()) {
                assert!((a - b).abs() <= 1e-12, "map {map:?}");
            }
        }
    }
}

#[test]
fn two_point_spectral_exponent_matches_the_quadratic_formula() {
    let phis = [
        [0.0, 0.0],
        [0.3, -5.0],
        [1.0, 2.0],
        [-0.25, 0.75],
        [2.5, -2.5],
    ];
    for map in all_maps(2) {
        for phi in phis {
            for mass in mass_profiles(2) {
                let sys = FiniteDynSystem::new(map.clone(), mass).unwrap();
                let pot = PotentialVector::new(&sys, phi.to_vec()).unwrap();
                let op = WeightedShiftOperator::new(&sys, &pot).unwrap();
                let oracle = two_point_spectral_radius(&map, &phi).ln();
                assert!(
                    (op.lambda_cycle_mean() - oracle).abs() <= 1e-12,
                    "map {map:?}, phi {phi:?}: {} vs {}",
                    op.lambda_cycle_mean(),
                    oracle
                );
            }
        }
    }
}

#[test]
fn operator_norms_match_exponential_space_brute_force_on_all_three_point_maps() {
    let phi = [0.4, -1.1, 0.7];
    for map in all_maps(3) {
        for mass in mass_profiles(3) {
            let sys = FiniteDynSystem::new(map.clone(), mass.clone()).unwrap();
            let pot = PotentialVector::new(&sys, phi.to_vec()).unwrap();
            let op = WeightedShiftOperator::new(&sys, &pot).unwrap();
            for k in 1..=12usize {
                let direct = brute_force_operator_norm(&map, &mass, &phi, k).ln();
                let lib = op.log_operator_norm(k);
                assert!(
                    (lib - direct).abs() <= 1e-11 * (1.0 + direct.abs()),
                    "map {map:?}, k {k}: {lib} vs {direct}"
                );
            }
        }
    }
}

/// The norm sequence `(1/k) ln ‖A^k‖` must approach the cycle-mean
/// exponent from within the certified tail envelope on every small map.
#[test]
fn norm_sequence_tail_envelope_holds_on_all_four_point_maps() {
    let phi = [0.9, -0.3, 0.2, -1.4];
    for map in all_maps(4) {
        let sys = FiniteDynSystem::new(map.clone(), mass_profiles(4)[1].clone()).unwrap();
        let pot = PotentialVector::new(&sys, phi.to_vec()).unwrap();
        let op = WeightedShiftOperator::new(&sys, &pot).unwrap();
        let lambda = op.lambda_cycle_mean();
        let envelope = op.tail_bound();
        for (i, value) in op.lambda_norm_limit(24).into_iter().enumerate() {
            let k = (i + 1) as f64;
            assert!(
                (value - lambda).abs() <= envelope / k + 1e-12,
                "map {map:?}, k {k}: |{value} - {lambda}| > {envelope}/{k}"
            );
        }
    }
}

//! Proptest strategies shared by the unit-test modules.

use proptest::prelude::*;

use crate::dynsys::{FiniteDynSystem, PotentialVector};
use crate::measures::DensityMeasure;

/// An arbitrary system with `1..=max_n` points, arbitrary map table, and
/// masses in `[0.1, 4]`.
pub(crate) fn arb_system(max_n: usize) -> impl Strategy<Value = FiniteDynSystem> {
    (1..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..n, n),
            proptest::collection::vec(0.1f64..4.0, n),
        )
            .prop_map(|(map, mass)| FiniteDynSystem::new(map, mass).unwrap())
    })
}

/// A system together with a potential whose entries lie in `[-3, 3]`.
pub(crate) fn arb_system_potential(
    max_n: usize,
) -> impl Strategy<Value = (FiniteDynSystem, PotentialVector)> {
    arb_system(max_n).prop_flat_map(|sys| {
        let n = sys.n();
        (
            Just(sys),
            proptest::collection::vec(-3.0f64..3.0, n),
        )
            .prop_map(|(sys, values)| {
                let phi = PotentialVector::new(&sys, values).unwrap();
                (sys, phi)
            })
    })
}

/// A strictly positive probability vector of the given length.
pub(crate) fn arb_measure(n: usize) -> impl Strategy<Value = DensityMeasure> {
    proptest::collection::vec(0.05f64..1.0, n)
        .prop_map(|raw| DensityMeasure::normalized(raw).unwrap())
}

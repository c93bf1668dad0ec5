//! Finite dynamical systems `(X, α, m)` and potentials on them.
//!
//! The phase space is `X = {0, …, n-1}`, the dynamics is an arbitrary map
//! `α: X → X` given as a lookup table, and `m` is a strictly positive mass
//! vector turning `X` into a finite measure space. Nothing about `α` is
//! assumed — it may be non-invertible and non-surjective — so the functional
//! graph of `α` splits into disjoint cycles with trees hanging off them.
//! Every trajectory is eventually periodic, and most spectral quantities of
//! the associated weighted shift are governed by the cycles; the
//! [`CycleDecomposition`] computed here is the combinatorial backbone used
//! throughout the crate.
//!
//! Along with the system itself this module provides the Birkhoff sums
//! `S_k φ(x) = Σ_{j<k} φ(α^j(x))`, the empirical measures
//! `δ_{x,k} = (1/k) Σ_{j<k} δ_{α^j(x)}`, and iterated map tables `α^k`.

use serde::{Deserialize, Serialize};

use crate::measures::DensityMeasure;
use crate::{Error, Result};

/// Largest relative defect tolerated when comparing probability masses.
pub(crate) const MEASURE_SUM_TOL: f64 = 1e-12;

/// A finite measure space with dynamics: a map table `α` on `{0, …, n-1}`
/// and strictly positive point masses `m`.
///
/// Invariants (enforced at construction):
/// * at least one point;
/// * every map entry lies in `[0, n)`;
/// * every mass is finite and strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDynSystem {
    map: Vec<usize>,
    mass: Vec<f64>,
}

impl FiniteDynSystem {
    /// Validates and builds a system from a map table and point masses.
    pub fn new(map: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::EmptySystem);
        }
        if map.len() != mass.len() {
            return Err(Error::LengthMismatch {
                what: "mass vector vs map table",
                expected: map.len(),
                got: mass.len(),
            });
        }
        let n = map.len();
        for (index, &value) in map.iter().enumerate() {
            if value >= n {
                return Err(Error::MapEntryOutOfRange {
                    index,
                    value: value as i64,
                    n,
                });
            }
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        Ok(Self { map, mass })
    }

    /// Number of points in the phase space.
    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// The map table: `map()[x]` is `α(x)`.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// The point masses.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Applies the map once.
    pub fn alpha(&self, x: usize) -> usize {
        self.map[x]
    }

    /// Total mass `m(X)`.
    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Smallest point mass.
    pub fn min_mass(&self) -> f64 {
        self.mass.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Smallest constant `C` with `m(α⁻¹ E) ≤ C · m(E)` for all subsets `E`,
    /// i.e. `max_j m(α⁻¹{j}) / m(j)` (empty preimages contribute zero).
    ///
    /// Both sides are additive over points, so the worst singleton is the
    /// worst set and the maximum over `j` is exact, not just a bound.
    pub fn expansion_constant(&self) -> f64 {
        let mut preimage_mass = vec![0.0; self.n()];
        for (i, &j) in self.map.iter().enumerate() {
            preimage_mass[j] += self.mass[i];
        }
        preimage_mass
            .iter()
            .zip(&self.mass)
            .map(|(&pm, &m)| pm / m)
            .fold(0.0, f64::max)
    }

    /// Lookup table for `α^k`: entry `x` is `α^k(x)`. `k = 0` gives the
    /// identity table.
    ///
    /// Built by repeated composition with `α`, so the cost is `O(k·n)`;
    /// the iterate counts used in this crate stay small enough that the
    /// doubling trick would be noise.
    pub fn iterate_map_table(&self, k: usize) -> Vec<usize> {
        let mut table: Vec<usize> = (0..self.n()).collect();
        for _ in 0..k {
            for entry in table.iter_mut() {
                *entry = self.map[*entry];
            }
        }
        table
    }

    /// Birkhoff sum `S_k φ(x) = φ(x) + φ(α x) + … + φ(α^{k-1} x)`;
    /// zero when `k = 0`.
    pub fn birkhoff_sum(&self, phi: &PotentialVector, x: usize, k: usize) -> f64 {
        let mut sum = 0.0;
        let mut point = x;
        for _ in 0..k {
            sum += phi.values()[point];
            point = self.map[point];
        }
        sum
    }

    /// Empirical measure `δ_{x,k}` of the length-`k` orbit segment starting
    /// at `x`: the density puts weight `(visits to i)/k` on each point `i`.
    ///
    /// # Panics
    ///
    /// Panics if `k == 0`; an empirical measure needs at least one visit.
    pub fn empirical_measure(&self, x: usize, k: usize) -> DensityMeasure {
        assert!(k > 0, "empirical measure needs at least one orbit step");
        let mut visits = vec![0.0; self.n()];
        let mut point = x;
        for _ in 0..k {
            visits[point] += 1.0;
            point = self.map[point];
        }
        let k = k as f64;
        for v in visits.iter_mut() {
            *v /= k;
        }
        DensityMeasure::normalized(visits).expect("visit counts sum to k > 0")
    }

    /// Decomposes the functional graph of `α` into cycles and trees.
    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        CycleDecomposition::build(self)
    }
}

/// A real potential `φ` on the phase space, one value per point.
///
/// Invariants: same length as the system, all entries finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialVector {
    values: Vec<f64>,
}

impl PotentialVector {
    /// Validates length and finiteness against `sys`.
    pub fn new(sys: &FiniteDynSystem, values: Vec<f64>) -> Result<Self> {
        if values.len() != sys.n() {
            return Err(Error::LengthMismatch {
                what: "potential vector",
                expected: sys.n(),
                got: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
        }
        Ok(Self { values })
    }

    /// The identically-zero potential.
    pub fn zeros(sys: &FiniteDynSystem) -> Self {
        Self {
            values: vec![0.0; sys.n()],
        }
    }

    /// The potential values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// The cycle/tree structure of a functional graph.
///
/// Each point of a finite system is eventually periodic: its orbit enters
/// exactly one cycle after `tail_length` steps. Cycles are stored rotated to
/// start at their smallest element and sorted by that element, so the
/// decomposition of a given system is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
    cycle_of: Vec<usize>,
    tail_length: Vec<usize>,
}

impl CycleDecomposition {
    fn build(sys: &FiniteDynSystem) -> Self {
        let n = sys.n();
        // 0 = unvisited, 1 = on the current walk, 2 = resolved.
        let mut state = vec![0u8; n];
        let mut cycle_of = vec![usize::MAX; n];
        let mut tail_length = vec![0usize; n];
        let mut cycles: Vec<Vec<usize>> = Vec::new();

        for start in 0..n {
            if state[start] == 2 {
                continue;
            }
            let mut path = Vec::new();
            let mut x = start;
            while state[x] == 0 {
                state[x] = 1;
                path.push(x);
                x = sys.alpha(x);
            }
            if state[x] == 1 {
                // The walk closed on itself: the suffix of `path` from the
                // first occurrence of `x` is a brand-new cycle.
                let pos = path
                    .iter()
                    .position(|&y| y == x)
                    .expect("walk state 1 implies membership in current path");
                let cycle_index = cycles.len();
                for &y in &path[pos..] {
                    cycle_of[y] = cycle_index;
                    tail_length[y] = 0;
                    state[y] = 2;
                }
                cycles.push(path[pos..].to_vec());
                for (dist, &y) in path[..pos].iter().rev().enumerate() {
                    cycle_of[y] = cycle_index;
                    tail_length[y] = dist + 1;
                    state[y] = 2;
                }
            } else {
                // The walk ran into already-resolved territory: the whole
                // path is a tail hanging off x's cycle.
                let cycle_index = cycle_of[x];
                let base = tail_length[x];
                for (dist, &y) in path.iter().rev().enumerate() {
                    cycle_of[y] = cycle_index;
                    tail_length[y] = base + dist + 1;
                    state[y] = 2;
                }
            }
        }

        // Canonical form: rotate each cycle to its smallest element, then
        // order cycles by smallest element and remap indices.
        for cycle in cycles.iter_mut() {
            let min_pos = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| v)
                .map(|(i, _)| i)
                .expect("cycles are nonempty");
            cycle.rotate_left(min_pos);
        }
        let mut order: Vec<usize> = (0..cycles.len()).collect();
        order.sort_by_key(|&i| cycles[i][0]);
        let mut remap = vec![0usize; cycles.len()];
        for (new_index, &old_index) in order.iter().enumerate() {
            remap[old_index] = new_index;
        }
        let mut sorted_cycles = vec![Vec::new(); cycles.len()];
        for (old_index, cycle) in cycles.into_iter().enumerate() {
            sorted_cycles[remap[old_index]] = cycle;
        }
        for c in cycle_of.iter_mut() {
            *c = remap[*c];
        }

        Self {
            cycles: sorted_cycles,
            cycle_of,
            tail_length,
        }
    }

    /// The cycles, each listed in map order starting from its smallest
    /// element, sorted by smallest element.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Index (into [`cycles`](Self::cycles)) of the cycle the orbit of `x`
    /// eventually enters.
    pub fn cycle_of(&self, x: usize) -> usize {
        self.cycle_of[x]
    }

    /// Number of steps before the orbit of `x` enters its cycle
    /// (zero exactly when `x` lies on a cycle).
    pub fn tail_length(&self, x: usize) -> usize {
        self.tail_length[x]
    }

    /// Whether `x` lies on a cycle.
    pub fn is_on_cycle(&self, x: usize) -> bool {
        self.tail_length[x] == 0
    }

    /// All cyclic points, i.e. the eventual image `∩_k α^k(X)`.
    pub fn eventual_image(&self) -> Vec<usize> {
        let mut points: Vec<usize> = self.cycles.iter().flatten().copied().collect();
        points.sort_unstable();
        points
    }

    /// Longest tail in the graph; `α^k(X)` equals the eventual image exactly
    /// for `k` at or beyond this value.
    pub fn max_tail_length(&self) -> usize {
        self.tail_length.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sys(map: Vec<usize>, mass: Vec<f64>) -> FiniteDynSystem {
        FiniteDynSystem::new(map, mass).unwrap()
    }

    #[test]
    fn rejects_empty_system() {
        assert!(matches!(
            FiniteDynSystem::new(vec![], vec![]),
            Err(Error::EmptySystem)
        ));
    }

    #[test]
    fn rejects_out_of_range_map_entry() {
        let err = FiniteDynSystem::new(vec![2, 0], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::MapEntryOutOfRange { index: 0, value: 2, n: 2 }));
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(FiniteDynSystem::new(vec![0], vec![0.0]).is_err());
        assert!(FiniteDynSystem::new(vec![0], vec![-1.0]).is_err());
        assert!(FiniteDynSystem::new(vec![0], vec![f64::NAN]).is_err());
        assert!(FiniteDynSystem::new(vec![0], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_length_mismatch() {
        assert!(FiniteDynSystem::new(vec![0, 1], vec![1.0]).is_err());
    }

    #[test]
    fn expansion_constant_collapse_map() {
        // Both points map to 0: m(α⁻¹{0}) = 3, m(α⁻¹{1}) = 0.
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        assert_eq!(s.expansion_constant(), 3.0);
    }

    #[test]
    fn expansion_constant_permutation_uniform() {
        let s = sys(vec![1, 0], vec![1.0, 1.0]);
        assert_eq!(s.expansion_constant(), 1.0);
    }

    #[test]
    fn iterate_table_three_cycle() {
        let s = sys(vec![1, 2, 0], vec![1.0, 1.0, 1.0]);
        assert_eq!(s.iterate_map_table(0), vec![0, 1, 2]);
        assert_eq!(s.iterate_map_table(2), vec![2, 0, 1]);
        assert_eq!(s.iterate_map_table(3), vec![0, 1, 2]);
    }

    #[test]
    fn birkhoff_sums_on_swap() {
        let s = sys(vec![1, 0], vec![1.0, 1.0]);
        let phi = PotentialVector::new(&s, vec![0.25, -1.0]).unwrap();
        assert_eq!(s.birkhoff_sum(&phi, 0, 0), 0.0);
        assert_eq!(s.birkhoff_sum(&phi, 0, 1), 0.25);
        assert_eq!(s.birkhoff_sum(&phi, 0, 3), 0.25 - 1.0 + 0.25);
    }

    #[test]
    fn empirical_measure_swap() {
        let s = sys(vec![1, 0], vec![1.0, 1.0]);
        let mu = s.empirical_measure(0, 2);
        assert_eq!(mu.densities(), &[0.5, 0.5]);
        let mu = s.empirical_measure(1, 1);
        assert_eq!(mu.densities(), &[0.0, 1.0]);
    }

    #[test]
    fn cycle_decomposition_pure_cycle() {
        let s = sys(vec![1, 2, 0], vec![1.0, 1.0, 1.0]);
        let d = s.cycle_decomposition();
        assert_eq!(d.cycles(), &[vec![0, 1, 2]]);
        assert!((0..3).all(|x| d.is_on_cycle(x)));
        assert_eq!(d.max_tail_length(), 0);
    }

    #[test]
    fn cycle_decomposition_collapse() {
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        let d = s.cycle_decomposition();
        assert_eq!(d.cycles(), &[vec![0]]);
        assert_eq!(d.tail_length(1), 1);
        assert_eq!(d.cycle_of(1), 0);
        assert_eq!(d.eventual_image(), vec![0]);
    }

    #[test]
    fn cycle_decomposition_two_cycles_with_tails() {
        // 0→1→0 is a 2-cycle; 2→1 joins it; 3→3 a fixed point; 4→3 joins.
        let s = sys(vec![1, 0, 1, 3, 3], vec![1.0; 5]);
        let d = s.cycle_decomposition();
        assert_eq!(d.cycles(), &[vec![0, 1], vec![3]]);
        assert_eq!(d.cycle_of(2), 0);
        assert_eq!(d.tail_length(2), 1);
        assert_eq!(d.cycle_of(4), 1);
        assert_eq!(d.eventual_image(), vec![0, 1, 3]);
        assert_eq!(d.max_tail_length(), 1);
    }

    use crate::testutil::arb_system;

    proptest! {
        #[test]
        fn empirical_measures_are_probabilities(
            s in arb_system(10),
            x_raw in 0usize..10,
            k in 1usize..30,
        ) {
            let x = x_raw % s.n();
            let mu = s.empirical_measure(x, k);
            let sum: f64 = mu.densities().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(mu.densities().iter().all(|&p| p >= 0.0));
        }

        #[test]
        fn birkhoff_sums_are_additive_along_orbits(
            s in arb_system(10),
            x_raw in 0usize..10,
            a in 0usize..12,
            b in 0usize..12,
        ) {
            let x = x_raw % s.n();
            let phi_values: Vec<f64> = (0..s.n()).map(|i| (i as f64) * 0.37 - 1.0).collect();
            let phi = PotentialVector::new(&s, phi_values).unwrap();
            let mid = s.iterate_map_table(a)[x];
            let lhs = s.birkhoff_sum(&phi, x, a + b);
            let rhs = s.birkhoff_sum(&phi, x, a) + s.birkhoff_sum(&phi, mid, b);
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }

        #[test]
        fn iterate_tables_compose(s in arb_system(9), a in 0usize..6, b in 0usize..6) {
            let ta = s.iterate_map_table(a);
            let tb = s.iterate_map_table(b);
            let tab = s.iterate_map_table(a + b);
            for x in 0..s.n() {
                prop_assert_eq!(tab[x], tb[ta[x]]);
            }
        }

        #[test]
        fn empirical_transport_identity(
            s in arb_system(8),
            x_raw in 0usize..8,
            k in 1usize..25,
        ) {
            // δ_{x,k}(f∘α) − δ_{x,k}(f) = (f(α^k x) − f(x)) / k for any f.
            let x = x_raw % s.n();
            let f: Vec<f64> = (0..s.n()).map(|i| ((i * 31 + 7) % 13) as f64).collect();
            let f_alpha: Vec<f64> = (0..s.n()).map(|i| f[s.alpha(i)]).collect();
            let mu = s.empirical_measure(x, k);
            let lhs = mu.expectation(&f_alpha) - mu.expectation(&f);
            let end = s.iterate_map_table(k)[x];
            let rhs = (f[end] - f[x]) / (k as f64);
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn cycle_structure_is_consistent(s in arb_system(12)) {
            let d = s.cycle_decomposition();
            // Each cycle is genuinely cyclic under the map and disjoint.
            let mut seen = vec![false; s.n()];
            for cycle in d.cycles() {
                for (i, &x) in cycle.iter().enumerate() {
                    prop_assert!(!seen[x]);
                    seen[x] = true;
                    prop_assert_eq!(s.alpha(x), cycle[(i + 1) % cycle.len()]);
                    prop_assert!(d.is_on_cycle(x));
                }
            }
            // Tails shrink by one along the map and land on the right cycle.
            for (x, &on_cycle) in seen.iter().enumerate() {
                let t = d.tail_length(x);
                if t > 0 {
                    prop_assert_eq!(d.tail_length(s.alpha(x)), t - 1);
                    prop_assert_eq!(d.cycle_of(s.alpha(x)), d.cycle_of(x));
                } else {
                    prop_assert!(on_cycle);
                }
            }
            // Beyond the longest tail the iterated image is the eventual image.
            let k = d.max_tail_length();
            let table = s.iterate_map_table(k);
            let mut image: Vec<usize> = table.to_vec();
            image.sort_unstable();
            image.dedup();
            prop_assert_eq!(image, d.eventual_image());
        }
    }
}

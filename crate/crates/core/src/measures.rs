//! Density measures, the polytope of invariant measures, and weak-star
//! neighborhoods.
//!
//! A *density measure* on the phase space is a probability vector `p`: it
//! integrates a function `f` as `μ(f) = Σ_i f(i) p(i)`. A measure is
//! *invariant* when `μ(f∘α) = μ(f)` for all `f`, equivalently when the
//! push-forward of `p` under the map equals `p`.
//!
//! For a finite system the invariant measures form a simplex: its extreme
//! points are exactly the uniform measures sitting on the cycles of the map
//! (mass `1/L` on each point of a length-`L` cycle, nothing elsewhere), and
//! every invariant measure is a unique convex mixture of these. That
//! description is computed directly from the cycle decomposition here and is
//! cross-validated in the test suite against a vertex enumeration of the
//! defining linear constraints.
//!
//! Weak-star neighborhoods are the finite-data version of weak-star opens:
//! a center `μ`, finitely many test functions `f_1, …, f_r`, and a radius
//! `ε` determine `O = {ν : |ν(f_s) − μ(f_s)| < ε ∀s}`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dynsys::{FiniteDynSystem, MEASURE_SUM_TOL};
use crate::{Error, Result};

/// A probability vector `p` on the phase space; integrates functions as
/// `μ(f) = Σ_i f(i) p(i)`.
///
/// Invariants: entries nonnegative and finite, `Σ p(i) = 1` within `1e-12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMeasure {
    p: Vec<f64>,
}

impl DensityMeasure {
    /// Validates a probability vector exactly as given.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        for (index, &value) in p.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeDensity { index, value });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > MEASURE_SUM_TOL {
            return Err(Error::MeasureNotNormalized {
                sum,
                tol: MEASURE_SUM_TOL,
            });
        }
        Ok(Self { p })
    }

    /// Rescales a nonnegative vector with positive sum into a probability
    /// vector. Used where the caller produces exact ratios whose floating
    /// sum may be one only up to round-off.
    pub fn normalized(mut raw: Vec<f64>) -> Result<Self> {
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeDensity { index, value });
            }
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::MeasureNotNormalized {
                sum,
                tol: MEASURE_SUM_TOL,
            });
        }
        for v in raw.iter_mut() {
            *v /= sum;
        }
        Ok(Self { p: raw })
    }

    /// The point mass at `x` in an `n`-point space.
    pub fn dirac(n: usize, x: usize) -> Self {
        assert!(x < n, "dirac point out of range");
        let mut p = vec![0.0; n];
        p[x] = 1.0;
        Self { p }
    }

    /// The probability weights.
    pub fn densities(&self) -> &[f64] {
        &self.p
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.p.len()
    }

    /// Whether the support is empty (never true for a valid measure).
    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Integral `μ(f) = Σ_i f(i) p(i)`.
    ///
    /// # Panics
    ///
    /// Panics if `f` has the wrong length.
    pub fn expectation(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.p.len(), "test function has wrong length");
        f.iter().zip(&self.p).map(|(&fi, &pi)| fi * pi).sum()
    }

    /// Push-forward weights under the map: `(α_* p)(j) = Σ_{α(i)=j} p(i)`.
    pub fn push_forward(&self, sys: &FiniteDynSystem) -> Vec<f64> {
        assert_eq!(self.p.len(), sys.n(), "measure and system sizes differ");
        let mut out = vec![0.0; sys.n()];
        for (i, &j) in sys.map().iter().enumerate() {
            out[j] += self.p[i];
        }
        out
    }

    /// Largest coordinate defect `max_j |(α_* p)(j) − p(j)|` of invariance.
    pub fn invariance_defect(&self, sys: &FiniteDynSystem) -> f64 {
        self.push_forward(sys)
            .iter()
            .zip(&self.p)
            .map(|(&t, &p)| (t - p).abs())
            .fold(0.0, f64::max)
    }

    /// Whether the measure is invariant under the map within `tol`.
    pub fn is_invariant(&self, sys: &FiniteDynSystem, tol: f64) -> bool {
        self.invariance_defect(sys) <= tol
    }
}

/// The simplex of invariant density measures of a system.
///
/// Extreme points are the uniform measures on the cycles of the map, listed
/// in the canonical cycle order of [`CycleDecomposition`]; a weight vector
/// over cycles picks out the corresponding mixture.
///
/// [`CycleDecomposition`]: crate::dynsys::CycleDecomposition
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantPolytope {
    cycles: Vec<Vec<usize>>,
    extreme_points: Vec<DensityMeasure>,
}

impl InvariantPolytope {
    /// Computes the invariant simplex of `sys` from its cycle structure.
    pub fn of(sys: &FiniteDynSystem) -> Self {
        let decomposition = sys.cycle_decomposition();
        let n = sys.n();
        let extreme_points = decomposition
            .cycles()
            .iter()
            .map(|cycle| {
                let mut p = vec![0.0; n];
                let w = 1.0 / cycle.len() as f64;
                for &x in cycle {
                    p[x] = w;
                }
                DensityMeasure { p }
            })
            .collect();
        Self {
            cycles: decomposition.cycles().to_vec(),
            extreme_points,
        }
    }

    /// The cycles carrying the extreme points, in matching order.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// The extreme points: uniform measures on the cycles.
    pub fn extreme_points(&self) -> &[DensityMeasure] {
        &self.extreme_points
    }

    /// Number of extreme points.
    pub fn num_extremes(&self) -> usize {
        self.extreme_points.len()
    }

    /// Convex mixture of the extreme points with the given barycentric
    /// weights (nonnegative, summing to one within `1e-9`).
    pub fn mix(&self, weights: &[f64]) -> Result<DensityMeasure> {
        if weights.len() != self.extreme_points.len() {
            return Err(Error::LengthMismatch {
                what: "cycle weight vector",
                expected: self.extreme_points.len(),
                got: weights.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeDensity { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::MeasureNotNormalized { sum, tol: 1e-9 });
        }
        let n = self.extreme_points[0].len();
        let mut p = vec![0.0; n];
        for (w, extreme) in weights.iter().zip(&self.extreme_points) {
            for (pi, &ei) in p.iter_mut().zip(extreme.densities()) {
                *pi += w * ei;
            }
        }
        DensityMeasure::normalized(p)
    }
}

/// A weak-star neighborhood `O = {ν : |ν(f_s) − μ(f_s)| < ε}` determined by
/// finitely many test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakStarNeighborhood {
    center: DensityMeasure,
    test_functions: Vec<Vec<f64>>,
    epsilon: f64,
}

impl WeakStarNeighborhood {
    /// Validates radius and test-function shapes against the center.
    pub fn new(
        center: DensityMeasure,
        test_functions: Vec<Vec<f64>>,
        epsilon: f64,
    ) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::NonFiniteEntry {
                index: 0,
                value: epsilon,
            });
        }
        for f in &test_functions {
            if f.len() != center.len() {
                return Err(Error::LengthMismatch {
                    what: "test function",
                    expected: center.len(),
                    got: f.len(),
                });
            }
            for (index, &value) in f.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteEntry { index, value });
                }
            }
        }
        Ok(Self {
            center,
            test_functions,
            epsilon,
        })
    }

    /// The center measure.
    pub fn center(&self) -> &DensityMeasure {
        &self.center
    }

    /// The test functions cutting out the neighborhood.
    pub fn test_functions(&self) -> &[Vec<f64>] {
        &self.test_functions
    }

    /// The radius.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Strict membership test: every test integral within `ε` of the center.
    pub fn contains(&self, nu: &DensityMeasure) -> bool {
        self.test_functions.iter().all(|f| {
            (nu.expectation(f) - self.center.expectation(f)).abs() < self.epsilon
        })
    }

    /// A neighborhood of the same center and test functions with radius
    /// `eps`.
    pub fn with_epsilon(&self, eps: f64) -> Result<Self> {
        Self::new(self.center.clone(), self.test_functions.clone(), eps)
    }
}

/// Draws a deterministic batch of density measures for randomized checks:
/// `count` flat-Dirichlet samples, followed by every point mass `δ_i`,
/// followed by the extreme points of the invariant simplex.
pub fn sample_measures(sys: &FiniteDynSystem, count: usize, seed: u64) -> Vec<DensityMeasure> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count + sys.n());
    for _ in 0..count {
        out.push(dirichlet_flat(sys.n(), &mut rng));
    }
    for x in 0..sys.n() {
        out.push(DensityMeasure::dirac(sys.n(), x));
    }
    out.extend(InvariantPolytope::of(sys).extreme_points().iter().cloned());
    out
}

/// One sample from the flat Dirichlet distribution on the `n`-simplex,
/// via normalized standard-exponential draws.
pub(crate) fn dirichlet_flat<R: Rng>(n: usize, rng: &mut R) -> DensityMeasure {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen(); // in [0, 1)
            -(1.0 - u).ln()
        })
        .collect();
    DensityMeasure::normalized(raw).expect("exponential draws are positive")
}

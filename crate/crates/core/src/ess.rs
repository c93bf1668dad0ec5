//! Exponential smallness of deviation sets, with checkable certificates.
//!
//! Two related facilities live here.
//!
//! **Decay certificates.** A converged inner solve at `(μ, D, n)` yields
//! the transported row measure `μ'` with the dual feasibility property
//! `Σ_g (μ(g)/μ'(g)) c_g(j) ≤ m(j)`. Define the potential
//!
//! ```text
//! ψ(i) = Σ_g g(i) · ln( μ(g) / μ'(g) ).
//! ```
//!
//! Then for every `f ≥ 0` and every repetition count `N ≥ 1`,
//!
//! ```text
//! ∫ exp(S_N ψ) · (f ∘ α^{nN}) dm  ≤  ∫ f dm,
//! S_N ψ(x) = Σ_{k<N} ψ(α^{nk} x),
//! ```
//!
//! by induction on `N`: the weighted geometric mean `e^{ψ(i)}` is at most
//! the matching arithmetic mean `Σ_g g(i) μ(g)/μ'(g)` (the exponents
//! `g(i)` sum to one), which reduces each step to dual feasibility. The
//! Birkhoff sums of `ψ` also satisfy an exact algebraic identity: with
//! `ν_{x,N}` the empirical measure of `x` along `N` steps of the `n`-step
//! map,
//!
//! ```text
//! S_N ψ(x) = −N · Σ_g ν_{x,N}(g) ln( μ'(g)/μ(g) ),
//! ```
//!
//! i.e. minus `N` times the cross level value of `ν_{x,N}` against `μ` —
//! both sides are the same double sum read in different orders. The
//! [`certificate_checks`] routine verifies the identity at random points
//! and the contraction inequality at random test functions.
//!
//! **Deviation set sweep.** For a weak-* neighborhood `O` of a measure,
//! the horizon-`n` deviation set is `X_n = { x : δ_{x,n} ∉ O }`, where
//! `δ_{x,n}` is the empirical measure of the first `n` orbit points. On
//! systems where orbits settle into cycles quickly, `m(X_n)` decays (or
//! vanishes outright), and for any rate budget `t` the constant
//!
//! ```text
//! C = max_{n ≤ n_max} max_j  m(X_n ∩ α^{-n}{j}) / ( e^{nt} m(j) )
//! ```
//!
//! makes the family of bounds `∫_{X_n} (f ∘ α^n) dm ≤ C e^{nt} ∫ f dm`
//! hold for **all** `f ≥ 0` simultaneously — the sweep reports `C`, the
//! per-row smallest constants, a least-squares decay rate of `ln m(X_n)`,
//! and explicit bound checks for caller-supplied test functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dynsys::FiniteDynSystem;
use crate::measures::{DensityMeasure, WeakStarNeighborhood};
use crate::partitions::PartitionOfUnity;
use crate::tentropy::{cross_level_value, row_weights, solve_tau_n_d, SolverConfig,
                      ROW_WEIGHT_FLOOR};
use crate::{Error, Result};

/// Default neighborhood radii swept, largest first.
pub const DEFAULT_EPS_SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.02];

/// Tolerance used when re-checking certified inequalities in floating
/// point.
pub const CHECK_TOL: f64 = 1e-9;

/// A decay certificate: the potential `ψ` produced by one converged inner
/// solve, together with everything needed to re-verify its properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ESSCertificate {
    /// The certificate potential `ψ(i) = Σ_g g(i) ln(μ(g)/μ'(g))`.
    pub psi: Vec<f64>,
    /// `max_i |ψ(i)|`.
    pub c_psi: f64,
    /// Level of the underlying solve (steps of `α` per application).
    pub n_steps: usize,
    /// Row weights `μ(g)`.
    pub mu_weights: Vec<f64>,
    /// Transported row measure `μ'(g)` from the solve.
    pub mu_prime: Vec<f64>,
    /// The level value `τ_n(μ, D)` of the solve.
    pub value: f64,
}

impl ESSCertificate {
    /// Birkhoff sum `S_N ψ(x) = Σ_{k<N} ψ(α^{n·k} x)` along the
    /// `n_steps`-fold map.
    pub fn birkhoff(&self, sys: &FiniteDynSystem, x: usize, reps: usize) -> f64 {
        let table = sys.iterate_map_table(self.n_steps);
        let mut acc = 0.0;
        let mut point = x;
        for _ in 0..reps {
            acc += self.psi[point];
            point = table[point];
        }
        acc
    }
}

/// Builds a decay certificate from a converged inner solve at `(μ, D, n)`.
///
/// Preconditions: `μ(g)` strictly positive on every mass-carrying row
/// (otherwise `ψ` degenerates to `−∞` somewhere), and the solver must
/// converge within its configured budget.
pub fn build_certificate(
    sys: &FiniteDynSystem,
    mu: &DensityMeasure,
    d: &PartitionOfUnity,
    n_steps: usize,
    cfg: &SolverConfig,
) -> Result<ESSCertificate> {
    let mu_weights = row_weights(d, mu);
    for (g, row) in d.rows().iter().enumerate() {
        let row_mass: f64 = row.iter().zip(sys.mass()).map(|(&gi, &mi)| gi * mi).sum();
        if row_mass > 0.0 && mu_weights[g] <= ROW_WEIGHT_FLOOR {
            return Err(Error::NotStrictlyPositive {
                what: "every mass-carrying row of the partition",
            });
        }
    }
    let outcome = solve_tau_n_d(sys, mu, d, n_steps, cfg, None)?;
    if !outcome.converged {
        return Err(Error::SolverDidNotConverge {
            iterations: outcome.iterations,
        });
    }
    let psi: Vec<f64> = (0..sys.n())
        .map(|i| {
            d.rows()
                .iter()
                .enumerate()
                .filter(|(_, row)| row[i] > 0.0)
                .map(|(g, row)| row[i] * (mu_weights[g] / outcome.mu_prime[g]).ln())
                .sum()
        })
        .collect();
    let c_psi = psi.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    Ok(ESSCertificate {
        psi,
        c_psi,
        n_steps,
        mu_weights,
        mu_prime: outcome.mu_prime,
        value: outcome.value,
    })
}

/// Outcome of re-verifying a certificate against its defining properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheckReport {
    /// Worst `|S_N ψ(x) + N·cross(ν_{x,N})|` over the sampled points.
    pub identity_max_err: f64,
    /// Worst `lhs − rhs` of the contraction inequality over the sampled
    /// test functions (nonpositive up to floating point when valid).
    pub contraction_max_excess: f64,
    /// `(x, N)` pairs sampled for the identity.
    pub points_checked: usize,
    /// Nonnegative test functions sampled for the contraction.
    pub functions_checked: usize,
    /// Both families passed at [`CHECK_TOL`].
    pub all_passed: bool,
}

/// Verifies a certificate: the Birkhoff-sum identity at `points` random
/// `(x, N)` pairs and the `N`-fold contraction inequality at `functions`
/// random nonnegative test functions, with horizons up to `max_reps`.
pub fn certificate_checks(
    sys: &FiniteDynSystem,
    d: &PartitionOfUnity,
    cert: &ESSCertificate,
    points: usize,
    functions: usize,
    max_reps: usize,
    seed: u64,
) -> CertificateCheckReport {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = sys.n();
    let table = sys.iterate_map_table(cert.n_steps);

    let mut identity_max_err = 0.0f64;
    for _ in 0..points {
        let x = rng.gen_range(0..n);
        let reps = rng.gen_range(1..=max_reps.max(1));
        // Empirical measure of x along `reps` applications of the n-step
        // map, as a density vector.
        let mut emp = vec![0.0; n];
        let mut point = x;
        for _ in 0..reps {
            emp[point] += 1.0 / reps as f64;
            point = table[point];
        }
        let nu = DensityMeasure::new(emp).expect("empirical weights sum to one");
        let nu_weights = row_weights(d, &nu);
        let cross = cross_level_value(&nu_weights, &cert.mu_weights, &cert.mu_prime);
        let lhs = cert.birkhoff(sys, x, reps);
        identity_max_err = identity_max_err.max((lhs + reps as f64 * cross).abs());
    }

    let mut contraction_max_excess = f64::NEG_INFINITY;
    for _ in 0..functions {
        let f: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let reps = rng.gen_range(1..=max_reps.max(1));
        let mut lhs = 0.0;
        for x in 0..n {
            let mut point = x;
            let mut s = 0.0;
            for _ in 0..reps {
                s += cert.psi[point];
                point = table[point];
            }
            lhs += sys.mass()[x] * s.exp() * f[point];
        }
        let rhs: f64 = sys.mass().iter().zip(&f).map(|(&m, &fi)| m * fi).sum();
        contraction_max_excess = contraction_max_excess.max(lhs - rhs);
    }

    let all_passed = identity_max_err <= CHECK_TOL
        && (functions == 0 || contraction_max_excess <= CHECK_TOL);
    CertificateCheckReport {
        identity_max_err,
        contraction_max_excess,
        points_checked: points,
        functions_checked: functions,
        all_passed,
    }
}

/// The horizon-`n` deviation set `X_n = { x : δ_{x,horizon} ∉ O }`,
/// computed by brute force over all points.
pub fn x_n_set(sys: &FiniteDynSystem, o: &WeakStarNeighborhood, horizon: usize) -> Vec<usize> {
    (0..sys.n())
        .filter(|&x| !o.contains(&sys.empirical_measure(x, horizon)))
        .collect()
}

/// The coordinate indicator functions, the strongest finite family of
/// weak-* test functions on a finite system.
pub fn coordinate_test_functions(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut f = vec![0.0; n];
            f[i] = 1.0;
            f
        })
        .collect()
}

/// One horizon row of a deviation-set sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ESSRow {
    /// Horizon `n`.
    pub n: usize,
    /// Number of points in `X_n`.
    pub set_size: usize,
    /// `m(X_n)`.
    pub set_mass: f64,
    /// Smallest constant for the unit function:
    /// `m(X_n) / (e^{nt} m(X))`.
    pub min_c_unit: f64,
    /// All supplied test functions satisfied
    /// `∫_{X_n} (f∘α^n) dm ≤ C e^{nt} ∫ f dm` at this row.
    pub bound_holds: bool,
}

/// Sweep results at one neighborhood radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsReport {
    /// Neighborhood radius ε.
    pub eps: f64,
    /// One row per horizon `1..=n_max`.
    pub rows: Vec<ESSRow>,
    /// Rows with `m(X_n) > 0`.
    pub nonempty_rows: usize,
    /// Least-squares slope of `ln m(X_n)` over the nonempty rows;
    /// `−∞` when fewer than three rows are nonempty (vacuous decay).
    pub fitted_rate: f64,
    /// `fitted_rate ≤ t`.
    pub rate_certified: bool,
    /// The universal constant `C` defined in the module docs.
    pub universal_c: f64,
    /// Conjunction of the per-row bound checks.
    pub all_bounds_hold: bool,
}

/// Full deviation-set sweep report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ESSSweepReport {
    /// Rate budget `t` the constants were computed against.
    pub t: f64,
    /// Largest horizon swept.
    pub n_max: usize,
    /// One report per radius, in the order supplied.
    pub eps_reports: Vec<EpsReport>,
}

/// Sweeps deviation sets of weak-* neighborhoods of `center` over the
/// given radii and horizons `1..=n_max`, scoring decay against the rate
/// budget `t`. Neighborhoods test all coordinate indicators; `bound_fns`
/// are extra nonnegative functions checked against the universal constant
/// (the unit function is always included).
pub fn ess_sweep(
    sys: &FiniteDynSystem,
    center: &DensityMeasure,
    t: f64,
    eps_list: &[f64],
    n_max: usize,
    bound_fns: &[Vec<f64>],
) -> Result<ESSSweepReport> {
    if center.len() != sys.n() {
        return Err(Error::LengthMismatch {
            what: "measure vs system",
            expected: sys.n(),
            got: center.len(),
        });
    }
    for f in bound_fns {
        if f.len() != sys.n() {
            return Err(Error::LengthMismatch {
                what: "test function vs system",
                expected: sys.n(),
                got: f.len(),
            });
        }
        if let Some(&bad) = f.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                index: f.iter().position(|&v| v == bad).unwrap_or(0),
                value: bad,
            });
        }
    }
    assert!(n_max >= 1, "sweep needs at least one horizon");

    let tests = coordinate_test_functions(sys.n());
    let unit = vec![1.0; sys.n()];
    let all_fns: Vec<&[f64]> = std::iter::once(unit.as_slice())
        .chain(bound_fns.iter().map(|f| f.as_slice()))
        .collect();

    let mut eps_reports = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let o = WeakStarNeighborhood::new(center.clone(), tests.clone(), eps)?;
        // Per horizon: the set, its mass, and the per-column masses
        // m(X_n ∩ α^{-n}{j}) that define the universal constant.
        let mut sets = Vec::with_capacity(n_max);
        let mut universal_c = 0.0f64;
        for horizon in 1..=n_max {
            let set = x_n_set(sys, &o, horizon);
            let table = sys.iterate_map_table(horizon);
            let mut col = vec![0.0; sys.n()];
            for &x in &set {
                col[table[x]] += sys.mass()[x];
            }
            let scale = (-(horizon as f64) * t).exp();
            for (&c, &m) in col.iter().zip(sys.mass()) {
                universal_c = universal_c.max(c * scale / m);
            }
            sets.push((set, table));
        }

        let mut rows = Vec::with_capacity(n_max);
        let mut all_bounds_hold = true;
        for (idx, (set, table)) in sets.iter().enumerate() {
            let horizon = idx + 1;
            let set_mass: f64 = set.iter().map(|&x| sys.mass()[x]).sum();
            let growth = (horizon as f64 * t).exp();
            let min_c_unit = set_mass / (growth * sys.total_mass());
            let mut bound_holds = true;
            for f in &all_fns {
                let lhs: f64 = set.iter().map(|&x| sys.mass()[x] * f[table[x]]).sum();
                let rhs: f64 = sys.mass().iter().zip(*f).map(|(&m, &fi)| m * fi).sum();
                if lhs > universal_c * growth * rhs + CHECK_TOL {
                    bound_holds = false;
                }
            }
            all_bounds_hold &= bound_holds;
            rows.push(ESSRow {
                n: horizon,
                set_size: set.len(),
                set_mass,
                min_c_unit,
                bound_holds,
            });
        }

        // Least-squares decay rate of ln m(X_n) over the nonempty rows.
        let samples: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.set_mass > 0.0)
            .map(|r| (r.n as f64, r.set_mass.ln()))
            .collect();
        let nonempty_rows = samples.len();
        let fitted_rate = if nonempty_rows >= 3 {
            let count = nonempty_rows as f64;
            let sx: f64 = samples.iter().map(|(x, _)| x).sum();
            let sy: f64 = samples.iter().map(|(_, y)| y).sum();
            let sxx: f64 = samples.iter().map(|(x, _)| x * x).sum();
            let sxy: f64 = samples.iter().map(|(x, y)| x * y).sum();
            (count * sxy - sx * sy) / (count * sxx - sx * sx)
        } else {
            f64::NEG_INFINITY
        };

        eps_reports.push(EpsReport {
            eps,
            rows,
            nonempty_rows,
            fitted_rate,
            rate_certified: fitted_rate <= t,
            universal_c,
            all_bounds_hold,
        });
    }

    Ok(ESSSweepReport {
        t,
        n_max,
        eps_reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_system;
    use proptest::prelude::*;

    fn sys(map: Vec<usize>, mass: Vec<f64>) -> FiniteDynSystem {
        FiniteDynSystem::new(map, mass).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn certificate_on_collapse_map() {
        // map = [0,0], masses (1,2), μ = (1/2,1/2), singletons, level 1:
        // μ' = (1, 2), so ψ = (ln(1/2), ln(1/4)).
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        let mu = DensityMeasure::new(vec![0.5, 0.5]).unwrap();
        let d = PartitionOfUnity::singletons(2);
        let cert = build_certificate(&s, &mu, &d, 1, &cfg()).unwrap();
        assert!((cert.psi[0] + 2.0f64.ln()).abs() < 1e-8);
        assert!((cert.psi[1] + 4.0f64.ln()).abs() < 1e-8);
        assert!((cert.c_psi - 4.0f64.ln()).abs() < 1e-8);

        // Contraction is tight at f = indicator of the eventual image:
        // ∫ e^ψ (f∘α) dm = 1·(1/2) + 2·(1/4) = 1 = ∫ f dm.
        let f = [1.0, 0.0];
        let lhs: f64 = (0..2)
            .map(|x| s.mass()[x] * cert.psi[x].exp() * f[s.alpha(x)])
            .sum();
        assert!((lhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn birkhoff_identity_matches_cross_value() {
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        let mu = DensityMeasure::new(vec![0.5, 0.5]).unwrap();
        let d = PartitionOfUnity::singletons(2);
        let cert = build_certificate(&s, &mu, &d, 1, &cfg()).unwrap();
        // Orbit of 1 over two steps visits {1, 0}: S_2ψ(1) = ψ(1) + ψ(0)
        // = −3 ln 2, and the empirical cross value is (3/2) ln 2.
        let lhs = cert.birkhoff(&s, 1, 2);
        assert!((lhs + 3.0 * 2.0f64.ln()).abs() < 1e-8);
        let nu = DensityMeasure::new(vec![0.5, 0.5]).unwrap();
        let nu_w = row_weights(&d, &nu);
        let cross = cross_level_value(&nu_w, &cert.mu_weights, &cert.mu_prime);
        assert!((lhs + 2.0 * cross).abs() < 1e-10);
    }

    #[test]
    fn certificate_requires_interior_measure() {
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        let mu = DensityMeasure::dirac(2, 1);
        let d = PartitionOfUnity::singletons(2);
        assert!(matches!(
            build_certificate(&s, &mu, &d, 1, &cfg()),
            Err(Error::NotStrictlyPositive { .. })
        ));
    }

    #[test]
    fn checks_pass_on_a_three_point_system() {
        let s = sys(vec![1, 2, 1], vec![1.0, 0.5, 2.0]);
        let mu = DensityMeasure::new(vec![0.25, 0.4, 0.35]).unwrap();
        let d = PartitionOfUnity::singletons(3);
        let cert = build_certificate(&s, &mu, &d, 2, &cfg()).unwrap();
        let report = certificate_checks(&s, &d, &cert, 25, 25, 6, 1234);
        assert!(report.all_passed, "{report:?}");
        assert!(report.identity_max_err < 1e-10);
        assert!(report.contraction_max_excess <= CHECK_TOL);
    }

    #[test]
    fn deviation_sets_on_the_swap() {
        // Swap with unit masses: at odd horizons the empirical measure of
        // each point is off-center; at even horizons it is exactly the
        // center, so X_n alternates between everything and nothing.
        let s = sys(vec![1, 0], vec![1.0, 1.0]);
        let center = DensityMeasure::new(vec![0.5, 0.5]).unwrap();
        let o = WeakStarNeighborhood::new(
            center,
            coordinate_test_functions(2),
            0.25,
        )
        .unwrap();
        assert_eq!(x_n_set(&s, &o, 1), vec![0, 1]);
        assert_eq!(x_n_set(&s, &o, 2), Vec::<usize>::new());
        assert_eq!(x_n_set(&s, &o, 3), Vec::<usize>::new()); // distance 1/6 < 1/4
    }

    #[test]
    fn sweep_on_collapsing_map() {
        // Orbit of point 1 reaches the fixed point immediately, so its
        // empirical measure approaches δ_0 at rate 1/n: X_n = {1} while
        // 1/n > ε, then empty.
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        let center = DensityMeasure::dirac(2, 0);
        let t = 0.1;
        let r = ess_sweep(&s, &center, t, &[0.2], 12, &[]).unwrap();
        let rep = &r.eps_reports[0];
        // Membership is strict, so 1/n ≥ 0.2 keeps the point outside:
        // rows 1..=5 are nonempty with mass 2 (at n = 5 the distance sits
        // exactly on the boundary).
        assert_eq!(rep.nonempty_rows, 5);
        for row in &rep.rows {
            if row.n <= 5 {
                assert_eq!(row.set_size, 1);
                assert!((row.set_mass - 2.0).abs() < 1e-12);
            } else {
                assert_eq!(row.set_size, 0);
            }
            assert!(row.bound_holds);
        }
        // Constant mass over the nonempty rows: slope 0 ≤ t.
        assert!(rep.fitted_rate.abs() < 1e-9);
        assert!(rep.rate_certified);
        // C = max_n 2 e^{-nt} / m(0) attained at n = 1.
        assert!((rep.universal_c - 2.0 * (-t).exp()).abs() < 1e-12);
        assert!(rep.all_bounds_hold);
    }

    #[test]
    fn sweep_with_fewer_than_three_rows_is_vacuous() {
        let s = sys(vec![0, 0], vec![1.0, 2.0]);
        let center = DensityMeasure::dirac(2, 0);
        // ε = 0.45: 1/n > 0.45 only at n ∈ {1, 2}.
        let r = ess_sweep(&s, &center, 0.1, &[0.45], 10, &[]).unwrap();
        let rep = &r.eps_reports[0];
        assert_eq!(rep.nonempty_rows, 2);
        assert_eq!(rep.fitted_rate, f64::NEG_INFINITY);
        assert!(rep.rate_certified);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn certificates_always_verify(
            s in arb_system(5),
            raw in proptest::collection::vec(0.1f64..1.0, 5),
            n_steps in 1usize..4,
            seed in 0u64..1000,
        ) {
            let mu = DensityMeasure::normalized(raw[..s.n()].to_vec()).unwrap();
            let d = PartitionOfUnity::singletons(s.n());
            let cert = build_certificate(&s, &mu, &d, n_steps, &cfg()).unwrap();
            let report = certificate_checks(&s, &d, &cert, 10, 10, 5, seed);
            prop_assert!(report.all_passed, "{report:?}");
        }

        #[test]
        fn sweep_bounds_always_hold(
            s in arb_system(6),
            raw in proptest::collection::vec(0.05f64..1.0, 6),
            t in -0.5f64..0.5,
        ) {
            let center = DensityMeasure::normalized(raw[..s.n()].to_vec()).unwrap();
            let fns: Vec<Vec<f64>> = vec![
                raw[..s.n()].to_vec(),
                (0..s.n()).map(|i| (i as f64) * 0.3 + 0.1).collect(),
            ];
            let r = ess_sweep(&s, &center, t, &DEFAULT_EPS_SWEEP, 10, &fns).unwrap();
            for rep in &r.eps_reports {
                prop_assert!(rep.all_bounds_hold);
            }
        }

        #[test]
        fn smaller_radii_give_larger_sets(
            s in arb_system(6),
            raw in proptest::collection::vec(0.05f64..1.0, 6),
        ) {
            let center = DensityMeasure::normalized(raw[..s.n()].to_vec()).unwrap();
            let r = ess_sweep(&s, &center, 0.0, &DEFAULT_EPS_SWEEP, 8, &[]).unwrap();
            for pair in r.eps_reports.windows(2) {
                // eps_reports follow the sweep order (decreasing radius);
                // shrinking the neighborhood can only grow X_n.
                for (wide, narrow) in pair[0].rows.iter().zip(&pair[1].rows) {
                    prop_assert!(narrow.set_mass >= wide.set_mass - 1e-15);
                }
            }
        }
    }
}

//! The weighted shift operator and its spectral exponent on `L¹(X, m)`.
//!
//! For a potential `φ` the operator acts on functions by
//! `(A_φ f)(x) = e^{φ(x)} f(α(x))`, so its `k`-th iterate is
//! `A_φ^k f = e^{S_k φ} · (f ∘ α^k)`. On the finite space, duality over the
//! points gives a closed form for the `L¹` operator norm:
//!
//! ```text
//! ‖A_φ^k‖ = max_j  (1/m(j)) · Σ_{i : α^k(i) = j} e^{S_k φ(i)} m(i),
//! ```
//!
//! the maximum over columns of the push-forward of the weighted mass. The
//! spectral exponent `λ(φ) = lim_k (1/k) ln ‖A_φ^k‖` is computed three ways
//! and cross-checked:
//!
//! 1. **Cycle means** — on a finite system the limit equals the largest
//!    average of `φ` over the cycles of `α` ([`lambda_cycle_mean`]); tails
//!    contribute nothing in the limit. This is the exact reference value.
//! 2. **Power iteration** — the spectral radius of the nonnegative weight
//!    matrix `M[i][α(i)] = e^{φ(i)}` equals `e^{λ(φ)}`; it is estimated by
//!    power iteration in log space ([`lambda_power`]). A plain iteration
//!    need not settle (the peripheral spectrum of a cycle is a whole ring of
//!    eigenvalues), so the iteration runs on the diagonally shifted matrix
//!    `M + εI`, whose spectral radius is exactly `e^{λ(φ)} + ε` and which
//!    has a strictly dominant eigenvalue. The shift is chosen adaptively
//!    from a warm-up pass, the growth sequence is averaged over long
//!    strides to wash out rotational modes, and Aitken Δ² extrapolation
//!    accelerates the remaining geometric tail.
//! 3. **Norm limits** — the sequence `λ_k = (1/k) ln ‖A_φ^k‖` together with
//!    the a-priori tail bound `|λ_k − λ| ≤ K/k` ([`tail_bound`]), where
//!    `K = 2 n max|φ| + ln(m(X)/min_j m(j))`: a length-`k` orbit segment
//!    differs from pure cycling by at most a tail of length `≤ n`, which
//!    perturbs the Birkhoff sum by at most `2 n max|φ|`, and switching
//!    between points costs at most the mass ratio.
//!
//! [`lambda_cycle_mean`]: WeightedShiftOperator::lambda_cycle_mean
//! [`lambda_power`]: WeightedShiftOperator::lambda_power
//! [`tail_bound`]: WeightedShiftOperator::tail_bound

use serde::{Deserialize, Serialize};

use crate::dynsys::{FiniteDynSystem, PotentialVector};
use crate::{Error, Result};

/// Numerically stable `ln(e^a + e^b)`.
fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Stable `ln Σ e^{x_s}` over a slice; `-∞` for an empty slice.
fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - hi).exp()).sum();
    hi + sum.ln()
}

/// The weighted shift `A_φ` of a system and a potential, with its norms and
/// spectral-exponent estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedShiftOperator {
    sys: FiniteDynSystem,
    phi: PotentialVector,
}

/// Result of the power-iteration estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationOutcome {
    /// Estimated spectral exponent `λ(φ)`.
    pub lambda: f64,
    /// Whether the growth estimate stabilized before the iteration cap.
    /// A non-converged estimate is still returned so callers can fall back
    /// to the cycle-mean value.
    pub converged: bool,
    /// Matrix-vector products performed.
    pub iterations: usize,
}

/// Default tolerance on the stabilized growth estimate of [`WeightedShiftOperator::lambda_power`].
pub const POWER_DEFAULT_TOL: f64 = 1e-12;

/// Default iteration cap of [`WeightedShiftOperator::lambda_power`]; high
/// because nearly tied cycle means force a slow geometric tail.
pub const POWER_DEFAULT_MAX_ITER: usize = 400_000;

/// Growth samples are taken over strides of this many steps, long enough to
/// average out the rotational modes of cycles up to length 64 (period `2L`).
const POWER_STRIDE: usize = 1024;

impl WeightedShiftOperator {
    /// Pairs a system with a potential of matching length.
    pub fn new(sys: &FiniteDynSystem, phi: &PotentialVector) -> Result<Self> {
        if phi.values().len() != sys.n() {
            return Err(Error::LengthMismatch {
                what: "potential vector vs system",
                expected: sys.n(),
                got: phi.values().len(),
            });
        }
        Ok(Self {
            sys: sys.clone(),
            phi: phi.clone(),
        })
    }

    /// The underlying system.
    pub fn system(&self) -> &FiniteDynSystem {
        &self.sys
    }

    /// The potential.
    pub fn potential(&self) -> &PotentialVector {
        &self.phi
    }

    /// Applies the operator once: `(A_φ f)(x) = e^{φ(x)} f(α(x))`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.sys.n(), "function has wrong length");
        (0..self.sys.n())
            .map(|x| self.phi.values()[x].exp() * f[self.sys.alpha(x)])
            .collect()
    }

    /// Applies the `k`-th iterate: `A_φ^k f = e^{S_k φ} (f ∘ α^k)`.
    pub fn apply_iterate(&self, f: &[f64], k: usize) -> Vec<f64> {
        assert_eq!(f.len(), self.sys.n(), "function has wrong length");
        let table = self.sys.iterate_map_table(k);
        (0..self.sys.n())
            .map(|x| self.sys.birkhoff_sum(&self.phi, x, k).exp() * f[table[x]])
            .collect()
    }

    /// `ln ‖A_φ^k‖` on `L¹(X, m)`, evaluated in log space column by column.
    pub fn log_operator_norm(&self, k: usize) -> f64 {
        let n = self.sys.n();
        let table = self.sys.iterate_map_table(k);
        // terms[j] collects S_k φ(i) + ln m(i) over the preimage α^{-k}{j}.
        let mut terms: Vec<Vec<f64>> = vec![Vec::new(); n];
        for i in 0..n {
            let s = self.sys.birkhoff_sum(&self.phi, i, k);
            terms[table[i]].push(s + self.sys.mass()[i].ln());
        }
        (0..n)
            .map(|j| log_sum_exp(&terms[j]) - self.sys.mass()[j].ln())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Operator norm `‖A_φ^k‖` on `L¹(X, m)`.
    pub fn operator_norm(&self, k: usize) -> f64 {
        self.log_operator_norm(k).exp()
    }

    /// Exact spectral exponent: the largest average of `φ` over a cycle.
    pub fn lambda_cycle_mean(&self) -> f64 {
        let decomposition = self.sys.cycle_decomposition();
        decomposition
            .cycles()
            .iter()
            .map(|cycle| {
                let sum: f64 = cycle.iter().map(|&x| self.phi.values()[x]).sum();
                sum / cycle.len() as f64
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The norm-limit sequence `λ_k = (1/k) ln ‖A_φ^k‖` for `k = 1..=k_max`.
    pub fn lambda_norm_limit(&self, k_max: usize) -> Vec<f64> {
        (1..=k_max)
            .map(|k| self.log_operator_norm(k) / k as f64)
            .collect()
    }

    /// Tail constant `K = 2 n max|φ| + ln(m(X)/min_j m(j))` satisfying
    /// `|λ_k − λ| ≤ K/k` for every `k ≥ 1`.
    pub fn tail_bound(&self) -> f64 {
        let n = self.sys.n() as f64;
        2.0 * n * self.phi.max_abs() + (self.sys.total_mass() / self.sys.min_mass()).ln()
    }

    /// Power-iteration estimate of `λ(φ)` via the spectral radius of the
    /// shifted weight matrix `M + εI` in log space.
    ///
    /// One step maps the log vector `ℓ` to
    /// `ℓ'(i) = ln(e^{φ(i) + ℓ(α(i))} + ε e^{ℓ(i)})` followed by subtracting
    /// the maximum; the subtracted growth accumulates and its long-run
    /// average converges geometrically to `ln(e^λ + ε)`. `tol` bounds the
    /// change between consecutive stabilized (stride-averaged, Aitken
    /// extrapolated) growth estimates; `max_iter` caps the total steps.
    pub fn lambda_power(&self, tol: f64, max_iter: usize) -> PowerIterationOutcome {
        let n = self.sys.n();
        let phi = self.phi.values();
        let map = self.sys.map();

        let mut lv = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut iterations = 0usize;

        let step = |lv: &mut Vec<f64>, next: &mut Vec<f64>, ln_eps: f64| -> f64 {
            for i in 0..n {
                next[i] = log_add_exp(phi[i] + lv[map[i]], ln_eps + lv[i]);
            }
            let growth = next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for (l, nx) in lv.iter_mut().zip(next.iter()) {
                *l = nx - growth;
            }
            growth
        };

        // Warm-up with unit shift to size ε ≈ e^λ; the growth of the
        // unshifted-by-λ iteration settles near ln(e^λ + 1) quickly enough
        // for an order-of-magnitude estimate.
        let warmup = (4 * n + 64).min(max_iter / 2);
        let mut recent = 0.0;
        let mut recent_len = 0usize;
        for t in 0..warmup {
            let g = step(&mut lv, &mut next, 0.0);
            iterations += 1;
            if t >= warmup / 2 {
                recent += g;
                recent_len += 1;
            }
        }
        let coarse_growth = if recent_len > 0 {
            recent / recent_len as f64
        } else {
            0.0
        };
        // e^coarse − 1 ≈ e^λ; clamp defensively for extreme potentials.
        let ln_eps = coarse_growth
            .exp_m1()
            .max(1e-300)
            .ln()
            .clamp(-700.0, 700.0);

        // Main phase: accumulate growth, sample the stride average, and
        // Aitken-extrapolate the sampled sequence.
        let mut total_growth = 0.0;
        let mut steps_in_phase = 0usize;
        let mut last_total = 0.0;
        let mut samples: Vec<f64> = Vec::new();
        let mut extrapolated_prev = f64::NAN;
        let mut stable = 0usize;
        let mut best_growth = f64::NAN;
        let mut converged = false;

        while iterations < max_iter {
            let g = step(&mut lv, &mut next, ln_eps);
            iterations += 1;
            total_growth += g;
            steps_in_phase += 1;

            if steps_in_phase.is_multiple_of(POWER_STRIDE) {
                let sample = (total_growth - last_total) / POWER_STRIDE as f64;
                last_total = total_growth;
                samples.push(sample);
                let s = samples.len();
                let extrapolated = if s >= 3 {
                    let (g0, g1, g2) = (samples[s - 3], samples[s - 2], samples[s - 1]);
                    let denom = g2 - 2.0 * g1 + g0;
                    if denom.abs() > 1e-15 * g2.abs().max(1.0) {
                        let d = g2 - g1;
                        g2 - d * d / denom
                    } else {
                        g2
                    }
                } else {
                    sample
                };
                best_growth = extrapolated;
                if (extrapolated - extrapolated_prev).abs() < tol {
                    stable += 1;
                    if stable >= 2 {
                        converged = true;
                        break;
                    }
                } else {
                    stable = 0;
                }
                extrapolated_prev = extrapolated;
            }
        }

        if best_growth.is_nan() {
            // Iteration cap shorter than one stride; fall back to the raw
            // running average.
            best_growth = if steps_in_phase > 0 {
                total_growth / steps_in_phase as f64
            } else {
                coarse_growth
            };
        }

        // Undo the shift: growth → ln(e^λ + ε) ⇒ λ = ln(e^growth − ε),
        // computed as ln ε + ln(expm1(growth − ln ε)) to avoid cancellation.
        let lambda = ln_eps + (best_growth - ln_eps).exp_m1().max(f64::MIN_POSITIVE).ln();

        PowerIterationOutcome {
            lambda,
            converged,
            iterations,
        }
    }
}

/// Bundle of all three spectral-exponent routes plus the tail bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Exact spectral exponent (largest cycle mean of the potential).
    pub lambda: f64,
    /// Power-iteration estimate of the same quantity.
    pub lambda_power: f64,
    /// Whether the power iteration stabilized before its cap.
    pub power_converged: bool,
    /// Matrix-vector products spent by the power iteration.
    pub power_iterations: usize,
    /// `λ_k = (1/k) ln ‖A_φ^k‖` for `k = 1..=k_max`.
    pub norm_limit: Vec<f64>,
    /// Constant `K` with `|λ_k − λ| ≤ K/k` for all `k`.
    #[serde(rename = "tail_bound_K")]
    pub tail_bound_k: f64,
}

/// Computes the full spectral report: exact cycle-mean exponent, power
/// iteration, norm-limit sequence up to `k_max`, and the tail constant.
pub fn spectral_report(
    sys: &FiniteDynSystem,
    phi: &PotentialVector,
    k_max: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralReport> {
    let op = WeightedShiftOperator::new(sys, phi)?;
    let power = op.lambda_power(tol, max_iter);
    Ok(SpectralReport {
        lambda: op.lambda_cycle_mean(),
        lambda_power: power.lambda,
        power_converged: power.converged,
        power_iterations: power.iterations,
        norm_limit: op.lambda_norm_limit(k_max),
        tail_bound_k: op.tail_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_system, arb_system_potential};
    use proptest::prelude::*;

    fn sys(map: Vec<usize>, mass: Vec<f64>) -> FiniteDynSystem {
        FiniteDynSystem::new(map, mass).unwrap()
    }

    fn op(map: Vec<usize>, mass: Vec<f64>, phi: Vec<f64>) -> WeightedShiftOperator {
        let s = sys(map, mass);
        let p = PotentialVector::new(&s, phi).unwrap();
        WeightedShiftOperator::new(&s, &p).unwrap()
    }

    /// Perron root of the 2×2 weight matrix, in closed form. For a
    /// nonnegative matrix the dominant eigenvalue is real, so the
    /// discriminant of the characteristic polynomial is nonnegative.
    fn perron_root_2x2(m: [[f64; 2]; 2]) -> f64 {
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())
    }

    #[test]
    fn apply_on_swap() {
        let a = op(vec![1, 0], vec![1.0, 1.0], vec![0.0, 0.0]);
        assert_eq!(a.apply(&[1.0, 0.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn apply_iterate_matches_repeated_apply() {
        let a = op(vec![1, 2, 0], vec![1.0, 2.0, 0.5], vec![0.3, -0.7, 1.1]);
        let f = vec![1.0, -2.0, 0.5];
        let once = a.apply(&a.apply(&a.apply(&f)));
        let threefold = a.apply_iterate(&f, 3);
        for (x, y) in once.iter().zip(&threefold) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_of_collapse_map() {
        // Both points to 0, masses (1,2), φ = 0: ‖A‖ = (1+2)/1 = 3.
        let a = op(vec![0, 0], vec![1.0, 2.0], vec![0.0, 0.0]);
        assert!((a.operator_norm(1) - 3.0).abs() < 1e-12);
        assert!((a.lambda_cycle_mean() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn norm_limit_on_swap_alternates() {
        let a = op(vec![1, 0], vec![1.0, 1.0], vec![0.0, 1.0]);
        let lk = a.lambda_norm_limit(4);
        assert!((lk[0] - 1.0).abs() < 1e-12); // k=1: best weight e^1
        assert!((lk[1] - 0.5).abs() < 1e-12); // k=2: full cycle
        assert!((a.lambda_cycle_mean() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn power_iteration_fixed_point() {
        let a = op(vec![0], vec![1.0], vec![-1.25]);
        let out = a.lambda_power(POWER_DEFAULT_TOL, POWER_DEFAULT_MAX_ITER);
        assert!(out.converged);
        assert!((out.lambda + 1.25).abs() < 1e-10);
    }

    #[test]
    fn power_iteration_on_three_cycle_with_tail() {
        // 5 points: 3-cycle {0,1,2} plus a tail 3→4→0. The window-free
        // shifted iteration must settle despite the cycle length not
        // dividing any fixed window.
        let a = op(
            vec![1, 2, 0, 4, 0],
            vec![1.0, 0.5, 2.0, 1.0, 1.0],
            vec![0.9, -0.3, 0.6, 2.0, -1.0],
        );
        let exact = a.lambda_cycle_mean();
        assert!((exact - (0.9 - 0.3 + 0.6) / 3.0).abs() < 1e-15);
        let out = a.lambda_power(POWER_DEFAULT_TOL, POWER_DEFAULT_MAX_ITER);
        assert!(out.converged);
        assert!((out.lambda - exact).abs() < 1e-9);
    }

    #[test]
    fn power_iteration_with_nearly_tied_cycles() {
        // Two fixed points whose weights differ by 1e-6: the subdominant
        // eigenvalue is nearly tied, the hardest case for power iteration.
        let a = op(vec![0, 1], vec![1.0, 1.0], vec![1.0, 1.0 - 1e-6]);
        let out = a.lambda_power(POWER_DEFAULT_TOL, POWER_DEFAULT_MAX_ITER);
        assert!((out.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tail_bound_on_identity() {
        let a = op(vec![0, 1], vec![1.0, 1.0], vec![0.0, 0.0]);
        assert!((a.tail_bound() - (2.0f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn report_has_consistent_fields() {
        let s = sys(vec![1, 0], vec![1.0, 1.0]);
        let phi = PotentialVector::new(&s, vec![0.0, 1.0]).unwrap();
        let r = spectral_report(&s, &phi, 8, POWER_DEFAULT_TOL, POWER_DEFAULT_MAX_ITER).unwrap();
        assert_eq!(r.norm_limit.len(), 8);
        assert!((r.lambda - 0.5).abs() < 1e-15);
        assert!((r.lambda_power - 0.5).abs() < 1e-9);
        for (k, lk) in r.norm_limit.iter().enumerate() {
            assert!((lk - r.lambda).abs() <= r.tail_bound_k / (k + 1) as f64 + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norm_matches_brute_force_over_basis((s, phi) in arb_system_potential(7)) {
            // ‖A^k‖ on L¹ equals the max over basis directions e_j of
            // ‖A^k e_j‖₁ / ‖e_j‖₁ because the unit ball's extreme points
            // are ±e_j / m(j).
            let a = WeightedShiftOperator::new(&s, &phi).unwrap();
            for k in 0..4 {
                let mut best: f64 = f64::NEG_INFINITY;
                for j in 0..s.n() {
                    let mut e = vec![0.0; s.n()];
                    e[j] = 1.0;
                    let image = a.apply_iterate(&e, k);
                    let image_norm: f64 = image
                        .iter()
                        .zip(s.mass())
                        .map(|(&v, &m)| v.abs() * m)
                        .sum();
                    best = best.max(image_norm / s.mass()[j]);
                }
                prop_assert!((best.ln() - a.log_operator_norm(k)).abs() < 1e-9);
            }
        }

        #[test]
        fn random_functions_never_beat_the_norm((s, phi) in arb_system_potential(7), raw in proptest::collection::vec(-2.0f64..2.0, 7)) {
            let a = WeightedShiftOperator::new(&s, &phi).unwrap();
            let f: Vec<f64> = raw[..s.n()].to_vec();
            let f_norm: f64 = f.iter().zip(s.mass()).map(|(&v, &m)| v.abs() * m).sum();
            prop_assume!(f_norm > 1e-9);
            for k in 1..4 {
                let image = a.apply_iterate(&f, k);
                let image_norm: f64 = image
                    .iter()
                    .zip(s.mass())
                    .map(|(&v, &m)| v.abs() * m)
                    .sum();
                prop_assert!(image_norm <= a.operator_norm(k) * f_norm * (1.0 + 1e-12));
            }
        }

        #[test]
        fn cycle_mean_is_homogeneous_and_monotone((s, phi) in arb_system_potential(8), c in -2.0f64..2.0) {
            let a = WeightedShiftOperator::new(&s, &phi).unwrap();
            let shifted = PotentialVector::new(
                &s,
                phi.values().iter().map(|v| v + c).collect(),
            ).unwrap();
            let b = WeightedShiftOperator::new(&s, &shifted).unwrap();
            // λ(φ + c) = λ(φ) + c.
            prop_assert!((b.lambda_cycle_mean() - a.lambda_cycle_mean() - c).abs() < 1e-12);
            // φ ≤ ψ pointwise ⇒ λ(φ) ≤ λ(ψ).
            let bigger = PotentialVector::new(
                &s,
                phi.values().iter().map(|v| v + c.abs()).collect(),
            ).unwrap();
            let big = WeightedShiftOperator::new(&s, &bigger).unwrap();
            prop_assert!(a.lambda_cycle_mean() <= big.lambda_cycle_mean() + 1e-12);
        }

        #[test]
        fn cycle_mean_is_convex_in_phi(s in arb_system(8), raw1 in proptest::collection::vec(-3.0f64..3.0, 8), raw2 in proptest::collection::vec(-3.0f64..3.0, 8), t in 0.0f64..1.0) {
            let phi = PotentialVector::new(&s, raw1[..s.n()].to_vec()).unwrap();
            let psi = PotentialVector::new(&s, raw2[..s.n()].to_vec()).unwrap();
            let mix = PotentialVector::new(
                &s,
                phi.values()
                    .iter()
                    .zip(psi.values())
                    .map(|(&a, &b)| t * a + (1.0 - t) * b)
                    .collect(),
            ).unwrap();
            let la = WeightedShiftOperator::new(&s, &phi).unwrap().lambda_cycle_mean();
            let lb = WeightedShiftOperator::new(&s, &psi).unwrap().lambda_cycle_mean();
            let lm = WeightedShiftOperator::new(&s, &mix).unwrap().lambda_cycle_mean();
            prop_assert!(lm <= t * la + (1.0 - t) * lb + 1e-10);
        }

        #[test]
        fn norm_sequence_is_submultiplicative((s, phi) in arb_system_potential(7), a in 1usize..5, b in 1usize..5) {
            let op = WeightedShiftOperator::new(&s, &phi).unwrap();
            let lhs = op.log_operator_norm(a + b);
            let rhs = op.log_operator_norm(a) + op.log_operator_norm(b);
            prop_assert!(lhs <= rhs + 1e-9);
        }

        #[test]
        fn norm_limit_respects_tail_bound((s, phi) in arb_system_potential(8)) {
            let op = WeightedShiftOperator::new(&s, &phi).unwrap();
            let lambda = op.lambda_cycle_mean();
            let k_bound = op.tail_bound();
            for (idx, lk) in op.lambda_norm_limit(24).iter().enumerate() {
                let k = (idx + 1) as f64;
                prop_assert!((lk - lambda).abs() <= k_bound / k + 1e-12);
            }
        }

        #[test]
        fn power_matches_2x2_eigenvalues(map in proptest::collection::vec(0usize..2, 2), raw in proptest::collection::vec(-2.0f64..2.0, 2)) {
            let s = FiniteDynSystem::new(map.clone(), vec![1.0, 1.0]).unwrap();
            let phi = PotentialVector::new(&s, raw).unwrap();
            let a = WeightedShiftOperator::new(&s, &phi).unwrap();
            let mut m = [[0.0; 2]; 2];
            for i in 0..2 {
                m[i][map[i]] = phi.values()[i].exp();
            }
            let exact = perron_root_2x2(m).ln();
            prop_assert!((a.lambda_cycle_mean() - exact).abs() < 1e-10);
            let out = a.lambda_power(POWER_DEFAULT_TOL, POWER_DEFAULT_MAX_ITER);
            prop_assert!((out.lambda - exact).abs() < 1e-9);
        }
    }
}

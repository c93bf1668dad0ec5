//! Independent oracles used to corroborate solver output.
//!
//! Everything here recomputes its target from the raw definitions, on
//! purpose avoiding the solver's shared machinery (no composed map tables,
//! no sparse row caches, no multiplicative updates), so that agreement
//! between an oracle and the solver is evidence rather than tautology.
//!
//! The feasible set of the inner program, `{ h ≥ 0 : ⟨m, h⟩ = 1 }`, is the
//! simplex with vertices `v_j = e_j / m(j)`. [`grid_tau_supremum`]
//! parametrizes `h = Σ_j θ_j v_j` by barycentric weights `θ` and maximizes
//! the objective by a zooming grid search: a full sweep of the weight
//! simplex at a coarse step, then repeated local sweeps around the best
//! point at halved steps, carrying the incumbent so the estimate is
//! monotone. The objective is concave, which is what makes the zoom
//! reliable; the returned value approaches the supremum from below.

use crate::dynsys::FiniteDynSystem;
use crate::measures::DensityMeasure;
use crate::partitions::PartitionOfUnity;
use crate::tentropy::ROW_WEIGHT_FLOOR;

/// Objective `Σ_{μ(g)>0} μ(g) ln(⟨c_g, h⟩/μ(g))` evaluated from first
/// principles: `α^n` by stepping each point `n` times, `c_g` by direct
/// summation.
pub fn objective_from_definition(
    sys: &FiniteDynSystem,
    mu: &DensityMeasure,
    d: &PartitionOfUnity,
    n_steps: usize,
    h: &[f64],
) -> f64 {
    let n = sys.n();
    let step_n = |mut x: usize| {
        for _ in 0..n_steps {
            x = sys.alpha(x);
        }
        x
    };
    let mut total = 0.0;
    for row in d.rows() {
        let weight: f64 = (0..n).map(|i| row[i] * mu.densities()[i]).sum();
        if weight <= ROW_WEIGHT_FLOOR {
            continue;
        }
        let mut dot = 0.0;
        for i in 0..n {
            if row[i] > 0.0 {
                dot += row[i] * sys.mass()[i] * h[step_n(i)];
            }
        }
        total += weight * (dot.max(f64::MIN_POSITIVE) / weight).ln();
    }
    total
}

/// Grid-search estimate of `τ_n(μ, D)`'s inner supremum, refined until the
/// barycentric step drops below `step_target`. Approaches the supremum
/// from below; suitable for corroborating solver values on small systems
/// (the sweep cost grows quickly with the number of points).
pub fn grid_tau_supremum(
    sys: &FiniteDynSystem,
    mu: &DensityMeasure,
    d: &PartitionOfUnity,
    n_steps: usize,
    step_target: f64,
) -> f64 {
    let n = sys.n();
    let vertices: Vec<f64> = sys.mass().iter().map(|&m| 1.0 / m).collect();
    let eval = |theta: &[f64]| {
        let h: Vec<f64> = theta
            .iter()
            .zip(&vertices)
            .map(|(&t, &v)| t * v)
            .collect();
        objective_from_definition(sys, mu, d, n_steps, &h)
    };

    // Full sweep of the weight simplex at the coarse step.
    let coarse_den = 16usize;
    let mut best_theta = vec![0.0; n];
    let mut best_value = f64::NEG_INFINITY;
    let mut counts = vec![0usize; n];
    sweep_simplex(&mut counts, 0, coarse_den, &mut |c| {
        let theta: Vec<f64> = c.iter().map(|&v| v as f64 / coarse_den as f64).collect();
        let value = eval(&theta);
        if value > best_value {
            best_value = value;
            best_theta = theta;
        }
    });

    // Zoom: local sweeps around the incumbent with halved steps.
    let mut step = 1.0 / coarse_den as f64;
    while step > step_target {
        step *= 0.5;
        // Offsets of up to ±3 steps per coordinate, renormalized onto the
        // simplex; the incumbent itself is kept (offset zero).
        let reach = 3i64;
        let mut offsets = vec![-reach; n];
        loop {
            let mut theta: Vec<f64> = best_theta
                .iter()
                .zip(&offsets)
                .map(|(&t, &o)| (t + o as f64 * step).max(0.0))
                .collect();
            let total: f64 = theta.iter().sum();
            if total > 0.0 {
                for t in theta.iter_mut() {
                    *t /= total;
                }
                let value = eval(&theta);
                if value > best_value {
                    best_value = value;
                    best_theta = theta;
                }
            }
            // Advance the offset odometer.
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                offsets[pos] += 1;
                if offsets[pos] <= reach {
                    break;
                }
                offsets[pos] = -reach;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    best_value
}

/// Enumerates all nonnegative integer vectors of the current length
/// summing to `den` (compositions), invoking `visit` on each.
fn sweep_simplex(
    counts: &mut Vec<usize>,
    pos: usize,
    remaining: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for v in 0..=remaining {
        counts[pos] = v;
        sweep_simplex(counts, pos + 1, remaining - v, visit);
    }
}

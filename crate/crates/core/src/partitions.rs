//! Partitions of unity on the phase space and set-partition enumeration.
//!
//! A *partition of unity* `D = {g_1, …, g_k}` is a finite family of
//! nonnegative functions with `Σ_l g_l(i) = 1` at every point `i`. The
//! special case where every `g_l` is the indicator of a block of a set
//! partition of `{0, …, n-1}` is an *index partition*; these are the
//! combinatorial core of the t-entropy evaluation, since the infimum over
//! all partitions of unity is attained on index partitions (coarsening a
//! partition of unity never increases the inner supremum, and every
//! partition of unity is refined by the singleton index partition).
//!
//! Index partitions are enumerated in restricted-growth-string (RGS) order:
//! the assignment `a` with `a[0] = 0` and `a[i] ≤ max(a[..i]) + 1` encodes
//! "point `i` lies in block `a[i]`", blocks being numbered by first
//! appearance. Lexicographic order on the strings starts at the trivial
//! partition `[0, 0, …, 0]` and ends at singletons `[0, 1, …, n-1]`; the
//! count is the Bell number `B(n)`.
//!
//! The greedy search walks the merge lattice downward from singletons:
//! at each round it tries all pairwise merges of current rows, keeps the
//! merge that lowers the t-entropy value the most, and stops when no merge
//! improves by at least [`GREEDY_IMPROVEMENT_TOL`].

use serde::{Deserialize, Serialize};

use crate::dynsys::FiniteDynSystem;
use crate::measures::DensityMeasure;
use crate::tentropy::{self, SolverConfig};
use crate::{Error, Result};

/// Column sums of a partition of unity must equal one within this tolerance.
pub const PARTITION_COLUMN_TOL: f64 = 1e-12;

/// A greedy merge must improve the value by at least this much to be taken.
pub const GREEDY_IMPROVEMENT_TOL: f64 = 1e-10;

/// A finite partition of unity: `k` nonnegative rows of length `n` whose
/// columns sum to one. Index partitions additionally carry their blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    rows: Vec<Vec<f64>>,
    is_index: bool,
    blocks: Option<Vec<Vec<usize>>>,
}

impl PartitionOfUnity {
    /// Validates general rows; detects index partitions (all entries
    /// exactly zero or one) and records their blocks.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidPartition {
                reason: "needs at least one row and one point".into(),
            });
        }
        let n = rows[0].len();
        for (l, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPartition {
                    reason: format!("row {l} has length {} instead of {n}", row.len()),
                });
            }
            for (i, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidPartition {
                        reason: format!("row {l} entry {i} is {v}"),
                    });
                }
            }
        }
        for i in 0..n {
            let col_sum: f64 = rows.iter().map(|row| row[i]).sum();
            if (col_sum - 1.0).abs() > PARTITION_COLUMN_TOL {
                return Err(Error::InvalidPartition {
                    reason: format!("column {i} sums to {col_sum}, expected 1"),
                });
            }
        }
        let is_index = rows
            .iter()
            .all(|row| row.iter().all(|&v| v == 0.0 || v == 1.0));
        let blocks = if is_index {
            Some(
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, &v)| v == 1.0)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            rows,
            is_index,
            blocks,
        })
    }

    /// Builds an index partition from blocks that must exactly partition
    /// `{0, …, n-1}` with no empty block.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if n == 0 || blocks.is_empty() {
            return Err(Error::InvalidBlocks {
                n,
                reason: "need at least one point and one block".into(),
            });
        }
        let mut owner = vec![usize::MAX; n];
        for (l, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidBlocks {
                    n,
                    reason: format!("block {l} is empty"),
                });
            }
            for &i in block {
                if i >= n {
                    return Err(Error::InvalidBlocks {
                        n,
                        reason: format!("block {l} contains out-of-range point {i}"),
                    });
                }
                if owner[i] != usize::MAX {
                    return Err(Error::InvalidBlocks {
                        n,
                        reason: format!("point {i} appears in blocks {} and {l}", owner[i]),
                    });
                }
                owner[i] = l;
            }
        }
        if let Some(orphan) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidBlocks {
                n,
                reason: format!("point {orphan} is not covered"),
            });
        }
        let mut rows = vec![vec![0.0; n]; blocks.len()];
        for (l, block) in blocks.iter().enumerate() {
            for &i in block {
                rows[l][i] = 1.0;
            }
        }
        let mut sorted_blocks: Vec<Vec<usize>> = blocks.to_vec();
        for block in sorted_blocks.iter_mut() {
            block.sort_unstable();
        }
        Ok(Self {
            rows,
            is_index: true,
            blocks: Some(sorted_blocks),
        })
    }

    /// Index partition from a block-id assignment (`assignment[i]` = block
    /// of point `i`), with block ids forming a contiguous range `0..k`.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self> {
        let n = assignment.len();
        let k = match assignment.iter().max() {
            Some(&m) => m + 1,
            None => {
                return Err(Error::InvalidBlocks {
                    n: 0,
                    reason: "empty assignment".into(),
                })
            }
        };
        let mut blocks = vec![Vec::new(); k];
        for (i, &l) in assignment.iter().enumerate() {
            blocks[l].push(i);
        }
        if let Some(gap) = blocks.iter().position(|b| b.is_empty()) {
            return Err(Error::InvalidBlocks {
                n,
                reason: format!("block id {gap} is unused"),
            });
        }
        Self::from_blocks(n, &blocks)
    }

    /// The singleton index partition `{{0}, {1}, …}`.
    pub fn singletons(n: usize) -> Self {
        let blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        Self::from_blocks(n, &blocks).expect("singletons are a valid partition")
    }

    /// The trivial index partition `{{0, …, n-1}}` (one all-ones row).
    pub fn trivial(n: usize) -> Self {
        Self::from_blocks(n, &[(0..n).collect()]).expect("trivial is a valid partition")
    }

    /// The rows `g_1, …, g_k`.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Number of rows `k`.
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// Number of points `n`.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// Whether all rows are indicator functions of a set partition.
    pub fn is_index(&self) -> bool {
        self.is_index
    }

    /// The blocks, present exactly for index partitions.
    pub fn blocks(&self) -> Option<&[Vec<usize>]> {
        self.blocks.as_deref()
    }

    /// Merges rows `a` and `b` (`a ≠ b`) by summing them; the merged row
    /// replaces position `min(a,b)` and the other row disappears. Index
    /// structure is preserved.
    pub fn merge_rows(&self, a: usize, b: usize) -> Self {
        assert!(a != b && a < self.k() && b < self.k(), "bad merge indices");
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut rows = self.rows.clone();
        let (head, tail) = rows.split_at_mut(hi);
        for (sum, &add) in head[lo].iter_mut().zip(&tail[0]) {
            *sum += add;
        }
        rows.remove(hi);
        let blocks = self.blocks.as_ref().map(|blocks| {
            let mut blocks = blocks.clone();
            let moved = blocks[hi].clone();
            blocks[lo].extend(moved);
            blocks[lo].sort_unstable();
            blocks.remove(hi);
            blocks
        });
        Self {
            rows,
            is_index: self.is_index,
            blocks,
        }
    }

    /// Whether `self` refines `coarser` within `eps`: every row of
    /// `coarser` oscillates by at most `eps` on the support of every row of
    /// `self`. With `eps = 0` and index partitions this is exactly
    /// "every block of `self` is contained in a block of `coarser`".
    pub fn is_refinement_of(&self, coarser: &PartitionOfUnity, eps: f64) -> bool {
        assert_eq!(self.n(), coarser.n(), "partition sizes differ");
        for fine_row in &self.rows {
            let support: Vec<usize> = (0..self.n()).filter(|&i| fine_row[i] > 0.0).collect();
            if support.is_empty() {
                continue;
            }
            for coarse_row in &coarser.rows {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &i in &support {
                    lo = lo.min(coarse_row[i]);
                    hi = hi.max(coarse_row[i]);
                }
                if hi - lo > eps {
                    return false;
                }
            }
        }
        true
    }
}

/// Lazily yields the restricted growth strings of length `n` in
/// lexicographic order. `next_assignment` exposes the raw string without
/// materializing rows — this is what exact t-entropy enumeration iterates.
#[derive(Debug, Clone)]
pub(crate) struct RgsIterator {
    rgs: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl RgsIterator {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n > 0, "need at least one point");
        Self {
            rgs: vec![0; n],
            fresh: true,
            done: false,
        }
    }

    /// Advances to the next string; returns it, or `None` when exhausted.
    pub(crate) fn next_assignment(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.rgs);
        }
        let n = self.rgs.len();
        let mut i = n.wrapping_sub(1);
        loop {
            if i == 0 || i == usize::MAX {
                self.done = true;
                return None;
            }
            let prefix_max = *self.rgs[..i].iter().max().expect("nonempty prefix");
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                for j in i + 1..n {
                    self.rgs[j] = 0;
                }
                return Some(&self.rgs);
            }
            i -= 1;
        }
    }
}

/// Iterator over all index partitions of `n` points in RGS order.
#[derive(Debug, Clone)]
pub struct IndexPartitionIterator {
    inner: RgsIterator,
}

impl IndexPartitionIterator {
    /// Starts at the trivial partition `[0, 0, …, 0]`.
    pub fn new(n: usize) -> Self {
        Self {
            inner: RgsIterator::new(n),
        }
    }
}

impl Iterator for IndexPartitionIterator {
    type Item = PartitionOfUnity;

    fn next(&mut self) -> Option<PartitionOfUnity> {
        let assignment = self.inner.next_assignment()?.to_vec();
        Some(
            PartitionOfUnity::from_assignment(&assignment)
                .expect("RGS strings are valid assignments"),
        )
    }
}

/// Result of a budgeted enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedPartitions {
    /// Up to `budget` index partitions in RGS order.
    pub partitions: Vec<PartitionOfUnity>,
    /// True when the Bell number exceeded the budget and the tail was cut.
    pub truncated: bool,
}

/// Enumerates index partitions up to `budget` items; exceeding the budget
/// is reported as truncation, not an error.
pub fn enumerate_index_partitions(n: usize, budget: usize) -> EnumeratedPartitions {
    let it = IndexPartitionIterator::new(n);
    let mut partitions = Vec::new();
    let mut truncated = false;
    for p in it {
        if partitions.len() == budget {
            truncated = true;
            break;
        }
        partitions.push(p);
    }
    EnumeratedPartitions {
        partitions,
        truncated,
    }
}

/// Bell number `B(n)` (number of set partitions), saturating at
/// `u128::MAX`. Computed with the Bell triangle.
pub fn bell_number(n: usize) -> u128 {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("row is nonempty"));
        for &v in &row {
            let prev = *next.last().expect("next is nonempty");
            next.push(prev.saturating_add(v));
        }
        row = next;
    }
    row[0]
}

/// Outcome of the greedy merge search for `τ_n(μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedySearchOutcome {
    /// The final partition (argmin of the search).
    pub partition: PartitionOfUnity,
    /// Value `τ_n(μ, D)` at the final partition (ascent certificate).
    pub value: f64,
    /// Matching upper certificate of the same inner supremum.
    pub value_upper: f64,
    /// Merge rounds actually applied.
    pub rounds: usize,
    /// Inner problems solved across all candidate merges.
    pub evaluations: usize,
    /// Multiplicative updates spent across all inner solves.
    pub iterations: usize,
    /// True when every inner solve met its tolerance.
    pub all_converged: bool,
    /// True when every evaluated value respected the `ln ‖A^n‖` bound.
    pub upper_bound_ok: bool,
}

/// Greedy descent over the merge lattice for `τ_n(μ) = inf_D τ_n(μ, D)`:
/// starts from singletons, repeatedly applies the pairwise merge that
/// decreases the value the most (first such pair in row order on ties),
/// and stops after `max_rounds` or when no merge improves by at least
/// [`GREEDY_IMPROVEMENT_TOL`].
pub fn greedy_partition_search(
    sys: &FiniteDynSystem,
    mu: &DensityMeasure,
    n_steps: usize,
    cfg: &SolverConfig,
    max_rounds: usize,
) -> Result<GreedySearchOutcome> {
    let mut current = PartitionOfUnity::singletons(sys.n());
    let mut best = tentropy::solve_tau_n_d(sys, mu, &current, n_steps, cfg, None)?;
    let mut evaluations = 1usize;
    let mut iterations = best.iterations;
    let mut rounds = 0usize;
    let mut all_converged = best.converged;
    let mut upper_bound_ok = best.upper_bound_ok;

    for _ in 0..max_rounds {
        if current.k() <= 1 {
            break;
        }
        let mut best_merge: Option<(usize, usize)> = None;
        let mut best_merge_outcome: Option<tentropy::InnerOutcome> = None;
        for a in 0..current.k() {
            for b in a + 1..current.k() {
                let candidate = current.merge_rows(a, b);
                // Solves may stop early once their running lower bound
                // exceeds the value to beat; such merges cannot improve.
                let ceiling = match &best_merge_outcome {
                    Some(outcome) => outcome.value,
                    None => best.value - GREEDY_IMPROVEMENT_TOL,
                };
                let outcome =
                    tentropy::solve_tau_n_d(sys, mu, &candidate, n_steps, cfg, Some(ceiling))?;
                evaluations += 1;
                iterations += outcome.iterations;
                upper_bound_ok &= outcome.upper_bound_ok;
                if !outcome.aborted {
                    all_converged &= outcome.converged;
                }
                let improves = match &best_merge_outcome {
                    Some(current_best) => !outcome.aborted && outcome.value < current_best.value,
                    None => {
                        !outcome.aborted
                            && outcome.value <= best.value - GREEDY_IMPROVEMENT_TOL
                    }
                };
                if improves {
                    best_merge = Some((a, b));
                    best_merge_outcome = Some(outcome);
                }
            }
        }
        match (best_merge, best_merge_outcome) {
            (Some((a, b)), Some(outcome)) => {
                current = current.merge_rows(a, b);
                best = outcome;
                rounds += 1;
            }
            _ => break,
        }
    }

    Ok(GreedySearchOutcome {
        partition: current,
        value: best.value,
        value_upper: best.value_upper,
        rounds,
        evaluations,
        iterations,
        all_converged,
        upper_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singletons_and_trivial() {
        let s = PartitionOfUnity::singletons(3);
        assert_eq!(s.k(), 3);
        assert!(s.is_index());
        assert_eq!(s.blocks().unwrap(), &[vec![0], vec![1], vec![2]]);
        let t = PartitionOfUnity::trivial(3);
        assert_eq!(t.k(), 1);
        assert!(t.is_index());
        assert_eq!(t.rows()[0], vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn from_blocks_validates() {
        assert!(PartitionOfUnity::from_blocks(3, &[vec![0, 1], vec![2]]).is_ok());
        // Overlap.
        assert!(PartitionOfUnity::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        // Missing point.
        assert!(PartitionOfUnity::from_blocks(3, &[vec![0], vec![2]]).is_err());
        // Out of range.
        assert!(PartitionOfUnity::from_blocks(2, &[vec![0], vec![3]]).is_err());
        // Empty block.
        assert!(PartitionOfUnity::from_blocks(2, &[vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn from_rows_validates_and_detects_index() {
        let soft = PartitionOfUnity::from_rows(vec![vec![0.25, 0.5], vec![0.75, 0.5]]).unwrap();
        assert!(!soft.is_index());
        assert!(soft.blocks().is_none());
        let hard = PartitionOfUnity::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(hard.is_index());
        // Columns must sum to one.
        assert!(PartitionOfUnity::from_rows(vec![vec![0.5, 0.5], vec![0.4, 0.5]]).is_err());
        // Negative entries rejected.
        assert!(PartitionOfUnity::from_rows(vec![vec![1.5, 0.0], vec![-0.5, 1.0]]).is_err());
    }

    #[test]
    fn rgs_order_for_three_points() {
        let labels: Vec<Vec<usize>> = {
            let mut it = RgsIterator::new(3);
            let mut out = Vec::new();
            while let Some(a) = it.next_assignment() {
                out.push(a.to_vec());
            }
            out
        };
        assert_eq!(
            labels,
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![0, 1, 1],
                vec![0, 1, 2],
            ]
        );
    }

    #[test]
    fn enumeration_counts_match_bell_numbers() {
        for n in 1..=6 {
            let count = IndexPartitionIterator::new(n).count() as u128;
            assert_eq!(count, bell_number(n));
        }
        assert_eq!(bell_number(0), 1);
        assert_eq!(bell_number(3), 5);
        assert_eq!(bell_number(8), 4140);
        assert_eq!(bell_number(10), 115_975);
    }

    #[test]
    fn enumeration_respects_budget() {
        let out = enumerate_index_partitions(4, 10);
        assert!(out.truncated);
        assert_eq!(out.partitions.len(), 10);
        let all = enumerate_index_partitions(4, 100);
        assert!(!all.truncated);
        assert_eq!(all.partitions.len() as u128, bell_number(4));
    }

    #[test]
    fn merge_preserves_partition() {
        let p = PartitionOfUnity::singletons(4);
        let merged = p.merge_rows(1, 3);
        assert_eq!(merged.k(), 3);
        assert!(merged.is_index());
        assert_eq!(
            merged.blocks().unwrap(),
            &[vec![0], vec![1, 3], vec![2]]
        );
        for i in 0..4 {
            let col: f64 = merged.rows().iter().map(|r| r[i]).sum();
            assert_eq!(col, 1.0);
        }
    }

    #[test]
    fn refinement_examples() {
        let singles = PartitionOfUnity::singletons(2);
        let trivial = PartitionOfUnity::trivial(2);
        // Singletons refine everything; the trivial row is constant.
        assert!(singles.is_refinement_of(&trivial, 0.0));
        // The trivial partition does not refine singletons for small ε:
        // the indicator 1_{0} oscillates by 1 on the full support.
        assert!(!trivial.is_refinement_of(&singles, 0.5));
        // …but does within ε = 1.
        assert!(trivial.is_refinement_of(&singles, 1.0));
        assert!(singles.is_refinement_of(&singles, 0.0));
    }

    #[test]
    fn refinement_matches_block_inclusion_when_exact() {
        let fine = PartitionOfUnity::from_blocks(4, &[vec![0], vec![1], vec![2, 3]]).unwrap();
        let coarse = PartitionOfUnity::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(fine.is_refinement_of(&coarse, 0.0));
        assert!(!coarse.is_refinement_of(&fine, 0.0));
    }

    #[test]
    fn refinement_is_monotone_in_eps() {
        let a = PartitionOfUnity::from_rows(vec![vec![0.3, 0.8], vec![0.7, 0.2]]).unwrap();
        let b = PartitionOfUnity::trivial(2);
        // b's row is constant, so b-oscillation is 0; a's rows oscillate by
        // 0.5 on the full support.
        assert!(b.is_refinement_of(&a, 0.5));
        assert!(!b.is_refinement_of(&a, 0.25));
    }
}

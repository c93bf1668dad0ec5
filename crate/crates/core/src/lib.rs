//! Weighted shift operators on finite measure spaces.
//!
//! A finite dynamical system is a map `α: X → X` on `n` points together with
//! a strictly positive mass vector `m`. The weighted shift with potential
//! vector `φ` acts on functions by
//!
//! ```text
//! (A_φ f)(x) = e^{φ(x)} · f(α(x)),
//! ```
//!
//! and its iterates satisfy `A_φ^k f = e^{S_k φ} · (f ∘ α^k)` with
//! `S_k φ = φ + φ∘α + … + φ∘α^{k-1}` the Birkhoff sums. This crate computes
//! the spectral exponent `λ(φ) = lim_k (1/k) ln ‖A_φ^k‖` of that operator on
//! `L¹(X, m)` by three independent routes (cycle means, power iteration,
//! norm limits), evaluates the dynamical *t-entropy* of density measures through
//! its finite-level variational ladder, checks the variational principle
//!
//! ```text
//! λ(φ) = max { μ(φ) + τ(μ) : μ invariant density measure },
//! ```
//!
//! and builds decay certificates for entropy statistic sets.
//!
//! Module map:
//!
//! * [`dynsys`] — systems, potentials, Birkhoff sums, cycle structure;
//! * [`shiftop`] — the operator, its `L¹` norms and spectral exponent;
//! * [`measures`] — density measures, the invariant polytope, weak-star
//!   neighborhoods;
//! * [`partitions`] — partitions of unity, set-partition enumeration, greedy
//!   partition search;
//! * [`tentropy`] — the inner concave program and the `τ_n(μ, D)` /
//!   `τ_n(μ)` / `τ(μ)` ladder;
//! * [`verify`] — variational-principle and inequality checks;
//! * [`ess`] — entropy statistic sets and decay certificates;
//! * [`oracle`] — slow reference implementations used for cross-validation;
//! * [`gen`] — seeded random generation of systems, potentials and measures;
//! * [`io`] — file formats and deterministic serialization;
//! * [`suite`] — the acceptance suite that exercises all of the above.
//!
//! All types are plain owned data (`Send + Sync`); every entry point is a
//! pure function of its inputs plus an explicit seed, so runs with the same
//! seed are bit-for-bit reproducible.

pub mod dynsys;
pub mod ess;
pub mod gen;
pub mod io;
pub mod measures;
pub mod oracle;
pub mod partitions;
pub mod shiftop;
pub mod suite;
pub mod tentropy;
pub mod verify;

mod error;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use dynsys::{CycleDecomposition, FiniteDynSystem, PotentialVector};
pub use measures::{DensityMeasure, InvariantPolytope, WeakStarNeighborhood};
pub use partitions::PartitionOfUnity;
pub use shiftop::{SpectralReport, WeightedShiftOperator};
pub use tentropy::{SolverConfig, TEntropyReport};

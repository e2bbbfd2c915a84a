//! Exact spectral analysis of the universal entanglement-borrowing family.
//!
//! For a catalyst size `n`, the family member is the bipartite pure state
//!
//! ```text
//!     mu(n) = (1 / sqrt(H(n))) * sum_{j=1..n} (1 / sqrt(j)) |j>|j>
//! ```
//!
//! with `H(n)` the n-th harmonic number. Its Schmidt spectrum is so flat in
//! the log that local unitaries alone can shuffle weight around and make
//! `mu(n) (x) |1>|1>` pass for `mu(n) (x) target`, for *any* m-term target,
//! with an error that vanishes like `log m / log n`. No entanglement is
//! spent; it is borrowed and (almost exactly) returned.
//!
//! This crate computes the exact figures of merit of that protocol — the
//! optimal fidelity and the residual trace distance on the catalyst margin —
//! together with the analytic envelopes they must respect, plus the
//! majorization/trumping order machinery used to certify the underlying
//! state conversions. Everything is plain `f64` with compensated summation
//! where it matters; joint spectra are streamed through a k-way merge rather
//! than materialized, so catalyst sizes in the tens of millions stay cheap.

pub mod embezzle;
mod kahan;
pub mod merge;
pub mod schmidt;
pub mod selftest;
pub mod sweep;

pub use embezzle::{
    bound_report, build_embezzler, delta_upper_bound, eta, fannes_min_delta,
    fidelity_lower_bound, harmonic_number, min_rank_for, omega_top_k, protocol_delta,
    protocol_fidelity, sum_omega_sq, BoundReport, EmbezzlerIndex, FannesFloor, MinRank,
    TargetState, INV_E, MAX_MERGE_POPS,
};
pub use schmidt::{
    is_trumped, majorization_violation, majorizes, overlap_fidelity, reduced_trace_distance,
    schmidt_decompose, AmplitudeMatrix, Complex64, ProbabilityVector, SchmidtVector,
    MAJORIZATION_TOL, MAX_PRODUCT_ENTRIES, NORMALIZATION_TOL,
};
pub use selftest::{
    run_selftest, run_selftest_seq, CheckOutcome, SelftestConfig, SelftestReport, DEFAULT_SEED,
};
pub use sweep::{sweep_points, sweep_points_seq, BoundsOnlyReport, SweepPoint};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A coefficient list or matrix failed a structural requirement.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Normalization is off by more than the accepted tolerance.
    #[error("state is not normalized: squared sum {squared_sum} deviates from 1 by {deviation:e}")]
    NotNormalized { squared_sum: f64, deviation: f64 },

    /// Catalyst sizes start at 1.
    #[error("catalyst size must be at least 1, got {0}")]
    InvalidIndex(u64),

    /// The logarithmic bounds divide by log(n) and are vacuous below n = 2.
    #[error("bounds undefined for n<2 (n={n}, target rank {m})")]
    BoundsUndefined { n: u64, m: u64 },

    /// Materializing or streaming this spectrum would exceed the work budget.
    #[error("spectrum walk of {size} entries exceeds the {limit}-entry budget")]
    SpectrumTooLarge { size: u128, limit: u64 },

    /// No rank-m state can carry this much entropy.
    #[error("entropy {entropy_bits} bits exceeds log2({m}) = {max_bits} bits")]
    EntropyOutOfRange {
        entropy_bits: f64,
        max_bits: f64,
        m: u64,
    },

    /// A parameter fell outside its documented domain.
    #[error("{0}")]
    Domain(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

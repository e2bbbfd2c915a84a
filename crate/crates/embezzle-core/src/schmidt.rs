//! Schmidt-spectrum types and the order relations on them.
//!
//! Bipartite pure states enter and leave this crate as their Schmidt
//! coefficient lists: non-negative, non-increasing, squares summing to one.
//! In that canonical form fidelity maximized over local unitaries is a plain
//! dot product, and LOCC convertibility questions reduce to prefix-sum
//! comparisons (majorization) on the squared lists — so the types here
//! enforce the form at construction time and everything downstream can rely
//! on it.

use num_complex::Complex64 as C64;

use crate::kahan::KahanSum;
use crate::{Error, Result};

pub use num_complex::Complex64;

/// Tolerance on |normalization sum - 1| accepted at construction time.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Slack used when comparing majorization prefix sums.
pub const MAJORIZATION_TOL: f64 = 1e-12;

/// Largest product spectrum we are willing to materialize.
pub const MAX_PRODUCT_ENTRIES: u64 = 100_000_000;

/// Schmidt coefficients of a bipartite pure state: strictly positive,
/// sorted non-increasing, squares summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtVector {
    coeffs: Vec<f64>,
}

impl SchmidtVector {
    /// Canonicalizes `coeffs`: requires finite, non-negative entries whose
    /// squares sum to 1 within [`NORMALIZATION_TOL`]; sorts non-increasing
    /// and drops exact zeros (they carry no weight, no entropy, and no rank).
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let mut coeffs = coeffs;
        validate_entries(&coeffs, "coefficient")?;
        coeffs.sort_unstable_by(|a, b| b.total_cmp(a));
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidState(
                "state has no nonzero coefficients".into(),
            ));
        }
        // after the descending sort the squares shrink toward the end; add
        // tail-first so the small terms are not lost under the large ones
        let mut sq = KahanSum::new();
        for &c in coeffs.iter().rev() {
            sq.add(c * c);
        }
        check_normalized(sq.value())?;
        Ok(Self { coeffs })
    }

    /// Wraps a list the caller has already produced in canonical form.
    pub(crate) fn from_canonical(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        debug_assert!(coeffs.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(*coeffs.last().unwrap() > 0.0);
        Self { coeffs }
    }

    /// The rank-m maximally entangled state: m equal coefficients 1/sqrt(m).
    pub fn maximally_entangled(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidState("rank must be positive".into()));
        }
        if m > MAX_PRODUCT_ENTRIES {
            return Err(Error::SpectrumTooLarge {
                size: m as u128,
                limit: MAX_PRODUCT_ENTRIES,
            });
        }
        let c = 1.0 / (m as f64).sqrt();
        Ok(Self::from_canonical(vec![c; m as usize]))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Schmidt rank.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Squared coefficients: the spectrum of either reduced state.
    pub fn squared(&self) -> ProbabilityVector {
        // squares of a non-increasing non-negative list are non-increasing
        ProbabilityVector {
            probs: self.coeffs.iter().map(|c| c * c).collect(),
        }
    }

    /// Von Neumann entropy of either reduced state, in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits_ascending(self.coeffs.iter().rev().map(|c| c * c))
    }

    /// Full Kronecker-product spectrum with `other`, re-sorted to canonical
    /// order. Exactly tied products keep their row-major (self, other) index
    /// order — the same order the streaming merge produces.
    pub fn tensor_full(&self, other: &SchmidtVector) -> Result<SchmidtVector> {
        let coeffs = tensor_entries(&self.coeffs, &other.coeffs)?;
        Ok(Self::from_canonical(coeffs))
    }
}

/// A finite probability distribution, sorted non-increasing, exact zeros
/// dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Canonicalizes `probs`: requires finite, non-negative entries summing
    /// to 1 within [`NORMALIZATION_TOL`]; sorts non-increasing and drops
    /// exact zeros (they shift no prefix sum and carry no entropy).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut probs = probs;
        validate_entries(&probs, "probability")?;
        probs.sort_unstable_by(|a, b| b.total_cmp(a));
        while probs.last() == Some(&0.0) {
            probs.pop();
        }
        if probs.is_empty() {
            return Err(Error::InvalidState(
                "distribution has no nonzero probabilities".into(),
            ));
        }
        let mut sum = KahanSum::new();
        for &p in probs.iter().rev() {
            sum.add(p);
        }
        check_normalized(sum.value())?;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits_ascending(self.probs.iter().rev().copied())
    }

    /// Full product distribution with `other`, re-sorted to canonical order.
    pub fn tensor_full(&self, other: &ProbabilityVector) -> Result<ProbabilityVector> {
        let probs = tensor_entries(&self.probs, &other.probs)?;
        Ok(Self { probs })
    }
}

/// Amplitude matrix of a bipartite pure state: entry (r, c) is the amplitude
/// on |r>|c>, stored row-major, squared magnitudes summing to one.
#[derive(Clone, Debug)]
pub struct AmplitudeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl AmplitudeMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidState(
                "amplitude matrix must have positive dimensions".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidState(format!(
                "a {rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for (idx, e) in entries.iter().enumerate() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::InvalidState(format!(
                    "amplitude {idx} is not finite"
                )));
            }
        }
        let mut sq = KahanSum::new();
        for e in &entries {
            sq.add(e.norm_sqr());
        }
        check_normalized(sq.value())?;
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.cols + col]
    }
}

/// Schmidt coefficients of the state described by `amp`: the singular values
/// of the amplitude matrix, canonicalized.
pub fn schmidt_decompose(amp: &AmplitudeMatrix) -> Result<SchmidtVector> {
    let mat = nalgebra::DMatrix::from_fn(amp.rows(), amp.cols(), |r, c| amp.entry(r, c));
    let svd = mat.svd(false, false);
    SchmidtVector::new(svd.singular_values.iter().copied().collect())
}

/// Best overlap between two states given by their Schmidt vectors: the dot
/// product of the (sorted) coefficient lists, the maximum of |<a|U (x) V|b>|
/// over local unitaries. Clamped to [0, 1] against rounding.
pub fn overlap_fidelity(a: &SchmidtVector, b: &SchmidtVector) -> f64 {
    let k = a.len().min(b.len());
    // both lists descend, so walk from the tail to add small products first
    let mut s = KahanSum::new();
    for i in (0..k).rev() {
        s.add(a.coeffs[i] * b.coeffs[i]);
    }
    s.value().clamp(0.0, 1.0)
}

/// L1 distance between two reduced spectra: sum of |p_j - q_j| with the
/// shorter list zero-padded. Ranges over [0, 2]; not halved.
pub fn reduced_trace_distance(p: &ProbabilityVector, q: &ProbabilityVector) -> f64 {
    let n = p.len().max(q.len());
    let mut s = KahanSum::new();
    for i in (0..n).rev() {
        let pi = p.probs.get(i).copied().unwrap_or(0.0);
        let qi = q.probs.get(i).copied().unwrap_or(0.0);
        s.add((pi - qi).abs());
    }
    s.value().clamp(0.0, 2.0)
}

/// Does `x` majorize `y`? Prefix-sum dominance with [`MAJORIZATION_TOL`]
/// slack, the shorter list zero-padded.
pub fn majorizes(x: &ProbabilityVector, y: &ProbabilityVector) -> bool {
    majorization_violation(x, y).is_none()
}

/// First prefix length (1-based) at which `x`'s partial sums fall below
/// `y`'s by more than [`MAJORIZATION_TOL`], or `None` when `x` majorizes `y`.
pub fn majorization_violation(x: &ProbabilityVector, y: &ProbabilityVector) -> Option<usize> {
    let n = x.len().max(y.len());
    let mut px = KahanSum::new();
    let mut py = KahanSum::new();
    for i in 0..n {
        px.add(x.probs.get(i).copied().unwrap_or(0.0));
        py.add(y.probs.get(i).copied().unwrap_or(0.0));
        if px.value() < py.value() - MAJORIZATION_TOL {
            return Some(i + 1);
        }
    }
    None
}

/// Can the state with reduced spectrum `x` be converted into the one with
/// spectrum `y` while borrowing (and returning intact) a catalyst with
/// spectrum `c`? True exactly when `y (x) c` majorizes `x (x) c`; states
/// unreachable by plain LOCC often become reachable this way.
pub fn is_trumped(
    x: &ProbabilityVector,
    y: &ProbabilityVector,
    c: &ProbabilityVector,
) -> Result<bool> {
    Ok(majorizes(&y.tensor_full(c)?, &x.tensor_full(c)?))
}

/// Shared constructor plumbing: entries must be finite and non-negative.
fn validate_entries(entries: &[f64], what: &str) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::InvalidState(format!("empty {what} list")));
    }
    for (idx, &v) in entries.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidState(format!("{what} {idx} is not finite")));
        }
        if v < 0.0 {
            return Err(Error::InvalidState(format!(
                "{what} {idx} is negative ({v})"
            )));
        }
    }
    Ok(())
}

fn check_normalized(sum: f64) -> Result<()> {
    let deviation = (sum - 1.0).abs();
    if deviation > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            squared_sum: sum,
            deviation,
        });
    }
    Ok(())
}

/// All pairwise products of two descending lists, sorted descending. The
/// sort is stable, so exact ties keep row-major (i, j) order.
fn tensor_entries(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let size = a.len() as u128 * b.len() as u128;
    if size > MAX_PRODUCT_ENTRIES as u128 {
        return Err(Error::SpectrumTooLarge {
            size,
            limit: MAX_PRODUCT_ENTRIES,
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out.sort_by(|p, q| q.total_cmp(p));
    Ok(out)
}

/// Entropy in bits of a probability list supplied smallest-first (so the
/// compensated sum sees the tiny contributions before the large ones).
fn entropy_bits_ascending<I: Iterator<Item = f64>>(probs: I) -> f64 {
    let mut s = KahanSum::new();
    for p in probs {
        if p > 0.0 {
            s.add(-p * p.log2());
        }
    }
    s.value()
}

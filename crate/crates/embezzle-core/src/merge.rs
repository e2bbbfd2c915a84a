//! Streaming descent over product spectra.
//!
//! The joint spectrum of `mu(n) (x) target` has `n * m` entries, but every
//! consumer in this crate only ever walks a descending prefix of it. Each of
//! the m target coefficients `alpha_i` contributes the stream
//! `alpha_i / sqrt(j * H(n))`, already descending in j, so a binary heap
//! over the m stream heads yields the global spectrum largest-first with
//! O(m) memory and O(log m) work per element — no materialization, no sort.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// j-th coefficient of mu(n): `1 / sqrt(j * H(n))`, with `ln H(n)`
/// precomputed by the caller. Evaluated in log space so the j = 1 and
/// j = n ends of the family round through the identical code path at
/// every size.
pub(crate) fn mu_coeff(j: u64, ln_harmonic: f64) -> f64 {
    (-0.5 * ((j as f64).ln() + ln_harmonic)).exp()
}

/// One stream head: target coefficient `stream` is currently at catalyst
/// index `j` (1-based). Max-heap order is by value descending; exact ties
/// pop in (stream, j) index order, which keeps the output identical to a
/// stable descending sort of the materialized product.
struct Head {
    value: f64,
    stream: u32,
    j: u64,
}

impl PartialEq for Head {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Head {}

impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.stream.cmp(&self.stream))
            .then_with(|| other.j.cmp(&self.j))
    }
}

/// Iterator over the descending joint spectrum of `mu(n) (x) alphas`,
/// yielding coefficient values (not squares). Exactly `n * alphas.len()`
/// items long.
pub struct OmegaStream {
    heap: BinaryHeap<Head>,
    alphas: Vec<f64>,
    ln_harmonic: f64,
    n: u64,
}

impl OmegaStream {
    pub(crate) fn new(n: u64, alphas: &[f64], ln_harmonic: f64) -> Self {
        debug_assert!(n >= 1);
        let mut heap = BinaryHeap::with_capacity(alphas.len());
        let first = mu_coeff(1, ln_harmonic);
        for (idx, &a) in alphas.iter().enumerate() {
            heap.push(Head {
                value: a * first,
                stream: idx as u32,
                j: 1,
            });
        }
        Self {
            heap,
            alphas: alphas.to_vec(),
            ln_harmonic,
            n,
        }
    }
}

impl Iterator for OmegaStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let head = self.heap.pop()?;
        if head.j < self.n {
            let j = head.j + 1;
            self.heap.push(Head {
                value: self.alphas[head.stream as usize] * mu_coeff(j, self.ln_harmonic),
                stream: head.stream,
                j,
            });
        }
        Some(head.value)
    }
}

//! The universal catalyst family and its protocol figures of merit.
//!
//! Everything here is a statement about the joint spectrum of
//! `mu(n) (x) target`: the protocol's optimal fidelity is the overlap
//! between that spectrum (sorted, truncated to the catalyst's n terms) and
//! `mu(n)` itself, and the residual error is the trace distance between the
//! corresponding margins. Both are computed exactly by streaming the
//! spectrum in descending order, then paired with the closed-form envelopes
//! that hold for *every* target of a given rank: a fidelity floor and a
//! trace-distance ceiling that depend only on `log m / log n`, and an
//! entropy-continuity floor on how small the error could possibly be.

use crate::kahan::KahanSum;
use crate::merge::{mu_coeff, OmegaStream};
use crate::schmidt::SchmidtVector;
use crate::{Error, Result};

/// Largest number of merge pops a single exact computation may perform.
pub const MAX_MERGE_POPS: u64 = 100_000_000;

/// 1/e: the upper end of the validity window for the entropy-continuity
/// floor, and the saturation value reported when the floor hits it.
pub const INV_E: f64 = 1.0 / std::f64::consts::E;

/// Bisection width at which the continuity-floor solver stops.
const FANNES_TOL: f64 = 1e-12;

/// Relative slack applied to the entropy argument of the continuity floor,
/// absorbing the rounding of an exactly-computed `log2(m)` entropy.
const ENTROPY_SLACK: f64 = 1e-9;

/// Catalyst size. Any n >= 1 indexes a family member; the logarithmic
/// bounds additionally need n >= 2.
#[derive(Clone, Copy, Debug, Eq, Hash, Ord, PartialEq, PartialOrd)]
pub struct EmbezzlerIndex(u64);

impl EmbezzlerIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIndex(0));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// The entangled state the protocol conjures: its Schmidt coefficients.
#[derive(Clone, Debug)]
pub struct TargetState {
    alphas: SchmidtVector,
}

impl TargetState {
    pub fn new(alphas: SchmidtVector) -> Self {
        Self { alphas }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        Ok(Self::new(SchmidtVector::new(coeffs)?))
    }

    /// Flat rank-m target: the hardest state of its rank for this protocol.
    pub fn maximally_entangled(m: u64) -> Result<Self> {
        Ok(Self::new(SchmidtVector::maximally_entangled(m)?))
    }

    /// Schmidt rank m.
    pub fn rank(&self) -> u64 {
        self.alphas.len() as u64
    }

    pub fn alphas(&self) -> &SchmidtVector {
        &self.alphas
    }

    /// Entanglement entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.alphas.entropy_bits()
    }
}

/// n-th harmonic number 1 + 1/2 + ... + 1/n, accumulated smallest-first.
pub fn harmonic_number(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidIndex(0));
    }
    let mut s = KahanSum::new();
    for j in (1..=n).rev() {
        s.add(1.0 / j as f64);
    }
    Ok(s.value())
}

/// Schmidt vector of the catalyst mu(n): coefficients `1 / sqrt(j * H(n))`
/// for j = 1..n, evaluated in log space. Materializes n values.
pub fn build_embezzler(n: EmbezzlerIndex) -> Result<SchmidtVector> {
    let nv = n.get();
    if nv > crate::schmidt::MAX_PRODUCT_ENTRIES {
        return Err(Error::SpectrumTooLarge {
            size: nv as u128,
            limit: crate::schmidt::MAX_PRODUCT_ENTRIES,
        });
    }
    let ln_h = harmonic_number(nv)?.ln();
    let coeffs: Vec<f64> = (1..=nv).map(|j| mu_coeff(j, ln_h)).collect();
    Ok(SchmidtVector::from_canonical(coeffs))
}

/// What one descending walk over the joint spectrum of `mu(n) (x) target`
/// learns. The top-n prefix always contributes the fidelity overlap, its
/// own squared mass, the squared-mass deficit against mu, and the largest
/// pointwise excess over mu; the tail mass is collected only when the walk
/// continues past n.
pub(crate) struct SpectrumScan {
    pub fidelity: f64,
    pub sum_omega_sq: f64,
    /// sum over j <= n of (mu_j^2 - omega_j^2)
    pub deficit_top: f64,
    /// sum over j > n of omega_j^2, when the tail was walked
    pub tail_mass: Option<f64>,
    /// max over j <= n of omega_j - mu_j; <= 0 up to rounding, because the
    /// joint spectrum is pointwise dominated by mu on its own support
    pub max_excess: f64,
}

pub(crate) fn scan_spectrum(
    n: EmbezzlerIndex,
    target: &TargetState,
    walk_tail: bool,
) -> Result<SpectrumScan> {
    let nv = n.get();
    let m = target.rank();
    let pops = if walk_tail {
        nv as u128 * m as u128
    } else {
        nv as u128
    };
    if pops > MAX_MERGE_POPS as u128 {
        return Err(Error::SpectrumTooLarge {
            size: pops,
            limit: MAX_MERGE_POPS,
        });
    }
    let ln_h = harmonic_number(nv)?.ln();
    let mut stream = OmegaStream::new(nv, target.alphas().coeffs(), ln_h);
    let mut fid = KahanSum::new();
    let mut wsq = KahanSum::new();
    let mut deficit = KahanSum::new();
    let mut max_excess = f64::NEG_INFINITY;
    for j in 1..=nv {
        let omega = stream.next().expect("joint spectrum has at least n entries");
        let mu = mu_coeff(j, ln_h);
        fid.add(mu * omega);
        wsq.add(omega * omega);
        deficit.add((mu - omega) * (mu + omega));
        let excess = omega - mu;
        if excess > max_excess {
            max_excess = excess;
        }
    }
    let tail_mass = if walk_tail {
        let mut tail = KahanSum::new();
        for omega in stream {
            tail.add(omega * omega);
        }
        Some(tail.value())
    } else {
        None
    };
    Ok(SpectrumScan {
        fidelity: fid.value().clamp(0.0, 1.0),
        sum_omega_sq: wsq.value().clamp(0.0, 1.0),
        deficit_top: deficit.value(),
        tail_mass,
        max_excess,
    })
}

/// The k largest coefficients of the joint spectrum `mu(n) (x) target`,
/// descending. A prefix of a unit vector — not itself normalized.
pub fn omega_top_k(n: EmbezzlerIndex, target: &TargetState, k: u64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let total = n.get() as u128 * target.rank() as u128;
    if k as u128 > total {
        return Err(Error::Domain(format!(
            "requested {k} spectrum entries but the joint spectrum has only {total}"
        )));
    }
    if k > MAX_MERGE_POPS {
        return Err(Error::SpectrumTooLarge {
            size: k as u128,
            limit: MAX_MERGE_POPS,
        });
    }
    let ln_h = harmonic_number(n.get())?.ln();
    Ok(OmegaStream::new(n.get(), target.alphas().coeffs(), ln_h)
        .take(k as usize)
        .collect())
}

/// Exact protocol fidelity: the overlap between the top-n joint spectrum
/// and mu(n). Rank-1 targets cost nothing and score exactly 1.
pub fn protocol_fidelity(n: EmbezzlerIndex, target: &TargetState) -> Result<f64> {
    if target.rank() == 1 {
        return Ok(1.0);
    }
    Ok(scan_spectrum(n, target, false)?.fidelity)
}

/// Squared mass of the top-n joint spectrum: the middle term of the
/// fidelity chain, and the cheap route to the trace distance.
pub fn sum_omega_sq(n: EmbezzlerIndex, target: &TargetState) -> Result<f64> {
    if target.rank() == 1 {
        return Ok(1.0);
    }
    Ok(scan_spectrum(n, target, false)?.sum_omega_sq)
}

/// Exact trace distance between the protocol's catalyst margin and the true
/// mu(n) margin, computed from its defining two-sided sum: the squared-mass
/// deficit of the top-n prefix plus the tail mass beyond it. Equals
/// 2 * (1 - [`sum_omega_sq`]) up to rounding — the identity is checked, not
/// assumed. Walks the full n*m spectrum.
pub fn protocol_delta(n: EmbezzlerIndex, target: &TargetState) -> Result<f64> {
    if target.rank() == 1 {
        return Ok(0.0);
    }
    let scan = scan_spectrum(n, target, true)?;
    let tail = scan.tail_mass.expect("tail was walked");
    Ok((scan.deficit_top + tail).clamp(0.0, 2.0))
}

/// Closed-form fidelity floor `max(0, 1 - log2(m) / log2(n))`, valid for
/// every rank-m target. Rank-1 targets score 1 at any n; for m >= 2 the
/// floor needs n >= 2.
pub fn fidelity_lower_bound(n: u64, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidState("target rank must be positive".into()));
    }
    if m == 1 {
        return Ok(1.0);
    }
    if n < 2 {
        return Err(Error::BoundsUndefined { n, m });
    }
    Ok((1.0 - (m as f64).log2() / (n as f64).log2()).max(0.0))
}

/// Closed-form trace-distance ceiling `2 * log2(m) / log2(n)`. May exceed 2
/// (vacuously true) for small n. Rank-1 targets sit at 0.
pub fn delta_upper_bound(n: u64, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidState("target rank must be positive".into()));
    }
    if m == 1 {
        return Ok(0.0);
    }
    if n < 2 {
        return Err(Error::BoundsUndefined { n, m });
    }
    Ok(2.0 * (m as f64).log2() / (n as f64).log2())
}

/// Smallest catalyst guaranteeing fidelity >= 1 - epsilon for every rank-m
/// target.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub struct MinRank {
    /// Least adequate catalyst size — the least n with
    /// `log2(m) / log2(n) <= epsilon` — when it fits in a u64.
    pub n: Option<u64>,
    /// The same guarantee as maximally entangled qubit pairs:
    /// `ceil(log2(m) / epsilon)`.
    pub qubit_pairs: u64,
}

/// Solves the fidelity floor for n: the least integer strictly above
/// `m^(1/epsilon)`. Evaluated in log space with a one-sided upward nudge,
/// so the guarantee always holds; at an exact integer-power boundary the
/// result may land one above the mathematical minimum.
pub fn min_rank_for(epsilon: f64, m: u64) -> Result<MinRank> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidState("target rank must be positive".into()));
    }
    if m == 1 {
        return Ok(MinRank {
            n: Some(1),
            qubit_pairs: 0,
        });
    }
    let bits = (m as f64).log2() / epsilon;
    let qubit_pairs = (bits - ENTROPY_SLACK).ceil() as u64;
    let n = if bits >= 63.999_999 {
        None
    } else {
        let threshold = bits.exp2() * (1.0 + 1e-13);
        Some(threshold.floor() as u64 + 1)
    };
    Ok(MinRank { n, qubit_pairs })
}

/// The entropy-style penalty `-delta * log2(delta)` (0 at delta = 0),
/// increasing on its validity window [0, 1/e].
pub fn eta(delta: f64) -> Result<f64> {
    if !(0.0..=INV_E).contains(&delta) {
        return Err(Error::Domain(format!(
            "eta is defined on [0, 1/e], got {delta}"
        )));
    }
    Ok(eta_unchecked(delta))
}

fn eta_unchecked(delta: f64) -> f64 {
    if delta > 0.0 {
        -delta * delta.log2()
    } else {
        0.0
    }
}

/// Result of the entropy-continuity floor solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FannesFloor {
    /// Least trace distance compatible with carrying `entropy_bits` of
    /// entanglement across an m x n spectrum.
    pub delta: f64,
    /// True when the floor ran into the 1/e end of the window — the bound
    /// form stops being informative there.
    pub saturated: bool,
}

/// Least delta with `delta * (log2(m) + log2(n)) + eta(delta) >= entropy`,
/// by bisection on the increasing left-hand side over (0, 1/e]. Any
/// protocol producing a rank-m state with that much entropy from an n-term
/// catalyst must disturb the catalyst margin by at least this much.
pub fn fannes_min_delta(entropy_bits: f64, m: u64, n: u64) -> Result<FannesFloor> {
    if m == 0 {
        return Err(Error::InvalidState("target rank must be positive".into()));
    }
    if n == 0 {
        return Err(Error::InvalidIndex(0));
    }
    if !entropy_bits.is_finite() || entropy_bits < 0.0 {
        return Err(Error::Domain(format!(
            "entropy must be a finite non-negative number of bits, got {entropy_bits}"
        )));
    }
    let max_bits = (m as f64).log2();
    if entropy_bits > max_bits + ENTROPY_SLACK {
        return Err(Error::EntropyOutOfRange {
            entropy_bits,
            max_bits,
            m,
        });
    }
    let s = entropy_bits.min(max_bits);
    if s <= 0.0 {
        return Ok(FannesFloor {
            delta: 0.0,
            saturated: false,
        });
    }
    let scale = max_bits + (n as f64).log2();
    let g = |d: f64| d * scale + eta_unchecked(d) - s;
    if g(INV_E) < 0.0 {
        return Ok(FannesFloor {
            delta: INV_E,
            saturated: true,
        });
    }
    let mut lo = 1e-18;
    let mut hi = INV_E;
    for _ in 0..200 {
        if hi - lo <= FANNES_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(FannesFloor {
        delta: 0.5 * (lo + hi),
        saturated: false,
    })
}

/// Everything the protocol promises at one (n, target) pair: the exact
/// spectral quantities next to their analytic envelopes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    /// Schmidt rank of the target.
    pub m: u64,
    /// Exact protocol fidelity.
    pub fidelity: f64,
    /// Fidelity floor `1 - log2(m)/log2(n)` (the `eq4` column of sweeps).
    pub eq4_bound: f64,
    /// Squared mass of the top-n joint spectrum.
    pub sum_omega_sq: f64,
    /// Exact trace distance on the catalyst margin.
    pub delta: f64,
    /// Trace-distance ceiling `2 log2(m)/log2(n)` (the `eq6` column).
    pub eq6_bound: f64,
    /// Entropy-continuity floor on delta.
    pub fannes_floor: f64,
    /// Entanglement entropy of the target, in bits.
    pub target_entropy_bits: f64,
    /// 1 - fidelity: the epsilon this run actually achieved.
    pub epsilon_implied: f64,
}

impl BoundReport {
    /// Internal-consistency relations every honestly computed report
    /// satisfies; returns a description of each violated one. Tolerance
    /// 1e-12 throughout.
    pub fn violated_invariants(&self) -> Vec<String> {
        const TOL: f64 = 1e-12;
        let mut out = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                out.push(msg);
            }
        };
        check(
            (0.0..=1.0 + TOL).contains(&self.fidelity),
            format!("fidelity {} outside [0, 1]", self.fidelity),
        );
        check(
            (0.0..=2.0 + TOL).contains(&self.delta),
            format!("delta {} outside [0, 2]", self.delta),
        );
        check(
            self.fidelity >= self.sum_omega_sq - TOL,
            format!(
                "fidelity {} below sum_omega_sq {}",
                self.fidelity, self.sum_omega_sq
            ),
        );
        check(
            self.sum_omega_sq >= self.eq4_bound - TOL,
            format!(
                "sum_omega_sq {} below the fidelity floor {}",
                self.sum_omega_sq, self.eq4_bound
            ),
        );
        check(
            self.delta <= self.eq6_bound + TOL,
            format!(
                "delta {} above the trace-distance ceiling {}",
                self.delta, self.eq6_bound
            ),
        );
        if self.delta < INV_E {
            check(
                self.fannes_floor <= self.delta + TOL,
                format!(
                    "continuity floor {} above delta {}",
                    self.fannes_floor, self.delta
                ),
            );
        }
        check(
            (self.delta - 2.0 * (1.0 - self.sum_omega_sq)).abs() <= TOL,
            format!(
                "delta {} disagrees with 2(1 - sum_omega_sq) = {}",
                self.delta,
                2.0 * (1.0 - self.sum_omega_sq)
            ),
        );
        check(
            (self.epsilon_implied - (1.0 - self.fidelity)).abs() <= 1e-15,
            format!(
                "epsilon_implied {} is not 1 - fidelity",
                self.epsilon_implied
            ),
        );
        out
    }
}

/// Full exact report at catalyst size n (n >= 2). Rank-1 targets
/// short-circuit to the exact trivial values; everything else is one
/// full-spectrum walk plus the closed-form envelopes.
pub fn bound_report(n: EmbezzlerIndex, target: &TargetState) -> Result<BoundReport> {
    let nv = n.get();
    let m = target.rank();
    if nv < 2 {
        return Err(Error::BoundsUndefined { n: nv, m });
    }
    let entropy = target.entropy_bits();
    if m == 1 {
        return Ok(BoundReport {
            n: nv,
            m,
            fidelity: 1.0,
            eq4_bound: 1.0,
            sum_omega_sq: 1.0,
            delta: 0.0,
            eq6_bound: 0.0,
            fannes_floor: 0.0,
            target_entropy_bits: entropy,
            epsilon_implied: 0.0,
        });
    }
    let scan = scan_spectrum(n, target, true)?;
    let tail = scan.tail_mass.expect("tail was walked");
    let fidelity = scan.fidelity;
    let delta = (scan.deficit_top + tail).clamp(0.0, 2.0);
    Ok(BoundReport {
        n: nv,
        m,
        fidelity,
        eq4_bound: fidelity_lower_bound(nv, m)?,
        sum_omega_sq: scan.sum_omega_sq,
        delta,
        eq6_bound: delta_upper_bound(nv, m)?,
        fannes_floor: fannes_min_delta(entropy, m, nv)?.delta,
        target_entropy_bits: entropy,
        epsilon_implied: 1.0 - fidelity,
    })
}

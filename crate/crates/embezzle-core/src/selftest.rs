//! Randomized verification of the crate's documented invariants.
//!
//! Draws a reproducible batch of random targets (squared coefficients
//! Dirichlet(1)-distributed, so every simplex point is equally likely),
//! runs the full protocol against each at several catalyst sizes, and
//! counts how often every invariant family holds. A healthy build reports
//! zero failures; any miss carries the first offending instance for
//! reproduction. Instances are independent, so the default build fans them
//! out with rayon; results are identical either way because every instance
//! derives its own RNG stream from (seed, index).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embezzle::{
    delta_upper_bound, fannes_min_delta, fidelity_lower_bound, scan_spectrum, EmbezzlerIndex,
    TargetState, INV_E,
};
use crate::schmidt::{
    is_trumped, majorization_violation, majorizes, overlap_fidelity, schmidt_decompose,
    AmplitudeMatrix, Complex64, ProbabilityVector, SchmidtVector,
};
use crate::{Error, Result};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 271_828;

/// Tolerance for the exact-arithmetic invariants.
const TOL: f64 = 1e-12;

/// Stream-splitting increment (golden-ratio hashing) so each instance gets
/// an independent, index-stable RNG.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Parameters of a randomized verification run.
#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Number of random targets to draw.
    pub targets: usize,
    /// Catalyst sizes to run each target against (each >= 2).
    pub catalyst_sizes: Vec<u64>,
    /// Largest target rank to draw (inclusive).
    pub max_rank: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            targets: 1000,
            catalyst_sizes: vec![16, 256, 4096],
            max_rank: 16,
        }
    }
}

/// How one invariant family fared across the whole run.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: u64,
    pub total: u64,
    /// First failing instance, for reproduction.
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

/// Outcome of a full run.
#[derive(Clone, Debug, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckOutcome::ok)
    }

    pub fn total_checks(&self) -> u64 {
        self.checks.iter().map(|c| c.total).sum()
    }

    pub fn total_failures(&self) -> u64 {
        self.checks.iter().map(|c| c.total - c.passed).sum()
    }
}

const N_FAMILIES: usize = 11;

const FAMILY_NAMES: [&str; N_FAMILIES] = [
    "pointwise_domination",
    "joint_majorizes_flat",
    "fidelity_chain",
    "delta_ceiling",
    "delta_two_routes",
    "floor_below_delta",
    "normalization_closure",
    "entropy_additivity",
    "rearrangement_maximality",
    "trumping_extends_majorization",
    "decompose_self_overlap",
];

#[derive(Clone, Default)]
struct Tally {
    passed: u64,
    total: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(msg());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.passed += other.passed;
        self.total += other.total;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

/// Work shared by every instance: validated sizes, their catalyst vectors,
/// and a harmonic-number table for the fidelity chain's middle term.
struct Prep {
    sizes: Vec<SizePrep>,
    /// harmonic[k] = H(k), with harmonic[0] = 0
    harmonic: Vec<f64>,
}

struct SizePrep {
    index: EmbezzlerIndex,
    n: u64,
    mu_probs: ProbabilityVector,
}

impl Prep {
    fn new(cfg: &SelftestConfig) -> Result<Self> {
        if cfg.max_rank == 0 {
            return Err(Error::Domain("max_rank must be positive".into()));
        }
        if cfg.catalyst_sizes.is_empty() {
            return Err(Error::Domain("no catalyst sizes to run against".into()));
        }
        let mut sizes = Vec::with_capacity(cfg.catalyst_sizes.len());
        let mut max_n = 0;
        for &n in &cfg.catalyst_sizes {
            if n < 2 {
                return Err(Error::Domain(format!(
                    "catalyst sizes must be at least 2, got {n}"
                )));
            }
            let index = EmbezzlerIndex::new(n)?;
            sizes.push(SizePrep {
                index,
                n,
                mu_probs: crate::embezzle::build_embezzler(index)?.squared(),
            });
            max_n = max_n.max(n);
        }
        let mut harmonic = Vec::with_capacity(max_n as usize + 1);
        harmonic.push(0.0);
        // built incrementally; plain summation is fine for a lookup table
        // feeding a 1e-12-slack comparison
        for k in 1..=max_n {
            harmonic.push(harmonic[k as usize - 1] + 1.0 / k as f64);
        }
        Ok(Self { sizes, harmonic })
    }
}

/// Runs the full battery. Parallel across instances when the `parallel`
/// feature is on (the default).
#[cfg(feature = "parallel")]
pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let prep = Prep::new(cfg)?;
    let tallies = (0..cfg.targets)
        .into_par_iter()
        .map(|idx| check_instance(cfg, &prep, idx))
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_tallies(cfg, tallies))
}

/// Runs the full battery. Parallel builds dispatch here without rayon.
#[cfg(not(feature = "parallel"))]
pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    run_selftest_seq(cfg)
}

/// Sequential twin of [`run_selftest`]; same results in the same order.
pub fn run_selftest_seq(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let prep = Prep::new(cfg)?;
    let tallies = (0..cfg.targets)
        .map(|idx| check_instance(cfg, &prep, idx))
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_tallies(cfg, tallies))
}

fn fold_tallies(cfg: &SelftestConfig, tallies: Vec<[Tally; N_FAMILIES]>) -> SelftestReport {
    let mut folded: [Tally; N_FAMILIES] = std::array::from_fn(|_| Tally::default());
    for per_target in tallies {
        for (acc, t) in folded.iter_mut().zip(per_target) {
            acc.merge(t);
        }
    }
    SelftestReport {
        seed: cfg.seed,
        checks: FAMILY_NAMES
            .iter()
            .zip(folded)
            .map(|(&name, t)| CheckOutcome {
                name,
                passed: t.passed,
                total: t.total,
                first_failure: t.first_failure,
            })
            .collect(),
    }
}

fn instance_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((idx as u64).wrapping_mul(SEED_STRIDE)))
}

fn check_instance(
    cfg: &SelftestConfig,
    prep: &Prep,
    idx: usize,
) -> Result<[Tally; N_FAMILIES]> {
    let mut rng = instance_rng(cfg.seed, idx);
    let mut tally: [Tally; N_FAMILIES] = std::array::from_fn(|_| Tally::default());

    let rank_drawn = rng.gen_range(1..=cfg.max_rank);
    let probs = random_simplex_point(&mut rng, rank_drawn as usize);
    let target = TargetState::from_coeffs(probs.iter().map(|p| p.sqrt()).collect())?;
    // canonicalization strips exact zeros, so trust the realized rank
    let m = target.rank();
    let flat_probs = SchmidtVector::maximally_entangled(m)?.squared();
    let entropy = target.entropy_bits();

    for size in &prep.sizes {
        let n = size.n;
        let scan = scan_spectrum(size.index, &target, true)?;
        let tail = scan.tail_mass.expect("tail was walked");
        let delta = (scan.deficit_top + tail).clamp(0.0, 2.0);
        let eq4 = fidelity_lower_bound(n, m)?;
        let eq6 = delta_upper_bound(n, m)?;

        tally[0].record(scan.max_excess <= TOL, || {
            format!(
                "target #{idx} (m={m}, n={n}): a joint coefficient exceeds mu by {:e}",
                scan.max_excess
            )
        });

        let joint = size.mu_probs.tensor_full(&target.alphas().squared())?;
        let reference = size.mu_probs.tensor_full(&flat_probs)?;
        tally[1].record(majorizes(&joint, &reference), || {
            format!(
                "target #{idx} (m={m}, n={n}): joint spectrum fails to majorize the flat \
                 reference at prefix {:?}",
                majorization_violation(&joint, &reference)
            )
        });

        let mid = prep.harmonic[(n / m) as usize] / prep.harmonic[n as usize];
        let chain_ok = scan.fidelity >= scan.sum_omega_sq - TOL
            && scan.sum_omega_sq >= mid - TOL
            && mid >= eq4 - TOL;
        tally[2].record(chain_ok, || {
            format!(
                "target #{idx} (m={m}, n={n}): fidelity chain broken: \
                 {} >= {} >= {mid} >= {eq4} fails",
                scan.fidelity, scan.sum_omega_sq
            )
        });

        tally[3].record(delta <= eq6 + TOL, || {
            format!("target #{idx} (m={m}, n={n}): delta {delta} above ceiling {eq6}")
        });

        let via_mass = 2.0 * (1.0 - scan.sum_omega_sq);
        tally[4].record((delta - via_mass).abs() <= TOL, || {
            format!(
                "target #{idx} (m={m}, n={n}): delta routes disagree: {delta} vs {via_mass}"
            )
        });

        if delta < INV_E {
            let floor = fannes_min_delta(entropy, m, n)?.delta;
            tally[5].record(floor <= delta + TOL, || {
                format!(
                    "target #{idx} (m={m}, n={n}): continuity floor {floor} above delta {delta}"
                )
            });
        }
    }

    check_order_invariants(&mut rng, &mut tally, idx, &target, &probs)?;
    check_decomposition(&mut rng, &mut tally, idx);
    Ok(tally)
}

/// The order-theoretic and spectral invariants that don't involve a
/// catalyst size.
fn check_order_invariants(
    rng: &mut ChaCha8Rng,
    tally: &mut [Tally; N_FAMILIES],
    idx: usize,
    target: &TargetState,
    probs: &[f64],
) -> Result<()> {
    // canonical form survives a round trip through re-validation
    let closure_ok = SchmidtVector::new(target.alphas().coeffs().to_vec()).is_ok()
        && ProbabilityVector::new(target.alphas().squared().probs().to_vec()).is_ok();
    tally[6].record(closure_ok, || {
        format!("target #{idx}: canonical form failed re-validation")
    });

    let aux_rank = rng.gen_range(1..=4usize);
    let aux_probs = random_simplex_point(rng, aux_rank);
    let aux = SchmidtVector::new(aux_probs.iter().map(|p| p.sqrt()).collect())?;
    let product = target.alphas().tensor_full(&aux)?;
    let additivity =
        (product.entropy_bits() - target.entropy_bits() - aux.entropy_bits()).abs();
    tally[7].record(additivity <= 1e-9, || {
        format!("target #{idx}: entropy additivity off by {additivity:e}")
    });

    // sorted overlap beats every rearranged pairing
    let sorted = overlap_fidelity(target.alphas(), &aux);
    let len = target.alphas().len().max(aux.len());
    let mut padded: Vec<f64> = aux.coeffs().to_vec();
    padded.resize(len, 0.0);
    let mut rearranged_ok = true;
    let mut worst = sorted;
    for _ in 0..8 {
        padded.shuffle(rng);
        let dot: f64 = target
            .alphas()
            .coeffs()
            .iter()
            .zip(&padded)
            .map(|(a, b)| a * b)
            .sum();
        if dot > worst {
            worst = dot;
        }
        if dot > sorted + TOL {
            rearranged_ok = false;
        }
    }
    tally[8].record(rearranged_ok, || {
        format!("target #{idx}: a rearranged overlap {worst} beats the sorted one {sorted}")
    });

    // averaging steps move strictly down the majorization order, and a
    // catalyst never breaks an order that already holds
    let mixed = t_transform_chain(rng, probs);
    let y = ProbabilityVector::new(probs.to_vec())?;
    let x = ProbabilityVector::new(mixed)?;
    let c_rank = rng.gen_range(2..=4usize);
    let c = ProbabilityVector::new(random_simplex_point(rng, c_rank))?;
    let order_ok = majorizes(&y, &x) && is_trumped(&x, &y, &c)?;
    tally[9].record(order_ok, || {
        format!("target #{idx}: averaging chain or its catalyzed form broke the order")
    });
    Ok(())
}

fn check_decomposition(rng: &mut ChaCha8Rng, tally: &mut [Tally; N_FAMILIES], idx: usize) {
    let rows = rng.gen_range(2..=5usize);
    let cols = rng.gen_range(2..=5usize);
    let amp = random_amplitude_matrix(rng, rows, cols);
    let ok = match schmidt_decompose(&amp) {
        Ok(sigma) => {
            let unit = (overlap_fidelity(&sigma, &sigma) - 1.0).abs() <= TOL;
            let mass: f64 = sigma.coeffs().iter().map(|c| c * c).sum();
            unit && (mass - 1.0).abs() <= 1e-9
        }
        Err(_) => false,
    };
    tally[10].record(ok, || {
        format!("target #{idx}: decomposition of a random {rows}x{cols} state lost mass")
    });
}

/// Uniform point on the probability simplex (Dirichlet(1)): normalized
/// exponential draws.
fn random_simplex_point(rng: &mut ChaCha8Rng, rank: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..rank)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && draws.iter().all(|d| d.is_finite()) {
            return draws.iter().map(|d| d / total).collect();
        }
    }
}

/// A few averaging (T-transform) steps: each mixes two entries toward their
/// mean, preserving the sum — the textbook way down the majorization order.
fn t_transform_chain(rng: &mut ChaCha8Rng, probs: &[f64]) -> Vec<f64> {
    let mut out = probs.to_vec();
    if out.len() < 2 {
        return out;
    }
    for _ in 0..6 {
        let i = rng.gen_range(0..out.len());
        let mut j = rng.gen_range(0..out.len());
        while j == i {
            j = rng.gen_range(0..out.len());
        }
        let lambda = rng.gen_range(0.5..1.0);
        let (pi, pj) = (out[i], out[j]);
        out[i] = lambda * pi + (1.0 - lambda) * pj;
        out[j] = (1.0 - lambda) * pi + lambda * pj;
    }
    out
}

/// Random pure state on a rows x cols system: complex Gaussian entries,
/// Frobenius-normalized.
fn random_amplitude_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> AmplitudeMatrix {
    loop {
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let (re, im) = gauss_pair(rng);
            entries.push(Complex64::new(re, im));
        }
        let norm: f64 = entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let entries = entries.iter().map(|e| e / norm).collect();
            if let Ok(amp) = AmplitudeMatrix::new(rows, cols, entries) {
                return amp;
            }
        }
    }
}

/// One Box-Muller draw: two independent standard normals.
fn gauss_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

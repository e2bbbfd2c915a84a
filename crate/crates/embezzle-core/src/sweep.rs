//! Batch evaluation of bound reports across catalyst sizes.
//!
//! Points are independent, so the default build fans them out with rayon;
//! `sweep_points_seq` is the always-available sequential twin (and what
//! `sweep_points` falls back to without the `parallel` feature). Both
//! produce identical results in identical order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::embezzle::{
    bound_report, delta_upper_bound, fannes_min_delta, fidelity_lower_bound, EmbezzlerIndex,
    TargetState, MAX_MERGE_POPS,
};
use crate::Result;

/// One sweep row. Exact spectral quantities are only computed while the
/// spectrum walk fits the work budget; past that the analytic envelopes
/// still stand on their own.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepPoint {
    Full(crate::BoundReport),
    BoundsOnly(BoundsOnlyReport),
}

impl SweepPoint {
    pub fn n(&self) -> u64 {
        match self {
            SweepPoint::Full(r) => r.n,
            SweepPoint::BoundsOnly(r) => r.n,
        }
    }

    pub fn m(&self) -> u64 {
        match self {
            SweepPoint::Full(r) => r.m,
            SweepPoint::BoundsOnly(r) => r.m,
        }
    }
}

/// The closed-form half of a [`crate::BoundReport`]: what is still known at
/// catalyst sizes too large to walk.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsOnlyReport {
    pub n: u64,
    pub m: u64,
    pub eq4_bound: f64,
    pub eq6_bound: f64,
    pub fannes_floor: f64,
    pub target_entropy_bits: f64,
}

fn sweep_point(n: u64, target: &TargetState) -> Result<SweepPoint> {
    let idx = EmbezzlerIndex::new(n)?;
    let m = target.rank();
    // rank-1 reports are closed-form at any size; everything else needs the
    // full n*m walk to stay within budget
    if m > 1 && n as u128 * m as u128 > MAX_MERGE_POPS as u128 {
        let entropy = target.entropy_bits();
        return Ok(SweepPoint::BoundsOnly(BoundsOnlyReport {
            n,
            m,
            eq4_bound: fidelity_lower_bound(n, m)?,
            eq6_bound: delta_upper_bound(n, m)?,
            fannes_floor: fannes_min_delta(entropy, m, n)?.delta,
            target_entropy_bits: entropy,
        }));
    }
    Ok(SweepPoint::Full(bound_report(idx, target)?))
}

/// Evaluates every catalyst size in `ns` against `target`, in order.
/// Parallel when the `parallel` feature is on (the default).
#[cfg(feature = "parallel")]
pub fn sweep_points(ns: &[u64], target: &TargetState) -> Result<Vec<SweepPoint>> {
    ns.par_iter().map(|&n| sweep_point(n, target)).collect()
}

/// Evaluates every catalyst size in `ns` against `target`, in order.
#[cfg(not(feature = "parallel"))]
pub fn sweep_points(ns: &[u64], target: &TargetState) -> Result<Vec<SweepPoint>> {
    sweep_points_seq(ns, target)
}

/// Sequential twin of [`sweep_points`]; same results, same order.
pub fn sweep_points_seq(ns: &[u64], target: &TargetState) -> Result<Vec<SweepPoint>> {
    ns.iter().map(|&n| sweep_point(n, target)).collect()
}

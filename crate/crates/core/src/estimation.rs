//! Exact weighted Jaccard similarity and signature-based estimators.

use std::collections::HashMap;

use serde::Serialize;

use crate::bag::WeightedBag;
use crate::discretization::WeightDiscretization;
use crate::error::{Error, Result};
use crate::signatures::{BbitSignature, IcwsSignature, RealSignature, Signature};

/// Result of comparing two signatures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JaccardEstimate {
    pub value: f64,
    pub matches: usize,
    pub m: usize,
    /// Both signatures come from empty bags. The value is then 1 by
    /// convention.
    pub empty_inputs: bool,
}

/// Sums of `min` and `max` over the union of both supports.
fn min_max_sums(a: &WeightedBag, b: &WeightedBag, map: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut pairs: HashMap<u64, (f64, f64)> = HashMap::with_capacity(a.len() + b.len());
    for &(d, w) in a.entries() {
        pairs.entry(d).or_default().0 = map(w)?;
    }
    for &(d, w) in b.entries() {
        pairs.entry(d).or_default().1 = map(w)?;
    }
    // Sum in a fixed order so the result does not depend on hash iteration.
    let mut terms: Vec<(u64, f64, f64)> = pairs.into_iter().map(|(d, (x, y))| (d, x, y)).collect();
    terms.sort_unstable_by_key(|t| t.0);
    Ok(terms.iter().fold((0.0, 0.0), |(lo, hi), &(_, x, y)| (lo + x.min(y), hi + x.max(y))))
}

fn ratio(min_sum: f64, max_sum: f64) -> f64 {
    if max_sum == 0.0 {
        1.0
    } else {
        min_sum / max_sum
    }
}

/// `sum min(w_A, w_B) / sum max(w_A, w_B)`, with 1 for two empty bags.
/// Bags validate their weights on construction, so this cannot fail.
pub fn exact_weighted_jaccard(a: &WeightedBag, b: &WeightedBag) -> f64 {
    let (lo, hi) = min_max_sums(a, b, Ok).expect("identity map is infallible");
    ratio(lo, hi)
}

/// Weighted Jaccard similarity of the discretized weights.
pub fn exact_discretized_jaccard(a: &WeightedBag, b: &WeightedBag, grid: &WeightDiscretization) -> Result<f64> {
    let (lo, hi) = min_max_sums(a, b, |w| grid.discretized_weight(w))?;
    Ok(ratio(lo, hi))
}

fn finish(matches: usize, m: usize, empty_inputs: bool) -> JaccardEstimate {
    JaccardEstimate { value: matches as f64 / m as f64, matches, m, empty_inputs }
}

/// Fraction of bit-identical components.
pub fn estimate_jaccard(a: &RealSignature, b: &RealSignature) -> Result<JaccardEstimate> {
    a.header.check_compatible(&b.header)?;
    let matches = a.components.iter().zip(&b.components).filter(|(x, y)| x.to_bits() == y.to_bits()).count();
    Ok(finish(matches, a.header.m, a.is_empty() && b.is_empty()))
}

/// Fraction of components with equal element and level.
pub fn estimate_icws(a: &IcwsSignature, b: &IcwsSignature) -> Result<JaccardEstimate> {
    a.header.check_compatible(&b.header)?;
    let matches = a.components.iter().zip(&b.components).filter(|(x, y)| x == y).count();
    let empty = |s: &IcwsSignature| s.components.iter().all(Option::is_none);
    Ok(finish(matches, a.header.m, empty(a) && empty(b)))
}

/// Bias-corrected estimate `(raw - 2^-b) / (1 - 2^-b)` for b-bit signatures,
/// where `raw` is the match fraction. Values below zero are not clamped.
pub fn bbit_estimate(a: &BbitSignature, b: &BbitSignature) -> Result<JaccardEstimate> {
    a.header.check_compatible(&b.header)?;
    let matches = a.components.iter().zip(&b.components).filter(|(x, y)| x == y).count();
    let raw = matches as f64 / a.header.m as f64;
    let chance = 0.5f64.powi(a.b as i32);
    Ok(JaccardEstimate { value: (raw - chance) / (1.0 - chance), matches, m: a.header.m, empty_inputs: false })
}

/// Estimate for any pair of signatures of the same kind.
pub fn estimate(a: &Signature, b: &Signature) -> Result<JaccardEstimate> {
    match (a, b) {
        (Signature::Real(x), Signature::Real(y)) => estimate_jaccard(x, y),
        (Signature::Icws(x), Signature::Icws(y)) => estimate_icws(x, y),
        (Signature::Bbit(x), Signature::Bbit(y)) => bbit_estimate(x, y),
        _ => Err(Error::IncompatibleSignatures("different signature kinds".into())),
    }
}

fn check_jaccard(j: f64, m: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&j) {
        return Err(Error::InvalidRange(format!("Jaccard similarity {j} not in [0, 1]")));
    }
    if m == 0 {
        return Err(Error::InvalidSize(m));
    }
    Ok(())
}

/// Variance `J (1 - J) / m` of the match-fraction estimator.
pub fn estimator_variance(j: f64, m: usize) -> Result<f64> {
    check_jaccard(j, m)?;
    Ok(j * (1.0 - j) / m as f64)
}

/// Variance of the b-bit estimator: `base + (1 - J) / ((2^b - 1) m)`.
pub fn bbit_variance(j: f64, m: usize, b: u32, base_variance: f64) -> Result<f64> {
    check_jaccard(j, m)?;
    if !(1..=64).contains(&b) {
        return Err(Error::InvalidRange(format!("bit count {b} not in [1, 64]")));
    }
    if base_variance.is_nan() || base_variance < 0.0 {
        return Err(Error::InvalidRange(format!("base variance {base_variance} must be nonnegative")));
    }
    Ok(base_variance + (1.0 - j) / ((2f64.powi(b as i32) - 1.0) * m as f64))
}

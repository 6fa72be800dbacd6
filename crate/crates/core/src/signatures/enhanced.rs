use crate::bag::WeightedBag;
use crate::discretization::WeightDiscretization;
use crate::error::Result;
use crate::maxtracker::MaxTracker;
use crate::poisson::PoissonProcess;
use crate::rng::{namespace, RngConfig, SeedBuilder};

use super::{check_size, Algorithm, NoopObserver, Observer, RealSignature, SignatureHeader};

/// Generates the points of each elementary process `(d, k)` in ascending
/// order and stops once they exceed the current signature maximum. Same
/// distribution as [`naive_signature`](super::naive_signature); practical for
/// small grids such as the binary grid of unweighted sets.
pub fn enhanced_signature(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
) -> Result<RealSignature> {
    enhanced_signature_observed(bag, grid, m, config, &mut NoopObserver)
}

pub fn enhanced_signature_observed(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
    observer: &mut impl Observer,
) -> Result<RealSignature> {
    check_size(m)?;
    let mut tracker = MaxTracker::new(m)?;
    for &(element, weight) in bag.entries() {
        let top = grid.index_of(weight)?;
        for level in 1..=top {
            let rng = config.generator(SeedBuilder::new(namespace::ELEMENT_LEVEL).u64(element).u64(level));
            let mut process = PoissonProcess::with_weight_index(0.0, rng, level - 1, level, weight, top, grid);
            process.next_point(m);
            observer.point_generated();
            while process.point() <= tracker.current_max() {
                let j = process.component().expect("point generated");
                observer.relevant_point(process.point(), j);
                tracker.lower(j, process.point());
                process.next_point(m);
                observer.point_generated();
            }
        }
    }
    Ok(RealSignature {
        header: SignatureHeader::new(Algorithm::Enhanced, m, Some(grid), config),
        components: tracker.into_leaves(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::Stats;

    #[test]
    fn empty_bag_is_all_infinite() {
        let sig = enhanced_signature(&WeightedBag::empty(), &WeightDiscretization::binary(), 4, RngConfig::default())
            .unwrap();
        assert!(sig.is_empty());
    }

    #[test]
    fn single_element_point_count_is_coupon_collector() {
        // Independent oracle: coupon collector with m = 4 has mean 4 H_4.
        let m = 4;
        let harmonic: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
        let expected = m as f64 * harmonic;
        let reps = 20_000u64;
        let mut total = 0u64;
        for d in 0..reps {
            let bag = WeightedBag::new(vec![(d, 1.0)]).unwrap();
            let mut stats = Stats::default();
            let sig = enhanced_signature_observed(&bag, &WeightDiscretization::binary(), m, RngConfig::default(), &mut stats)
                .unwrap();
            assert!(sig.components.iter().all(|c| c.is_finite()));
            // The final point that exceeds the maximum is generated but unused.
            total += stats.points - 1;
        }
        let mean = total as f64 / reps as f64;
        // Var of the coupon collector time for m = 4 is sum (1-p)/p^2 = 14.44...
        let var: f64 = (1..=m).map(|i| {
            let p = i as f64 / m as f64;
            (1.0 - p) / (p * p)
        }).sum();
        let se = (var / reps as f64).sqrt();
        assert!((mean - expected).abs() < 5.0 * se, "mean {mean}, expected {expected}");
    }
}

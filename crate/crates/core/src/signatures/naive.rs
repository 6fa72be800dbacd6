use crate::bag::WeightedBag;
use crate::discretization::WeightDiscretization;
use crate::error::Result;
use crate::rng::{namespace, RngConfig, SeedBuilder};

use super::{check_size, Algorithm, RealSignature, SignatureHeader};

/// Direct evaluation of the signature definition: every relevant pair
/// `(d, k)` draws `m` exponentials with rate `(v_k - v_{k-1}) / m` and each
/// component keeps the minimum. Cost is `O(K m n)`; use only with small grids.
pub fn naive_signature(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
) -> Result<RealSignature> {
    check_size(m)?;
    let mut components = vec![f64::INFINITY; m];
    for &(element, weight) in bag.entries() {
        let top = grid.index_of(weight)?;
        for level in 1..=top {
            let rate = (grid.value_at(level) - grid.value_at(level - 1)) / m as f64;
            let mut rng = config.generator(SeedBuilder::new(namespace::ELEMENT_LEVEL).u64(element).u64(level));
            for h in components.iter_mut() {
                let x = rng.sample_exponential(rate)?;
                if x < *h {
                    *h = x;
                }
            }
        }
    }
    Ok(RealSignature { header: SignatureHeader::new(Algorithm::Naive, m, Some(grid), config), components })
}

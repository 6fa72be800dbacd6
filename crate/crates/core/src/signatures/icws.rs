//! Improved consistent weighted sampling (Ioffe 2010), the `O(m n)` baseline.

use crate::bag::WeightedBag;
use crate::error::Result;
use crate::rng::{namespace, RngConfig, SeedBuilder};

use super::{check_size, Algorithm, IcwsSample, IcwsSignature, SignatureHeader};

/// For every component `j` and element `d` with positive weight, draws
/// `r, c ~ Gamma(2, 1)` and `beta ~ Uniform(0, 1)` from a generator seeded
/// with `(d, j)`, computes `t = floor(ln w / r + beta)`,
/// `ln y = r (t - beta)` and `ln a = ln c - ln y - r`, and keeps the element
/// with the smallest `a`. Components match with probability equal to the
/// exact weighted Jaccard similarity.
pub fn icws_signature(bag: &WeightedBag, m: usize, config: RngConfig) -> Result<IcwsSignature> {
    check_size(m)?;
    let mut best = vec![f64::INFINITY; m];
    let mut components: Vec<Option<IcwsSample>> = vec![None; m];
    for (element, weight) in bag.positive() {
        let ln_weight = weight.ln();
        for (j, (best_a, sample)) in best.iter_mut().zip(components.iter_mut()).enumerate() {
            let mut rng = config.generator(SeedBuilder::new(namespace::ICWS).u64(element).u64(j as u64));
            let r = -(rng.open_unit() * rng.open_unit()).ln();
            let c = -(rng.open_unit() * rng.open_unit()).ln();
            let beta = rng.open_unit();
            let t = (ln_weight / r + beta).floor();
            let ln_y = r * (t - beta);
            let ln_a = c.ln() - ln_y - r;
            if ln_a < *best_a {
                *best_a = ln_a;
                *sample = Some(IcwsSample { element, level: t as i64 });
            }
        }
    }
    Ok(IcwsSignature { header: SignatureHeader::new(Algorithm::Icws, m, None, config), components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::estimate_icws;

    #[test]
    fn identical_and_disjoint_bags() {
        let a = WeightedBag::new(vec![(1, 0.5), (2, 3.0), (3, 1.25)]).unwrap();
        let b = WeightedBag::new(vec![(4, 0.5), (5, 3.0)]).unwrap();
        let config = RngConfig::default();
        let sa = icws_signature(&a, 64, config).unwrap();
        let sb = icws_signature(&b, 64, config).unwrap();
        assert!(sa.components.iter().all(Option::is_some));
        assert_eq!(estimate_icws(&sa, &icws_signature(&a, 64, config).unwrap()).unwrap().value, 1.0);
        assert_eq!(estimate_icws(&sa, &sb).unwrap().value, 0.0);
    }

    #[test]
    fn zero_weights_are_skipped() {
        let a = WeightedBag::new(vec![(1, 0.0), (2, 0.0)]).unwrap();
        let sig = icws_signature(&a, 8, RngConfig::default()).unwrap();
        assert!(sig.components.iter().all(Option::is_none));
    }

    #[test]
    fn scaled_weights_match_with_jaccard_probability() {
        // w_B = w_A / 2 gives J = 0.5.
        let config = RngConfig::default();
        let m = 4096;
        let a = WeightedBag::new(vec![(10, 2.0), (11, 0.3), (12, 5.0)]).unwrap();
        let b = WeightedBag::new(vec![(10, 1.0), (11, 0.15), (12, 2.5)]).unwrap();
        let est = estimate_icws(&icws_signature(&a, m, config).unwrap(), &icws_signature(&b, m, config).unwrap())
            .unwrap();
        let se = (0.25 / m as f64).sqrt();
        assert!((est.value - 0.5).abs() < 5.0 * se, "{}", est.value);
    }
}

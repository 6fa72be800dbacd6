use crate::error::{Error, Result};
use crate::rng::{namespace, RngConfig, SeedBuilder};

use super::{BbitSignature, IcwsSignature, RealSignature, SignatureHeader};

fn check_bits(b: u32) -> Result<()> {
    if !(1..=64).contains(&b) {
        return Err(Error::InvalidRange(format!("bit count {b} not in [1, 64]")));
    }
    Ok(())
}

fn reduced_header(header: &SignatureHeader, b: u32) -> Result<SignatureHeader> {
    if header.b.is_some() {
        return Err(Error::InvalidRange("signature is already reduced".into()));
    }
    Ok(SignatureHeader { b: Some(b), ..header.clone() })
}

/// Replaces every component by `b` uniform bits drawn from a generator seeded
/// with the component's bit pattern. Equal components map to equal values,
/// unequal ones collide with probability `2^-b`.
pub fn bbit_transform(sig: &RealSignature, b: u32) -> Result<BbitSignature> {
    check_bits(b)?;
    if sig.components.iter().any(|c| !c.is_finite()) {
        return Err(Error::IncompleteSignature);
    }
    let config = RngConfig::from_tag(&sig.header.config_tag)?;
    let components = sig
        .components
        .iter()
        .map(|h| config.generator(SeedBuilder::new(namespace::BBIT).f64(*h)).take_bits(b))
        .collect();
    Ok(BbitSignature { header: reduced_header(&sig.header, b)?, b, components })
}

/// b-bit reduction of an ICWS signature, seeding with the `(element, level)`
/// pair of each component.
pub fn bbit_transform_icws(sig: &IcwsSignature, b: u32) -> Result<BbitSignature> {
    check_bits(b)?;
    let config = RngConfig::from_tag(&sig.header.config_tag)?;
    let components = sig
        .components
        .iter()
        .map(|c| {
            let sample = c.ok_or(Error::IncompleteSignature)?;
            let seed = SeedBuilder::new(namespace::BBIT_ICWS).u64(sample.element).i64(sample.level);
            Ok(config.generator(seed).take_bits(b))
        })
        .collect::<Result<_>>()?;
    Ok(BbitSignature { header: reduced_header(&sig.header, b)?, b, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::WeightDiscretization;
    use crate::signatures::Algorithm;

    fn real(components: Vec<f64>) -> RealSignature {
        let grid = WeightDiscretization::binary();
        RealSignature {
            header: SignatureHeader::new(Algorithm::Bmh1, components.len(), Some(&grid), RngConfig::default()),
            components,
        }
    }

    #[test]
    fn equal_components_equal_bits() {
        let sig = real(vec![0.25, 0.5, 0.25, 0.75]);
        let reduced = bbit_transform(&sig, 8).unwrap();
        assert_eq!(reduced.components[0], reduced.components[2]);
        assert!(reduced.components.iter().all(|c| *c < 256));
        assert_eq!(reduced.header.b, Some(8));
        assert!(bbit_transform(&reduced_back(&reduced), 8).is_err());
    }

    fn reduced_back(b: &BbitSignature) -> RealSignature {
        RealSignature { header: b.header.clone(), components: vec![1.0; b.components.len()] }
    }

    #[test]
    fn infinite_components_are_rejected() {
        let sig = real(vec![0.25, f64::INFINITY]);
        assert_eq!(bbit_transform(&sig, 4), Err(Error::IncompleteSignature));
        assert!(bbit_transform(&real(vec![0.25]), 0).is_err());
        assert!(bbit_transform(&real(vec![0.25]), 65).is_err());
    }

    #[test]
    fn one_bit_frequency_and_collisions() {
        // Distinct values: b = 1 bits are fair coins; b = 4 collide with
        // probability 1/16 between independent values.
        let n = 100_000;
        let values: Vec<f64> = (1..=n).map(|i| i as f64 * 1e-3).collect();
        let ones = bbit_transform(&real(values.clone()), 1).unwrap().components.iter().sum::<u64>();
        let frac = ones as f64 / n as f64;
        assert!((frac - 0.5).abs() < 5.0 * (0.25 / n as f64).sqrt(), "{frac}");

        let a = bbit_transform(&real(values.clone()), 4).unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v + 0.5e-3).collect();
        let b = bbit_transform(&real(shifted), 4).unwrap();
        let collisions = a.components.iter().zip(&b.components).filter(|(x, y)| x == y).count();
        let p = 1.0 / 16.0;
        let rate = collisions as f64 / n as f64;
        assert!((rate - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt(), "{rate}");
    }
}

use std::collections::HashSet;

use crate::bag::WeightedBag;
use crate::discretization::WeightDiscretization;
use crate::error::{Error, Result};
use crate::estimation::{exact_discretized_jaccard, exact_weighted_jaccard};
use crate::rng::SeededGenerator;

/// A bag of weight pairs `(w_A, w_B)`. Element ids are assigned at random
/// when the case is instantiated, so only the weights matter.
#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub name: String,
    pub pairs: Vec<(f64, f64)>,
}

impl TestCase {
    pub fn new(name: impl Into<String>, pairs: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for w in [a, b] {
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::InvalidWeight { element: i as u64, weight: w });
                }
            }
        }
        Ok(TestCase { name: name.into(), pairs })
    }

    /// The two bags with element ids `0..n`.
    fn indexed_bags(&self) -> (WeightedBag, WeightedBag) {
        let side = |pick: fn(&(f64, f64)) -> f64| {
            WeightedBag::new(self.pairs.iter().enumerate().map(|(i, p)| (i as u64, pick(p))).collect())
                .expect("weights validated on construction")
        };
        (side(|p| p.0), side(|p| p.1))
    }

    pub fn expected_jaccard(&self) -> f64 {
        let (a, b) = self.indexed_bags();
        exact_weighted_jaccard(&a, &b)
    }

    pub fn expected_discretized_jaccard(&self, grid: &WeightDiscretization) -> Result<f64> {
        let (a, b) = self.indexed_bags();
        exact_discretized_jaccard(&a, &b, grid)
    }

    /// Parses one `<w_A><TAB><w_B>` pair per line, skipping blank lines and
    /// `#` comments.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line, message };
            let (a, b) = trimmed.split_once('\t').ok_or_else(|| err("expected <wA>\\t<wB>".into()))?;
            let weight = |s: &str| -> Result<f64> {
                let w: f64 = s.trim().parse().map_err(|_| err(format!("bad weight {s:?}")))?;
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(err(format!("weight {w} must be finite and nonnegative")));
                }
                Ok(w)
            };
            pairs.push((weight(a)?, weight(b)?));
        }
        TestCase::new(name, pairs)
    }

    pub fn to_text(&self) -> String {
        self.pairs.iter().map(|(a, b)| format!("{a:?}\t{b:?}\n")).collect()
    }
}

fn repeat(pair: (f64, f64), count: usize) -> impl Iterator<Item = (f64, f64)> {
    std::iter::repeat(pair).take(count)
}

/// The built-in verification suite: binary-weight cases with
/// `J` in {1, 0, 1/3, 1/2}, scaled weights, mixed overlaps, a single
/// element, extreme weight ranges and a larger irregular case.
pub fn canonical_cases() -> Vec<TestCase> {
    let scaled = [0.5, 1.3, 2.7, 4.1];
    let many_small = (1..=20u32).map(|i| {
        let a = f64::from((i * 37) % 11) * 0.25;
        let b = f64::from((i * 53) % 13) * 0.2;
        (a, b)
    });
    let cases = vec![
        ("binary_identical", repeat((1.0, 1.0), 10).collect::<Vec<_>>()),
        ("binary_disjoint", repeat((1.0, 0.0), 5).chain(repeat((0.0, 1.0), 5)).collect()),
        (
            "binary_third",
            repeat((1.0, 1.0), 4).chain(repeat((1.0, 0.0), 4)).chain(repeat((0.0, 1.0), 4)).collect(),
        ),
        ("binary_half", repeat((1.0, 1.0), 3).chain(repeat((1.0, 0.0), 3)).collect()),
        ("binary_small", vec![(1.0, 1.0), (1.0, 0.0)]),
        ("scaled_weights", scaled.iter().map(|&w| (w, 0.6 * w)).collect()),
        ("mixed_weights", vec![(0.3, 1.7), (2.5, 0.4), (1.0, 1.0), (0.0, 3.2), (5.5, 0.0), (0.05, 0.07)]),
        ("single_element", vec![(3.0, 7.0)]),
        ("tiny_and_huge", vec![(1e-3, 2.0), (5e2, 4e2), (1e-6, 1e-6), (7e4, 1e-2)]),
        ("many_small", many_small.collect()),
    ];
    cases.into_iter().map(|(name, pairs)| TestCase::new(name, pairs).expect("valid canonical case")).collect()
}

pub fn canonical_case(name: &str) -> Option<TestCase> {
    canonical_cases().into_iter().find(|c| c.name == name)
}

/// Assigns a fresh random id to each pair (redrawing on collisions), drops
/// zero weights and shuffles each bag independently.
pub fn instantiate_test_case(tc: &TestCase, rng: &mut SeededGenerator) -> (WeightedBag, WeightedBag) {
    let mut seen = HashSet::with_capacity(tc.pairs.len());
    let mut a = Vec::with_capacity(tc.pairs.len());
    let mut b = Vec::with_capacity(tc.pairs.len());
    for &(wa, wb) in &tc.pairs {
        let id = loop {
            let id = rng.next_u64();
            if seen.insert(id) {
                break id;
            }
        };
        if wa > 0.0 {
            a.push((id, wa));
        }
        if wb > 0.0 {
            b.push((id, wb));
        }
    }
    rng.shuffle(&mut a);
    rng.shuffle(&mut b);
    let bag = |entries| WeightedBag::new(entries).expect("unique ids and validated weights");
    (bag(a), bag(b))
}

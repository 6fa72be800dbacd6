//! Weighted bags over 64-bit element ids.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A list of `(element, weight)` pairs with unique elements and finite,
/// nonnegative weights. Entry order is preserved.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedBag {
    entries: Vec<(u64, f64)>,
}

impl WeightedBag {
    pub fn new(entries: Vec<(u64, f64)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for &(element, weight) in &entries {
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(Error::InvalidWeight { element, weight });
            }
            if !seen.insert(element) {
                return Err(Error::DuplicateElement(element));
            }
        }
        Ok(WeightedBag { entries })
    }

    pub fn empty() -> Self {
        WeightedBag::default()
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries with positive weight.
    pub fn positive(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().copied().filter(|&(_, w)| w > 0.0)
    }

    /// Parses one `<element><TAB><weight>` entry per line. Elements are decimal
    /// or `0x`-prefixed hexadecimal. Blank lines and lines starting with `#`
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line, message };
            let (id, weight) = trimmed
                .split_once('\t')
                .ok_or_else(|| parse_err("expected <element>\\t<weight>".into()))?;
            let element = parse_element(id.trim()).ok_or_else(|| parse_err(format!("bad element id {id:?}")))?;
            let weight: f64 = weight
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad weight {weight:?}")))?;
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(parse_err(format!("weight {weight} must be finite and nonnegative")));
            }
            if !seen.insert(element) {
                return Err(parse_err(format!("duplicate element {element}")));
            }
            entries.push((element, weight));
        }
        Ok(WeightedBag { entries })
    }

    /// Inverse of [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (element, weight) in &self.entries {
            let _ = writeln!(out, "{element}\t{weight:?}");
        }
        out
    }
}

fn parse_element(s: &str) -> Option<u64> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

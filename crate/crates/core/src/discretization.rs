//! Weight grids `0 = v_0 < v_1 < ... < v_K` and the map from real weights to
//! the largest grid value not exceeding them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest index of the single-precision grid, the bit pattern of `f32::MAX`.
pub const F32_MAX_INDEX: u64 = 0x7F7F_FFFF;

/// Construction parameters of a grid. Two grids are equal iff their
/// descriptors are equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridDescriptor {
    Binary,
    F32,
    Geometric { v1: f64, epsilon: f64, k: u64 },
    Explicit { values: Vec<f64> },
}

impl fmt::Display for GridDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridDescriptor::Binary => f.write_str("binary"),
            GridDescriptor::F32 => f.write_str("f32"),
            GridDescriptor::Geometric { v1, epsilon, k } => write!(f, "geometric:{v1},{epsilon},{k}"),
            GridDescriptor::Explicit { values } => {
                f.write_str("explicit:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `binary`, `f32`, `geometric:v1,eps,K` or `explicit:v0,v1,...`.
impl FromStr for GridDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = match s.split_once(':') {
            Some((kind, args)) => (kind, Some(args)),
            None => (s, None),
        };
        let numbers = |args: &str| -> Result<Vec<f64>> {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidGrid(format!("bad number {a:?}")))
                })
                .collect()
        };
        match (kind, args) {
            ("binary", None) => Ok(GridDescriptor::Binary),
            ("f32", None) => Ok(GridDescriptor::F32),
            ("geometric", Some(args)) => {
                let parts: Vec<&str> = args.split(',').collect();
                let [v1, epsilon, k] = parts.as_slice() else {
                    return Err(Error::InvalidGrid("geometric grid needs v1,epsilon,K".into()));
                };
                let v1 = numbers(v1)?[0];
                let epsilon = numbers(epsilon)?[0];
                let k = k
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidGrid(format!("bad grid size {k:?}")))?;
                Ok(GridDescriptor::Geometric { v1, epsilon, k })
            }
            ("explicit", Some(args)) => Ok(GridDescriptor::Explicit { values: numbers(args)? }),
            _ => Err(Error::InvalidGrid(format!("unknown grid {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Table(Vec<f64>),
    F32,
    Geometric { v1: f64, growth: f64, log_growth: f64, k: u64 },
}

/// An immutable, validated weight grid.
#[derive(Clone, Debug)]
pub struct WeightDiscretization {
    descriptor: GridDescriptor,
    repr: Repr,
}

impl PartialEq for WeightDiscretization {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
    }
}

impl WeightDiscretization {
    /// The grid `{0, 1}` for unweighted sets.
    pub fn binary() -> Self {
        WeightDiscretization { descriptor: GridDescriptor::Binary, repr: Repr::Table(vec![0.0, 1.0]) }
    }

    /// Grid over explicitly given values.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        validate_table(&values)?;
        Ok(WeightDiscretization {
            descriptor: GridDescriptor::Explicit { values: values.clone() },
            repr: Repr::Table(values),
        })
    }

    /// All nonnegative finite `f32` values. The index of a value is its bit
    /// pattern, which is monotone for nonnegative floats.
    pub fn single_precision() -> Self {
        WeightDiscretization { descriptor: GridDescriptor::F32, repr: Repr::F32 }
    }

    /// `v_k = v1 * (1 + epsilon)^(k - 1)` for `1 <= k <= K`.
    pub fn geometric(v1: f64, epsilon: f64, k: u64) -> Result<Self> {
        if !(v1 > 0.0 && v1.is_finite()) {
            return Err(Error::InvalidGrid(format!("v1 must be positive and finite, got {v1}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidGrid(format!("epsilon must be positive and finite, got {epsilon}")));
        }
        if k == 0 {
            return Err(Error::InvalidGrid("K must be at least 1".into()));
        }
        let growth = 1.0 + epsilon;
        if growth <= 1.0 {
            return Err(Error::InvalidGrid(format!("epsilon {epsilon} vanishes in 1 + epsilon")));
        }
        let grid = WeightDiscretization {
            descriptor: GridDescriptor::Geometric { v1, epsilon, k },
            repr: Repr::Geometric { v1, growth, log_growth: epsilon.ln_1p(), k },
        };
        let top = grid.value_at(k);
        if !top.is_finite() {
            return Err(Error::InvalidGrid(format!("v_K overflows for K = {k}")));
        }
        if k >= 2 && grid.value_at(k) <= grid.value_at(k - 1) {
            return Err(Error::InvalidGrid("grid values are not strictly increasing".into()));
        }
        Ok(grid)
    }

    pub fn from_descriptor(descriptor: &GridDescriptor) -> Result<Self> {
        match descriptor {
            GridDescriptor::Binary => Ok(Self::binary()),
            GridDescriptor::F32 => Ok(Self::single_precision()),
            GridDescriptor::Geometric { v1, epsilon, k } => Self::geometric(*v1, *epsilon, *k),
            GridDescriptor::Explicit { values } => Self::explicit(values.clone()),
        }
    }

    pub fn descriptor(&self) -> &GridDescriptor {
        &self.descriptor
    }

    /// `K`, the largest grid index.
    pub fn max_index(&self) -> u64 {
        match &self.repr {
            Repr::Table(values) => values.len() as u64 - 1,
            Repr::F32 => F32_MAX_INDEX,
            Repr::Geometric { k, .. } => *k,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.value_at(self.max_index())
    }

    /// Relative precision `epsilon` with `v <= w <= v (1 + epsilon)`, when
    /// the grid guarantees one. For `f32` it holds for normal weights only.
    pub fn epsilon(&self) -> Option<f64> {
        match &self.descriptor {
            GridDescriptor::F32 => Some(f32::EPSILON as f64),
            GridDescriptor::Geometric { epsilon, .. } => Some(*epsilon),
            _ => None,
        }
    }

    /// `v_k`. `k` must not exceed [`max_index`](Self::max_index).
    #[inline]
    pub fn value_at(&self, k: u64) -> f64 {
        debug_assert!(k <= self.max_index());
        match &self.repr {
            Repr::Table(values) => values[k as usize],
            Repr::F32 => f32::from_bits(k as u32) as f64,
            Repr::Geometric { v1, growth, log_growth, .. } => {
                if k == 0 {
                    0.0
                } else if k - 1 <= i32::MAX as u64 {
                    v1 * growth.powi((k - 1) as i32)
                } else {
                    v1 * ((k - 1) as f64 * log_growth).exp()
                }
            }
        }
    }

    /// `max { k : v_k <= w }`.
    pub fn index_of(&self, w: f64) -> Result<u64> {
        if !(w >= 0.0 && w <= self.max_value()) {
            return Err(Error::WeightOutOfRange { weight: w, max: self.max_value() });
        }
        let k = match &self.repr {
            Repr::Table(values) => values.partition_point(|&v| v <= w) as u64 - 1,
            Repr::F32 => {
                let rounded = w as f32;
                let bits = rounded.to_bits() as u64;
                if rounded as f64 > w {
                    bits - 1
                } else {
                    bits
                }
            }
            Repr::Geometric { v1, log_growth, k, .. } => {
                if w < *v1 {
                    0
                } else {
                    let estimate = ((w / v1).ln() / log_growth).floor();
                    let mut index = if estimate.is_finite() { (estimate as u64).saturating_add(1) } else { 1 };
                    index = index.clamp(1, *k);
                    while index > 1 && self.value_at(index) > w {
                        index -= 1;
                    }
                    while index < *k && self.value_at(index + 1) <= w {
                        index += 1;
                    }
                    index
                }
            }
        };
        debug_assert!(self.value_at(k) <= w);
        Ok(k)
    }

    /// `v_{index_of(w)}`, the largest grid value not exceeding `w`.
    pub fn discretized_weight(&self, w: f64) -> Result<f64> {
        Ok(self.value_at(self.index_of(w)?))
    }
}

fn validate_table(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InvalidGrid("grid needs at least two values".into()));
    }
    if values[0] != 0.0 {
        return Err(Error::InvalidGrid(format!("first grid value must be 0, got {}", values[0])));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite grid value {bad}")));
    }
    if let Some(pos) = values.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!(
            "grid values must be strictly increasing, violated at index {}",
            pos + 1
        )));
    }
    Ok(())
}

//! Signature algorithms and signature types.
//!
//! All weighted algorithms except ICWS produce real-valued signatures whose
//! component `j` is the smallest point assigned to `j` among the relevant
//! elementary Poisson processes of the bag. The processes use the rate
//! convention `c = 1/m`, so elementary process `(d, k)` has rate
//! `v_k - v_{k-1}` split evenly across the `m` components.

mod bagminhash;
mod bbit;
pub mod codec;
mod enhanced;
mod icws;
mod naive;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bag::WeightedBag;
use crate::discretization::{GridDescriptor, WeightDiscretization};
use crate::error::{Error, Result};
use crate::rng::RngConfig;

pub use bagminhash::{bagminhash1, bagminhash1_observed, bagminhash2, bagminhash2_observed};
pub use bbit::{bbit_transform, bbit_transform_icws};
pub use enhanced::{enhanced_signature, enhanced_signature_observed};
pub use icws::icws_signature;
pub use naive::naive_signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Enhanced,
    Bmh1,
    Bmh2,
    Icws,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Naive, Algorithm::Enhanced, Algorithm::Bmh1, Algorithm::Bmh2, Algorithm::Icws];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Enhanced => "enhanced",
            Algorithm::Bmh1 => "bmh1",
            Algorithm::Bmh2 => "bmh2",
            Algorithm::Icws => "icws",
        }
    }

    /// Algorithms of the same family produce bit-identical signatures and can
    /// be compared with each other.
    pub fn family(self) -> &'static str {
        match self {
            Algorithm::Bmh1 | Algorithm::Bmh2 => "bagminhash",
            other => other.name(),
        }
    }

    pub fn uses_grid(self) -> bool {
        self != Algorithm::Icws
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidRange(format!("unknown algorithm {s:?}")))
    }
}

/// Parameters that must agree for two signatures to be comparable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureHeader {
    pub algorithm: Algorithm,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    pub grid: Option<GridDescriptor>,
    pub config_tag: String,
}

impl SignatureHeader {
    pub(crate) fn new(algorithm: Algorithm, m: usize, grid: Option<&WeightDiscretization>, config: RngConfig) -> Self {
        SignatureHeader {
            algorithm,
            m,
            b: None,
            grid: grid.map(|g| g.descriptor().clone()),
            config_tag: config.tag(),
        }
    }

    pub fn check_compatible(&self, other: &SignatureHeader) -> Result<()> {
        let mismatch = |what: String| Err(Error::IncompatibleSignatures(what));
        if self.algorithm.family() != other.algorithm.family() {
            return mismatch(format!("algorithms {} and {}", self.algorithm, other.algorithm));
        }
        if self.m != other.m {
            return mismatch(format!("sizes {} and {}", self.m, other.m));
        }
        if self.b != other.b {
            return mismatch(format!("bit widths {:?} and {:?}", self.b, other.b));
        }
        if self.grid != other.grid {
            return mismatch("grids differ".into());
        }
        if self.config_tag != other.config_tag {
            return mismatch(format!("configurations {} and {}", self.config_tag, other.config_tag));
        }
        Ok(())
    }
}

/// Signature with positive real (or `+inf`) components.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSignature {
    pub header: SignatureHeader,
    pub components: Vec<f64>,
}

impl RealSignature {
    /// True if no component has been set, which is the case for empty bags.
    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|c| *c == f64::INFINITY)
    }
}

/// The consistent sample chosen by ICWS for one component: the element and
/// its discretized log-weight level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IcwsSample {
    pub element: u64,
    pub level: i64,
}

/// ICWS signature. Components are `None` only for empty bags.
#[derive(Clone, Debug, PartialEq)]
pub struct IcwsSignature {
    pub header: SignatureHeader,
    pub components: Vec<Option<IcwsSample>>,
}

/// Signature reduced to `b` bits per component.
#[derive(Clone, Debug, PartialEq)]
pub struct BbitSignature {
    pub header: SignatureHeader,
    pub b: u32,
    pub components: Vec<u64>,
}

/// Any signature kind, as stored in files.
#[derive(Clone, Debug, PartialEq)]
pub enum Signature {
    Real(RealSignature),
    Icws(IcwsSignature),
    Bbit(BbitSignature),
}

impl Signature {
    pub fn header(&self) -> &SignatureHeader {
        match self {
            Signature::Real(s) => &s.header,
            Signature::Icws(s) => &s.header,
            Signature::Bbit(s) => &s.header,
        }
    }

    pub fn m(&self) -> usize {
        self.header().m
    }
}

impl From<RealSignature> for Signature {
    fn from(s: RealSignature) -> Self {
        Signature::Real(s)
    }
}

impl From<IcwsSignature> for Signature {
    fn from(s: IcwsSignature) -> Self {
        Signature::Icws(s)
    }
}

impl From<BbitSignature> for Signature {
    fn from(s: BbitSignature) -> Self {
        Signature::Bbit(s)
    }
}

/// Hooks into the signature computations, used for statistics and audits.
/// All methods default to no-ops.
pub trait Observer {
    /// Number of live process records after a heap or buffer operation.
    fn live_processes(&mut self, _count: usize) {}
    /// A point was generated by `next_point`.
    fn point_generated(&mut self) {}
    /// A split was performed.
    fn split(&mut self) {}
    /// A relevant point was offered to the signature. The same point may be
    /// offered more than once while its process is being split.
    fn relevant_point(&mut self, _point: f64, _component: usize) {}
}

/// Observer that ignores everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoopObserver;

impl Observer for NoopObserver {}

/// Counters collected during one signature computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub peak_processes: usize,
    pub points: u64,
    pub splits: u64,
}

impl Observer for Stats {
    fn live_processes(&mut self, count: usize) {
        self.peak_processes = self.peak_processes.max(count);
    }

    fn point_generated(&mut self) {
        self.points += 1;
    }

    fn split(&mut self) {
        self.splits += 1;
    }
}

/// Dispatches to the algorithm named by `algorithm`. ICWS ignores the grid.
pub fn sign(
    algorithm: Algorithm,
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
) -> Result<Signature> {
    sign_observed(algorithm, bag, grid, m, config, &mut NoopObserver)
}

pub fn sign_observed(
    algorithm: Algorithm,
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
    observer: &mut impl Observer,
) -> Result<Signature> {
    Ok(match algorithm {
        Algorithm::Naive => naive_signature(bag, grid, m, config)?.into(),
        Algorithm::Enhanced => enhanced_signature_observed(bag, grid, m, config, observer)?.into(),
        Algorithm::Bmh1 => bagminhash1_observed(bag, grid, m, config, observer)?.into(),
        Algorithm::Bmh2 => bagminhash2_observed(bag, grid, m, config, observer)?.into(),
        Algorithm::Icws => icws_signature(bag, m, config)?.into(),
    })
}

pub(crate) fn check_size(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidSize(m));
    }
    Ok(())
}

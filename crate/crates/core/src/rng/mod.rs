//! Counter-based pseudorandom generators.
//!
//! Every random stream in the crate is derived from a short seed byte string.
//! Block `i` of a stream is `xxh64(seed, i)`: the seed bytes are hashed with
//! the block counter passed as the xxHash64 seed. Streams are therefore a pure
//! function of the seed, independent of platform and call history of other
//! generators.
//!
//! Seeds are built with [`SeedBuilder`] from a one-byte namespace tag followed
//! by fixed-width little-endian fields, see [`namespace`].

mod ziggurat;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh64::xxh64;

use crate::error::{Error, Result};

pub(crate) use ziggurat::open_unit;

/// Name of the hash function backing all generators.
pub const HASH_NAME: &str = "xxh64";

pub const MAX_SEED_LEN: usize = 32;

/// One-byte domain tags prepended to every seed so that different seeding
/// tuples of equal width never collide.
pub mod namespace {
    /// `(d)`: root process of element `d`.
    pub const ELEMENT: u8 = 0x01;
    /// `(d, k)`: elementary process of element `d` at weight level `k`.
    pub const ELEMENT_LEVEL: u8 = 0x02;
    /// `(x, q)`: sibling created by splitting at point `x` and index `q`.
    pub const SPLIT: u8 = 0x03;
    /// `(h)`: b-bit reduction of a real signature component.
    pub const BBIT: u8 = 0x04;
    /// `(d, t)`: b-bit reduction of an ICWS sample.
    pub const BBIT_ICWS: u8 = 0x05;
    /// `(d, j)`: ICWS draws of element `d` for component `j`.
    pub const ICWS: u8 = 0x06;
    /// `(master seed, replication)`: harness replications.
    pub const REPLICATION: u8 = 0x07;
    /// `(master seed, repetition)`: benchmark bag generation.
    pub const BENCHMARK: u8 = 0x08;
}

/// Seed bytes stored inline.
#[derive(Clone, Copy, PartialEq, Eq)]
struct SeedBytes {
    len: u8,
    bytes: [u8; MAX_SEED_LEN],
}

impl SeedBytes {
    #[inline]
    fn as_slice(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }
}

/// Builds canonical seed byte strings. Panics if the seed grows beyond
/// [`MAX_SEED_LEN`] bytes; a tag plus three fields always fits.
#[derive(Clone, Copy, Debug)]
pub struct SeedBuilder {
    seed: SeedBytes,
}

impl fmt::Debug for SeedBytes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self.as_slice(), f)
    }
}

impl SeedBuilder {
    #[inline]
    pub fn new(tag: u8) -> Self {
        let mut bytes = [0; MAX_SEED_LEN];
        bytes[0] = tag;
        SeedBuilder { seed: SeedBytes { len: 1, bytes } }
    }

    #[inline]
    pub fn u64(mut self, value: u64) -> Self {
        let start = self.seed.len as usize;
        assert!(start + 8 <= MAX_SEED_LEN, "seed exceeds {MAX_SEED_LEN} bytes");
        self.seed.bytes[start..start + 8].copy_from_slice(&value.to_le_bytes());
        self.seed.len += 8;
        self
    }

    #[inline]
    pub fn i64(self, value: i64) -> Self {
        self.u64(value as u64)
    }

    /// Appends the IEEE-754 bit pattern of `value`.
    #[inline]
    pub fn f64(self, value: f64) -> Self {
        self.u64(value.to_bits())
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.seed.as_slice()
    }

    #[inline]
    pub fn build(self, sampler: ExpSampler) -> SeededGenerator {
        SeededGenerator::from_seed(self.seed, sampler)
    }
}

/// Method used to draw exponential variates. The two samplers are
/// distributionally identical but produce different streams.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpSampler {
    #[default]
    Ziggurat,
    InverseCdf,
}

impl ExpSampler {
    pub fn name(self) -> &'static str {
        match self {
            ExpSampler::Ziggurat => "ziggurat",
            ExpSampler::InverseCdf => "inverse-cdf",
        }
    }
}

impl fmt::Display for ExpSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExpSampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ziggurat" => Ok(ExpSampler::Ziggurat),
            "inverse-cdf" => Ok(ExpSampler::InverseCdf),
            other => Err(Error::InvalidRange(format!("unknown exponential sampler {other:?}"))),
        }
    }
}

/// Randomness configuration shared by all generators of one computation.
/// Signatures are comparable only when their configurations are equal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RngConfig {
    pub exp_sampler: ExpSampler,
}

impl RngConfig {
    pub fn new(exp_sampler: ExpSampler) -> Self {
        RngConfig { exp_sampler }
    }

    /// Identity string recorded in signature headers, e.g. `xxh64/ziggurat`.
    pub fn tag(&self) -> String {
        format!("{HASH_NAME}/{}", self.exp_sampler)
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        let sampler = tag
            .strip_prefix(HASH_NAME)
            .and_then(|rest| rest.strip_prefix('/'))
            .ok_or_else(|| Error::InvalidRange(format!("unknown configuration tag {tag:?}")))?;
        Ok(RngConfig::new(sampler.parse()?))
    }

    pub fn generator(&self, seed: SeedBuilder) -> SeededGenerator {
        seed.build(self.exp_sampler)
    }
}

/// Deterministic random source. Single owner; never shared between threads
/// while in use.
#[derive(Clone)]
pub struct SeededGenerator {
    seed: SeedBytes,
    counter: u64,
    bits: u64,
    bits_left: u32,
    sampler: ExpSampler,
}

impl fmt::Debug for SeededGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeededGenerator")
            .field("seed", &self.seed)
            .field("counter", &self.counter)
            .field("bits_left", &self.bits_left)
            .field("sampler", &self.sampler)
            .finish()
    }
}

impl SeededGenerator {
    /// Creates a generator at counter 0 using the ziggurat exponential sampler.
    pub fn new(seed: &[u8]) -> Result<Self> {
        Self::with_sampler(seed, ExpSampler::default())
    }

    pub fn with_sampler(seed: &[u8], sampler: ExpSampler) -> Result<Self> {
        if seed.is_empty() {
            return Err(Error::InvalidSeed("seed must not be empty".into()));
        }
        if seed.len() > MAX_SEED_LEN {
            return Err(Error::InvalidSeed(format!(
                "seed has {} bytes, at most {MAX_SEED_LEN} allowed",
                seed.len()
            )));
        }
        let mut bytes = [0; MAX_SEED_LEN];
        bytes[..seed.len()].copy_from_slice(seed);
        Ok(Self::from_seed(SeedBytes { len: seed.len() as u8, bytes }, sampler))
    }

    #[inline]
    fn from_seed(seed: SeedBytes, sampler: ExpSampler) -> Self {
        SeededGenerator { seed, counter: 0, bits: 0, bits_left: 0, sampler }
    }

    pub fn seed(&self) -> &[u8] {
        self.seed.as_slice()
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn exp_sampler(&self) -> ExpSampler {
        self.sampler
    }

    /// Returns the next 64-bit block `xxh64(seed, counter)`.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let block = xxh64(self.seed.as_slice(), self.counter);
        self.counter += 1;
        block
    }

    #[inline]
    fn next_bit(&mut self) -> bool {
        if self.bits_left == 0 {
            self.bits = self.next_u64();
            self.bits_left = 64;
        }
        let bit = self.bits & 1 == 1;
        self.bits >>= 1;
        self.bits_left -= 1;
        bit
    }

    /// Takes `count` bits (1..=64) from the bit buffer, refilling as needed.
    /// Buffered bits form the low part of the result.
    #[inline]
    pub(crate) fn take_bits(&mut self, count: u32) -> u64 {
        debug_assert!((1..=64).contains(&count));
        if count <= self.bits_left {
            let value = if count == 64 { self.bits } else { self.bits & ((1u64 << count) - 1) };
            self.bits = self.bits.checked_shr(count).unwrap_or(0);
            self.bits_left -= count;
            return value;
        }
        let low_count = self.bits_left;
        let low = self.bits;
        let high_count = count - low_count;
        let fresh = self.next_u64();
        let high = if high_count == 64 { fresh } else { fresh & ((1u64 << high_count) - 1) };
        self.bits = fresh.checked_shr(high_count).unwrap_or(0);
        self.bits_left = 64 - high_count;
        low | high.checked_shl(low_count).unwrap_or(0)
    }

    /// Uniform on the open interval (0, 1), 52 bits of precision.
    #[inline]
    pub(crate) fn open_unit(&mut self) -> f64 {
        open_unit(self.next_u64())
    }

    #[inline]
    pub(crate) fn unit_exponential(&mut self) -> f64 {
        match self.sampler {
            ExpSampler::Ziggurat => ziggurat::sample_unit_exponential(|k| self.take_bits(k)),
            ExpSampler::InverseCdf => -open_unit(self.take_bits(52) << 12).ln(),
        }
    }

    /// Draws from Exponential(`rate`). The result is strictly positive.
    pub fn sample_exponential(&mut self, rate: f64) -> Result<f64> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidRate(rate));
        }
        Ok(self.unit_exponential() / rate)
    }

    /// Bernoulli trial with success probability `numerator / denominator`.
    pub fn sample_bernoulli(&mut self, numerator: f64, denominator: f64) -> Result<bool> {
        let valid = denominator > 0.0
            && denominator.is_finite()
            && numerator >= 0.0
            && numerator <= denominator;
        if !valid {
            return Err(Error::InvalidProbability { numerator, denominator });
        }
        Ok(self.bernoulli(numerator / denominator))
    }

    /// Compares a lazily generated uniform against the binary expansion of `p`
    /// bit by bit; two random bits are consumed on average.
    #[inline]
    pub(crate) fn bernoulli(&mut self, mut p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        loop {
            p *= 2.0;
            let p_bit = p >= 1.0;
            if p_bit {
                p -= 1.0;
            }
            if self.next_bit() != p_bit {
                // First differing bit decides whether U < p.
                return p_bit;
            }
            if p == 0.0 {
                return false;
            }
        }
    }

    /// Uniform on `{1, ..., m}`.
    pub fn sample_uniform_index(&mut self, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::InvalidRange("uniform index range must be non-empty".into()));
        }
        Ok(self.uniform_below(m) + 1)
    }

    /// Uniform on `{0, ..., n - 1}` using the fast dice roller, which is
    /// exactly uniform and close to optimal in consumed bits.
    #[inline]
    pub(crate) fn uniform_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        if n == 1 {
            return 0;
        }
        if n.is_power_of_two() {
            return self.take_bits(n.trailing_zeros());
        }
        self.fast_dice_roller(n)
    }

    fn fast_dice_roller(&mut self, n: u64) -> u64 {
        if n > 1 << 63 {
            loop {
                let candidate = self.take_bits(64);
                if candidate < n {
                    return candidate;
                }
            }
        }
        let mut v: u64 = 1;
        let mut c: u64 = 0;
        loop {
            v <<= 1;
            c = (c << 1) | u64::from(self.next_bit());
            if v >= n {
                if c < n {
                    return c;
                }
                v -= n;
                c -= n;
            }
        }
    }

    /// Exactly `b` uniform random bits.
    pub fn sample_uniform_bits(&mut self, b: u32) -> Result<u64> {
        if !(1..=64).contains(&b) {
            return Err(Error::InvalidRange(format!("bit count {b} not in [1, 64]")));
        }
        Ok(self.take_bits(b))
    }

    /// Fisher-Yates shuffle driven by this generator.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.uniform_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

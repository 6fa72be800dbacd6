//! The splittable Poisson process record.
//!
//! A record represents the union of the elementary processes of one element
//! over the weight-index range `(lower, upper]`. Its rate is
//! `v_upper - v_lower`. Points are generated in ascending order; every point
//! is assigned uniformly to one of the `m` signature components. Splitting
//! halves the index range, keeps the current point with the half that owns
//! it and returns the other half as a fresh record without a point.

use crate::discretization::WeightDiscretization;
use crate::error::{Error, Result};
use crate::rng::{namespace, SeedBuilder, SeededGenerator};

#[derive(Clone, Debug)]
pub struct PoissonProcess {
    point: f64,
    rng: SeededGenerator,
    lower: u64,
    upper: u64,
    weight: f64,
    /// `index_of(weight)`; relevance tests compare indices instead of values.
    weight_index: u64,
    /// `v_upper - v_lower`, kept in sync with the range.
    rate: f64,
    component: Option<usize>,
}

impl PoissonProcess {
    /// Creates a record over `(lower, upper]` starting at `point`. No point is
    /// owned until [`next_point`](Self::next_point) is called.
    pub fn new(
        point: f64,
        rng: SeededGenerator,
        lower: u64,
        upper: u64,
        weight: f64,
        grid: &WeightDiscretization,
    ) -> Result<Self> {
        if lower >= upper || upper > grid.max_index() {
            return Err(Error::InvalidRange(format!(
                "process range ({lower}, {upper}] invalid for K = {}",
                grid.max_index()
            )));
        }
        if !(point >= 0.0 && point.is_finite()) {
            return Err(Error::InvalidRange(format!("start point {point} must be finite and nonnegative")));
        }
        let weight_index = grid.index_of(weight)?;
        Ok(Self::with_weight_index(point, rng, lower, upper, weight, weight_index, grid))
    }

    #[inline]
    pub(crate) fn with_weight_index(
        point: f64,
        rng: SeededGenerator,
        lower: u64,
        upper: u64,
        weight: f64,
        weight_index: u64,
        grid: &WeightDiscretization,
    ) -> Self {
        let rate = grid.value_at(upper) - grid.value_at(lower);
        PoissonProcess { point, rng, lower, upper, weight, weight_index, rate, component: None }
    }

    #[inline]
    pub fn point(&self) -> f64 {
        self.point
    }

    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn upper(&self) -> u64 {
        self.upper
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// 0-based component the current point is assigned to.
    #[inline]
    pub fn component(&self) -> Option<usize> {
        self.component
    }

    #[inline]
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Advances to the next point and assigns it to a uniformly chosen
    /// component. The component is drawn even if the point turns out to be
    /// irrelevant.
    #[inline]
    pub fn next_point(&mut self, m: usize) {
        debug_assert!(self.rate > 0.0);
        let gap = self.rng.unit_exponential() / self.rate;
        self.point += gap;
        self.component = Some(self.rng.uniform_below(m as u64) as usize);
    }

    #[inline]
    pub fn splittable(&self) -> bool {
        self.lower + 1 < self.upper
    }

    /// Some elementary process in the range is relevant: `v_{lower+1} <= w`.
    #[inline]
    pub fn partially_relevant(&self) -> bool {
        self.lower < self.weight_index
    }

    /// Every elementary process in the range is relevant: `v_upper <= w`.
    #[inline]
    pub fn fully_relevant(&self) -> bool {
        self.upper <= self.weight_index
    }

    /// Splits at `q = floor((lower + upper) / 2)`. A Bernoulli trial on this
    /// record's generator decides which half owns the current point; this
    /// record is narrowed to that half and the other half is returned with a
    /// fresh generator seeded by `(point, q)`.
    pub fn split(&mut self, grid: &WeightDiscretization) -> Result<PoissonProcess> {
        if !self.splittable() {
            return Err(Error::InvalidSplit { lower: self.lower, upper: self.upper });
        }
        Ok(self.split_unchecked(grid))
    }

    #[inline]
    pub(crate) fn split_unchecked(&mut self, grid: &WeightDiscretization) -> PoissonProcess {
        let (lower, upper, mid, rate) = self.narrow(grid);
        self.sibling(lower, upper, mid, rate)
    }

    /// Like [`split`](Self::split), but only materializes the other half if
    /// it is partially relevant. Its generator is a function of the split
    /// alone, so skipping irrelevant halves does not change any stream.
    #[inline]
    pub(crate) fn split_relevant(&mut self, grid: &WeightDiscretization) -> Option<PoissonProcess> {
        let (lower, upper, mid, rate) = self.narrow(grid);
        (lower < self.weight_index).then(|| self.sibling(lower, upper, mid, rate))
    }

    /// Narrows this record to the half owning its point and returns the
    /// range and rate of the other half together with the split index.
    #[inline]
    fn narrow(&mut self, grid: &WeightDiscretization) -> (u64, u64, u64, f64) {
        debug_assert!(self.splittable());
        let lower = self.lower;
        let upper = self.upper;
        let mid = lower + (upper - lower) / 2;
        let v_lower = grid.value_at(lower);
        let v_mid = grid.value_at(mid);
        let v_upper = grid.value_at(upper);
        let rate_lower = v_mid - v_lower;
        let rate_upper = v_upper - v_mid;
        if self.rng.bernoulli(rate_lower / (v_upper - v_lower)) {
            self.upper = mid;
            self.rate = rate_lower;
            (mid, upper, mid, rate_upper)
        } else {
            self.lower = mid;
            self.rate = rate_upper;
            (lower, mid, mid, rate_lower)
        }
    }

    #[inline]
    fn sibling(&self, lower: u64, upper: u64, mid: u64, rate: f64) -> PoissonProcess {
        let rng = SeedBuilder::new(namespace::SPLIT)
            .f64(self.point)
            .u64(mid)
            .build(self.rng.exp_sampler());
        PoissonProcess {
            point: self.point,
            rng,
            lower,
            upper,
            weight: self.weight,
            weight_index: self.weight_index,
            rate,
            component: None,
        }
    }
}

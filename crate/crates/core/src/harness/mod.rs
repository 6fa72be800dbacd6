//! Statistical verification of the signature algorithms and benchmarks.
//!
//! A verification run hashes `N` random instantiations of a test case, and
//! compares the empirical mean squared error of the estimates with its exact
//! expectation. Because the match count is `Binomial(m, J)`, the MSE of `N`
//! independent estimates has known mean and variance, which turns the
//! comparison into a z-score.

mod cases;

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::bag::WeightedBag;
use crate::discretization::WeightDiscretization;
use crate::error::{Error, Result};
use crate::estimation::{estimate, estimator_variance};
use crate::rng::{namespace, RngConfig, SeedBuilder};
use crate::signatures::{sign, sign_observed, Algorithm, Stats};

pub use cases::{canonical_case, canonical_cases, instantiate_test_case, TestCase};

/// `(1/N) sum (estimate - J)^2`.
pub fn empirical_mse(estimates: &[f64], j: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("estimates"));
    }
    Ok(estimates.iter().map(|e| (e - j) * (e - j)).sum::<f64>() / estimates.len() as f64)
}

/// Mean and variance of the empirical MSE of `n` estimates with `m`
/// components each:
/// `E = J (1 - J) / m` and
/// `Var = J^2 (1 - J)^2 (2 - 6/m) / (m^2 N) + J (1 - J) / (m^3 N)`.
pub fn mse_moments(j: f64, m: usize, n: usize) -> Result<(f64, f64)> {
    let expected = estimator_variance(j, m)?;
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let (m, n) = (m as f64, n as f64);
    let q = j * (1.0 - j);
    let variance = q * q * (2.0 - 6.0 / m) / (m * m * n) + q / (m * m * m * n);
    Ok((expected, variance))
}

/// Outcome of one verification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZScoreReport {
    pub test_case: String,
    pub algorithm: Algorithm,
    pub m: usize,
    pub n_examples: usize,
    pub seed: u64,
    /// Ground truth the estimates are compared with.
    pub jaccard: f64,
    pub empirical_mse: f64,
    pub expected_mse: f64,
    pub variance_mse: f64,
    pub z: f64,
}

fn z_score(empirical: f64, expected: f64, variance: f64) -> f64 {
    if variance > 0.0 {
        (empirical - expected) / variance.sqrt()
    } else if empirical == expected {
        0.0
    } else if empirical > expected {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

/// Runs `n_examples` replications of `tc`. Replication `s` draws its element
/// ids from a generator seeded with `(seed, s)`. The ground truth is the
/// discretized Jaccard similarity on `grid`, except for ICWS which estimates
/// the continuous one.
pub fn run_verification(
    algorithm: Algorithm,
    tc: &TestCase,
    grid: &WeightDiscretization,
    m: usize,
    n_examples: usize,
    seed: u64,
    config: RngConfig,
) -> Result<ZScoreReport> {
    let jaccard = if algorithm.uses_grid() { tc.expected_discretized_jaccard(grid)? } else { tc.expected_jaccard() };
    let (expected_mse, variance_mse) = mse_moments(jaccard, m, n_examples)?;
    let mut estimates = Vec::with_capacity(n_examples);
    for s in 0..n_examples {
        let mut rng = config.generator(SeedBuilder::new(namespace::REPLICATION).u64(seed).u64(s as u64));
        let (a, b) = instantiate_test_case(tc, &mut rng);
        let sig_a = sign(algorithm, &a, grid, m, config)?;
        let sig_b = sign(algorithm, &b, grid, m, config)?;
        estimates.push(estimate(&sig_a, &sig_b)?.value);
    }
    let empirical = empirical_mse(&estimates, jaccard)?;
    Ok(ZScoreReport {
        test_case: tc.name.clone(),
        algorithm,
        m,
        n_examples,
        seed,
        jaccard,
        empirical_mse: empirical,
        expected_mse,
        variance_mse,
        z: z_score(empirical, expected_mse, variance_mse),
    })
}

/// Timing and space statistics for one `(algorithm, m, n)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    /// Median over groups of repetitions of the mean wall time per signature.
    pub mean_ns: f64,
    /// Mean over repetitions of the peak number of live Poisson process
    /// records. `None` for algorithms that do not use them.
    pub peak_objects: Option<f64>,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str = "algo,m,n,mean_ns,peak_objects";

    pub fn csv_row(&self) -> String {
        let peak = self.peak_objects.map(|p| format!("{p:.1}")).unwrap_or_default();
        format!("{},{},{},{:.0},{}", self.algorithm, self.m, self.n, self.mean_ns, peak)
    }
}

/// Random bag of `n` distinct 64-bit ids with `Exp(1)` weights.
pub fn random_bag(n: usize, seed: u64, repetition: u64, config: RngConfig) -> WeightedBag {
    let mut rng = config.generator(SeedBuilder::new(namespace::BENCHMARK).u64(seed).u64(n as u64).u64(repetition));
    let mut seen = HashSet::with_capacity(n);
    let mut entries = Vec::with_capacity(n);
    while entries.len() < n {
        let id = rng.next_u64();
        if seen.insert(id) {
            entries.push((id, rng.unit_exponential()));
        }
    }
    WeightedBag::new(entries).expect("distinct ids and positive weights")
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Times `repetitions` signature computations on fresh random bags. Only
/// the signature call is timed. With `descending_weights` the entries are
/// presented in order of decreasing weight, which lowers the signature
/// maximum sooner without changing any signature.
#[allow(clippy::too_many_arguments)]
pub fn run_benchmark(
    algorithm: Algorithm,
    grid: &WeightDiscretization,
    m: usize,
    n: usize,
    repetitions: usize,
    seed: u64,
    config: RngConfig,
    descending_weights: bool,
) -> Result<BenchReport> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    if repetitions == 0 {
        return Err(Error::EmptyInput("repetitions"));
    }
    let mut times = Vec::with_capacity(repetitions);
    let mut peak_sum = 0.0;
    for rep in 0..repetitions {
        let mut bag = random_bag(n, seed, rep as u64, config);
        if descending_weights {
            let mut entries = bag.entries().to_vec();
            entries.sort_by(|a, b| b.1.total_cmp(&a.1));
            bag = WeightedBag::new(entries)?;
        }
        let mut stats = Stats::default();
        let start = Instant::now();
        let sig = sign_observed(algorithm, &bag, grid, m, config, &mut stats)?;
        times.push(start.elapsed().as_nanos() as f64);
        std::hint::black_box(sig);
        peak_sum += stats.peak_processes as f64;
    }
    let groups = repetitions.min(5);
    let mut means: Vec<f64> = (0..groups)
        .map(|g| {
            let chunk = &times[g * repetitions / groups..(g + 1) * repetitions / groups];
            chunk.iter().sum::<f64>() / chunk.len() as f64
        })
        .collect();
    let tracks_processes = matches!(algorithm, Algorithm::Enhanced | Algorithm::Bmh1 | Algorithm::Bmh2);
    Ok(BenchReport {
        algorithm,
        m,
        n,
        mean_ns: median(&mut means),
        peak_objects: tracks_processes.then(|| peak_sum / repetitions as f64),
    })
}

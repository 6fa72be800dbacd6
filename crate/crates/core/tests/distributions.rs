//! Distribution checks for the exponential samplers and for Poisson process
//! splitting, using two-sample Kolmogorov-Smirnov tests against direct
//! simulation.

use bagminhash::{ExpSampler, PoissonProcess, SeededGenerator, WeightDiscretization};
use proptest::prelude::*;

/// `c(alpha)` for `alpha = 1e-3`: `sqrt(-ln(alpha / 2) / 2)`.
fn ks_coefficient() -> f64 {
    (-(1e-3f64 / 2.0).ln() / 2.0).sqrt()
}

fn ks_statistic(mut x: Vec<f64>, mut y: Vec<f64>) -> f64 {
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn ks_critical(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient() * ((n + m) / (n * m)).sqrt()
}

/// SplitMix64, independent of the library's generator.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn exponential(&mut self, rate: f64) -> f64 {
        let u = ((self.next() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        -u.ln() / rate
    }
}

#[test]
fn ks_coefficient_value() {
    assert!((ks_coefficient() - 1.949).abs() < 1e-3);
}

#[test]
fn ks_statistic_examples() {
    assert_eq!(ks_statistic(vec![1.0, 2.0], vec![1.0, 2.0]), 0.0);
    assert_eq!(ks_statistic(vec![1.0, 2.0], vec![3.0, 4.0]), 1.0);
    assert_eq!(ks_statistic(vec![1.0, 3.0], vec![2.0, 4.0]), 0.5);
}

#[test]
fn samplers_agree_with_inverse_transform() {
    let n = 100_000;
    let mut oracle = SplitMix(42);
    for (sampler, rate) in [(ExpSampler::Ziggurat, 1.0), (ExpSampler::Ziggurat, 3.5), (ExpSampler::InverseCdf, 0.25)] {
        let mut rng = SeededGenerator::with_sampler(b"ks-exponential", sampler).unwrap();
        let sample: Vec<f64> = (0..n).map(|_| rng.sample_exponential(rate).unwrap()).collect();
        let reference: Vec<f64> = (0..n).map(|_| oracle.exponential(rate)).collect();
        let d = ks_statistic(sample, reference);
        assert!(d < ks_critical(n, n), "{sampler} rate {rate}: D = {d}");
    }
}

#[test]
fn ziggurat_tail_matches() {
    // The slow paths of the ziggurat hardly show in the full-sample test, so
    // compare the region above 6 separately.
    let mut rng = SeededGenerator::with_sampler(b"ks-tail", ExpSampler::Ziggurat).unwrap();
    let mut oracle = SplitMix(7);
    let threshold = 6.0;
    let tail = |draw: &mut dyn FnMut() -> f64| {
        let mut out = Vec::new();
        while out.len() < 5_000 {
            let x = draw();
            if x > threshold {
                out.push(x - threshold);
            }
        }
        out
    };
    let a = tail(&mut || rng.sample_exponential(1.0).unwrap());
    let b = tail(&mut || oracle.exponential(1.0));
    let d = ks_statistic(a, b);
    assert!(d < ks_critical(5_000, 5_000), "D = {d}");
}

#[test]
fn sampler_moments() {
    for sampler in [ExpSampler::Ziggurat, ExpSampler::InverseCdf] {
        let mut rng = SeededGenerator::with_sampler(b"moments", sampler).unwrap();
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.sample_exponential(2.0).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        // Exp(2): mean 1/2 with sd 1/2, variance 1/4 with sd sqrt(8/16) / 2.
        let sd_mean = 0.5 / (n as f64).sqrt();
        let sd_var = (8.0f64 / 16.0).sqrt() / (2.0 * (n as f64).sqrt());
        assert!((mean - 0.5).abs() < 5.0 * sd_mean, "{sampler}: mean {mean}");
        assert!((var - 0.25).abs() < 5.0 * sd_var, "{sampler}: variance {var}");
    }
}

/// Splits a process down to its elementary subprocesses and records the
/// first point of each, indexed by level.
fn first_points(mut process: PoissonProcess, grid: &WeightDiscretization, out: &mut [f64]) {
    while process.splittable() {
        let mut sibling = process.split(grid).unwrap();
        sibling.next_point(1);
        first_points(sibling, grid, out);
    }
    out[process.upper() as usize - 1] = process.point();
}

#[test]
fn split_tree_matches_independent_processes() {
    let values = vec![0.0, 0.5, 1.5, 2.0, 4.0];
    let rates: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let grid = WeightDiscretization::explicit(values).unwrap();
    let reps = 10_000;
    let mut split = vec![Vec::with_capacity(reps); rates.len()];
    let mut direct = vec![Vec::with_capacity(reps); rates.len()];
    let mut oracle = SplitMix(99);
    for r in 0..reps as u64 {
        let rng = SeededGenerator::new(&r.to_le_bytes()).unwrap();
        let mut root = PoissonProcess::new(0.0, rng, 0, 4, 4.0, &grid).unwrap();
        root.next_point(1);
        let mut points = [f64::NAN; 4];
        first_points(root, &grid, &mut points);
        for (k, &rate) in rates.iter().enumerate() {
            assert!(points[k].is_finite() && points[k] > 0.0);
            split[k].push(points[k]);
            direct[k].push(oracle.exponential(rate));
        }
    }
    for k in 0..rates.len() {
        let d = ks_statistic(split[k].clone(), direct[k].clone());
        assert!(d < ks_critical(reps, reps), "level {}: D = {d}", k + 1);
    }
}

#[test]
fn streams_are_reproducible() {
    let mut rng = SeededGenerator::new(b"frozen").unwrap();
    let first: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
    let mut again = SeededGenerator::new(b"frozen").unwrap();
    assert_eq!(first, (0..3).map(|_| again.next_u64()).collect::<Vec<_>>());
    assert_eq!(first[0], xxhash_rust::xxh64::xxh64(b"frozen", 0));
}

proptest! {
    #[test]
    fn uniform_index_stays_in_range(seed in any::<u64>(), m in 1u64..10_000) {
        let mut rng = SeededGenerator::new(&seed.to_le_bytes()).unwrap();
        for _ in 0..200 {
            let k = rng.sample_uniform_index(m).unwrap();
            prop_assert!((1..=m).contains(&k));
        }
    }

    #[test]
    fn exponentials_are_positive_and_finite(seed in any::<u64>(), rate in 1e-6f64..1e6) {
        for sampler in [ExpSampler::Ziggurat, ExpSampler::InverseCdf] {
            let mut rng = SeededGenerator::with_sampler(&seed.to_le_bytes(), sampler).unwrap();
            for _ in 0..100 {
                let x = rng.sample_exponential(rate).unwrap();
                prop_assert!(x > 0.0 && x.is_finite());
            }
        }
    }
}

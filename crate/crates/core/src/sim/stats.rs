//! Sample statistics and a two-sample bootstrap on means.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn stddev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn resample_mean(xs: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let n = xs.len();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += xs[rng.gen_range(0..n)];
    }
    sum / n as f64
}

/// Fraction of bootstrap resamples in which mean(a) < mean(b).
///
/// Each resample draws `a.len()` values from `a` and `b.len()` from `b` with
/// replacement. A result ≥ 0.99 supports "mean(a) < mean(b)" at 99%.
pub fn bootstrap_less(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "bootstrap needs two non-empty samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wins = (0..resamples)
        .filter(|_| resample_mean(a, &mut rng) < resample_mean(b, &mut rng))
        .count();
    wins as f64 / resamples as f64
}

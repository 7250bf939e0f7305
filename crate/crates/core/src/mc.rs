//! Deterministic parallel Monte Carlo driver.
//!
//! Samples are generated in fixed-size blocks. Block `b` always draws from a
//! generator seeded by `(seed, b)`, and per-block results are reduced in
//! block order, so an estimate depends only on `(seed, samples)` and never on
//! the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of samples drawn per block.
pub const BLOCK_SIZE: u64 = 1 << 14;

/// Generator for block `block` of the stream identified by `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `f` once per block in parallel and folds the per-block outputs in
/// block order. `f` receives the block generator and the number of samples
/// the block is responsible for.
pub fn map_blocks<T, F>(samples: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let n_blocks = samples.div_ceil(BLOCK_SIZE);
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            let mut rng = block_rng(seed, b);
            f(&mut rng, count)
        })
        .collect()
}

/// Fills `x` with a uniform draw from `[-1,1]^d`.
pub fn sample_cube_point(rng: &mut ChaCha8Rng, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi = rng.gen_range(-1.0..=1.0);
    }
}

/// Mean and standard error accumulated over blocks.
#[derive(Debug, Clone, Copy)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Averages `g(X)` over `samples` uniform draws `X` from `[-1,1]^d`.
pub fn mean_over_cube<G>(d: usize, samples: u64, seed: u64, g: G) -> MeanEstimate
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let parts = map_blocks(samples, seed, |rng, count| {
        let mut x = vec![0.0f64; d];
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..count {
            sample_cube_point(rng, &mut x);
            let v = g(&x);
            sum += v;
            sum_sq += v * v;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = parts
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    MeanEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
    }
}

/// Fraction of uniform draws from `[-1,1]^d` satisfying `pred`, with the
/// binomial standard error.
pub fn fraction_over_cube<P>(d: usize, samples: u64, seed: u64, pred: P) -> MeanEstimate
where
    P: Fn(&[f64]) -> bool + Sync,
{
    let hits: u64 = map_blocks(samples, seed, |rng, count| {
        let mut x = vec![0.0f64; d];
        let mut h = 0u64;
        for _ in 0..count {
            sample_cube_point(rng, &mut x);
            if pred(&x) {
                h += 1;
            }
        }
        h
    })
    .into_iter()
    .sum();
    let n = samples as f64;
    let p = hits as f64 / n;
    MeanEstimate {
        mean: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        samples,
    }
}

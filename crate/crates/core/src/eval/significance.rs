//! Paired approximate randomization test over per-instance correctness.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{correctness, EvalError, PredictionSet};
use crate::pseudonym::ClozeInstance;

const SWAP_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub n: usize,
    pub iterations: usize,
    /// `correct_a - correct_b` on the unshuffled data.
    pub observed_diff: i64,
    /// Shuffles whose signed difference is at least the observed one.
    pub at_least: usize,
    /// Shuffles whose signed difference is at most the observed one.
    pub at_most: usize,
    /// Shuffles whose signed difference equals the observed one.
    pub ties: usize,
    /// Shuffles at least as extreme in absolute value.
    pub extreme: usize,
    /// Two-sided, `(1 + extreme) / (1 + iterations)`.
    pub p_value: f64,
}

/// Two-sided test on the difference in correct counts. Each
/// iteration swaps the two systems' outcomes on a random half of the
/// instances. Iteration `i` draws from stream `i` of a ChaCha generator
/// seeded with `seed`, so the result is independent of thread count.
pub fn approx_randomization(a: &[bool], b: &[bool], iterations: usize, seed: u64) -> SignificanceResult {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let n = a.len();
    let count = |xs: &[bool]| xs.iter().filter(|x| **x).count() as i64;
    let (ca, cb) = (count(a), count(b));
    let observed = ca - cb;
    let k = ((n as f64) * SWAP_FRACTION).round() as usize;

    let diffs: Vec<i64> = (0..iterations)
        .into_par_iter()
        .map(|it| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(it as u64);
            // moving a_i to system b and b_i to system a changes ca - cb by 2(b_i - a_i)
            let mut delta = ca - cb;
            for i in index::sample(&mut rng, n, k) {
                delta += 2 * (b[i] as i64 - a[i] as i64);
            }
            delta
        })
        .collect();

    let tally = |f: &dyn Fn(i64) -> bool| diffs.iter().filter(|d| f(**d)).count();
    let extreme = tally(&|d| d.abs() >= observed.abs());
    SignificanceResult {
        n,
        iterations,
        observed_diff: observed,
        at_least: tally(&|d| d >= observed),
        at_most: tally(&|d| d <= observed),
        ties: tally(&|d| d == observed),
        extreme,
        p_value: (1 + extreme) as f64 / (1 + iterations) as f64,
    }
}

/// Approximate randomization between two prediction sets over the same gold.
/// Both sets must cover the same instance ids.
pub fn paired_significance(
    gold: &[ClozeInstance],
    a: &PredictionSet,
    b: &PredictionSet,
    iterations: usize,
    seed: u64,
) -> Result<SignificanceResult, EvalError> {
    a.check_same_coverage(b)?;
    let ca = correctness(gold, a)?;
    let cb = correctness(gold, b)?;
    Ok(approx_randomization(&ca, &cb, iterations, seed))
}

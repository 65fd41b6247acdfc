//! Deterministic random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream
//! addressed by `(seed, stream index)`. Parallel work is split into fixed
//! batches, and batch `b` always reads stream `b`, so results do not depend
//! on how many threads execute the batches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Stream = ChaCha8Rng;

/// Trials per parallel batch in Monte Carlo loops.
pub const BATCH: u64 = 4096;

pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `trials` Bernoulli-style trials split into fixed batches and
/// returns the summed count. `f(rng, n)` must perform `n` trials.
///
/// Stream indices start at `first_stream`, so callers can reserve low
/// indices for other purposes.
pub(crate) fn batched_count<F>(trials: u64, seed: u64, first_stream: u64, f: F) -> u64
where
    F: Fn(&mut Stream, u64) -> u64 + Sync,
{
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = BATCH.min(trials - b * BATCH);
            let mut rng = stream(seed, first_stream + b);
            f(&mut rng, n)
        })
        .sum()
}

/// Like [`batched_count`] but each batch returns a vector that is merged
/// in batch order.
pub(crate) fn batched_collect<T, F>(trials: u64, seed: u64, first_stream: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream, u64) -> Vec<T> + Sync,
{
    let batches = trials.div_ceil(BATCH);
    let parts: Vec<Vec<T>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = BATCH.min(trials - b * BATCH);
            let mut rng = stream(seed, first_stream + b);
            f(&mut rng, n)
        })
        .collect();
    parts.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 3).random()).collect();
        let mut s = stream(7, 3);
        let b: Vec<u64> = (0..4).map(|_| s.random()).collect();
        assert_eq!(a[0], b[0]);
        let mut t = stream(7, 4);
        assert_ne!(b[0], t.random::<u64>());
    }

    #[test]
    fn batched_count_independent_of_thread_count() {
        let run = || {
            batched_count(20_000, 11, 0, |rng, n| {
                (0..n).filter(|_| rng.random::<f64>() < 0.3).count() as u64
            })
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(one, four);
    }
}

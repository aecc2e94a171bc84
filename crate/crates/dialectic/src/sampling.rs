//! Seeded index sampling and shuffling shared by the trainers.

use rand::seq::SliceRandom;
use rand::Rng;

/// `count` distinct indices drawn uniformly from `0..n`.
pub(crate) fn sample_indices<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, count).into_vec()
}

/// A fresh shuffle of `0..n`.
pub(crate) fn shuffled_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Real`].

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar usable by the optimizers, quantizers and metrics.
///
/// Implemented for `f32` and `f64`. Beyond the `num_traits` arithmetic
/// surface this adds seeded sampling hooks so that generic code never has to
/// name a concrete distribution type.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Uniform sample in `[lo, hi)`.
    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self;

    /// Standard normal sample (mean 0, variance 1).
    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Lossless conversion from a small integer count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
                rng.random_range(lo..hi)
            }

            fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Squared Euclidean distance between two equal-length vectors.
pub fn distance_sq<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Euclidean distance between two equal-length vectors.
pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    distance_sq(a, b).sqrt()
}

//! Seeded random streams: one for problem data, one for start points.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Name of the generator, recorded in run metadata.
pub const GENERATOR: &str = "ChaCha8Rng";

const PROBLEM_STREAM: u64 = 0;
const START_STREAM: u64 = 1;

pub fn problem_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PROBLEM_STREAM);
    rng
}

pub fn start_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(START_STREAM);
    rng
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, StandardNormal.sample_iter(rng).take(n))
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize) -> DMatrix<f64> {
    // column-major fill
    DMatrix::from_iterator(nrows, ncols, StandardNormal.sample_iter(rng).take(nrows * ncols))
}

/// Standard-Gaussian start point shared by every method run with `seed`.
pub fn default_start(seed: u64, dimension: usize) -> DVector<f64> {
    gaussian_vector(&mut start_rng(seed), dimension)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        assert_eq!(default_start(7, 5), default_start(7, 5));
        assert_ne!(default_start(7, 5), default_start(8, 5));
        let a = gaussian_vector(&mut problem_rng(7), 5);
        assert_ne!(a, default_start(7, 5));
    }
}

//! Seeded Gaussian sampling shared by the generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{DenseMatrix, DenseVector};
use crate::Scalar;

/// ChaCha8 stream; normals come from the ziggurat sampler of `rand_distr`.
pub type ExperimentRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<T: Scalar>(rng: &mut ExperimentRng) -> T {
    let v: f64 = StandardNormal.sample(rng);
    T::lit(v)
}

pub fn normal_vector<T: Scalar>(rng: &mut ExperimentRng, n: usize) -> DenseVector<T> {
    DenseVector::from_fn(n, |_| normal(rng))
}

/// Row-major standard normal matrix.
pub fn normal_matrix<T: Scalar>(rng: &mut ExperimentRng, rows: usize, cols: usize) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

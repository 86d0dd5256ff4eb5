//! Seeded random constructions used by the experiments and the tests.
//!
//! All randomness is drawn from ChaCha8 so that a seed reproduces the same
//! values across platforms and releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::qr_orthonormalize;
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream of the generator for `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix of i.i.d. standard normal entries, filled column by column.
pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    DenseMatrix::from_col_major(rows, cols, data).expect("sizes match")
}

pub fn gaussian_tensor(rng: &mut Rng, shape: &[usize]) -> DenseTensor {
    let len = shape.iter().product();
    let data = (0..len).map(|_| gaussian(rng)).collect();
    DenseTensor::new(shape.to_vec(), data).expect("valid shape")
}

/// Orthonormal `rows × cols` matrix: the Q factor of a Gaussian matrix.
pub fn random_orthonormal(rng: &mut Rng, rows: usize, cols: usize) -> DenseMatrix {
    assert!(cols <= rows, "random_orthonormal: cols > rows");
    loop {
        let g = gaussian_matrix(rng, rows, cols);
        // A Gaussian matrix is rank deficient with probability zero.
        if let Ok(q) = qr_orthonormalize(&g) {
            return q;
        }
    }
}

/// Skew-symmetric `(G − Gᵀ)/2` with `G` having i.i.d. `N(0, scale²)` entries.
pub fn random_skew(rng: &mut Rng, n: usize, scale: f64) -> DenseMatrix {
    let g = gaussian_matrix(rng, n, n).scaled(scale);
    let mut w = g.sub(&g.transpose());
    w = w.scaled(0.5);
    w
}

/// Tucker tensor with a Gaussian core and random orthonormal factors.
pub fn random_tucker(rng: &mut Rng, shape: &[usize], ranks: &[usize]) -> TuckerTensor {
    let core = gaussian_tensor(rng, ranks);
    let factors = shape
        .iter()
        .zip(ranks)
        .map(|(&n, &r)| random_orthonormal(rng, n, r))
        .collect();
    TuckerTensor::new(core, factors).expect("consistent random parts")
}

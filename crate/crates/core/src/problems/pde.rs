//! Finite-difference pieces shared by the PDE problems.
//!
//! The unit interval carries `I` interior points `x_i = i k`, `i = 1..=I`,
//! with `k = 1/(I+1)`; homogeneous Dirichlet values sit on the two boundary
//! points outside the grid. On this grid the discrete sine modes are exact
//! eigenvectors of the second-difference matrix.

use crate::error::{Error, Result};
use crate::linalg::qr_orthonormalize;
use crate::matrix::DenseMatrix;
use crate::random::{gaussian_matrix, seeded_stream};
use crate::tensor::DenseTensor;
use crate::tucker::{RankVector, TuckerTensor};

use super::ReferenceTrack;

pub fn grid_spacing(size: usize) -> f64 {
    1.0 / (size as f64 + 1.0)
}

pub fn grid_points(size: usize) -> Vec<f64> {
    let k = grid_spacing(size);
    (1..=size).map(|i| i as f64 * k).collect()
}

/// `tridiag(1, −2, 1) / k²`.
pub fn laplacian_1d(size: usize) -> DenseMatrix {
    let k = grid_spacing(size);
    let s = 1.0 / (k * k);
    DenseMatrix::from_fn(size, size, |i, j| {
        if i == j {
            -2.0 * s
        } else if i.abs_diff(j) == 1 {
            s
        } else {
            0.0
        }
    })
}

/// `c K_k` for every mode of `shape`.
pub fn diffusion_operators(shape: &[usize], c: f64) -> Vec<DenseMatrix> {
    shape.iter().map(|&n| laplacian_1d(n).scaled(c)).collect()
}

/// Eigenvalues `−(4/k²) sin²(jπk/2)`, `j = 1..=I`, of [`laplacian_1d`].
pub fn laplacian_eigenvalues(size: usize) -> Vec<f64> {
    let k = grid_spacing(size);
    (1..=size)
        .map(|j| {
            let s = (j as f64 * std::f64::consts::PI * k / 2.0).sin();
            -4.0 * s * s / (k * k)
        })
        .collect()
}

/// Largest magnitude eigenvalue of `c Σ_k K_k` in `dim` dimensions.
pub fn spectral_radius(size: usize, dim: usize, c: f64) -> f64 {
    let lmin = laplacian_eigenvalues(size).into_iter().fold(0.0, f64::min);
    c * dim as f64 * lmin.abs()
}

/// `Σ_k X ×_k K` by the three-point stencil, without forming `K`.
pub fn apply_laplacian_dense(x: &DenseTensor) -> DenseTensor {
    let shape = x.shape().to_vec();
    let mut out = DenseTensor::zeros(&shape);
    let src = x.data();
    let dst = out.data_mut();
    let mut stride = 1;
    for &n in &shape {
        let k = grid_spacing(n);
        let s = 1.0 / (k * k);
        for (p, d) in dst.iter_mut().enumerate() {
            let i = (p / stride) % n;
            let mut v = -2.0 * src[p];
            if i > 0 {
                v += src[p - stride];
            }
            if i + 1 < n {
                v += src[p + stride];
            }
            *d += s * v;
        }
        stride *= n;
    }
    out
}

/// `scale · u_1 ∘ ⋯ ∘ u_d` as a Tucker tensor of rank `ranks`.
///
/// The first factor column is `u_k/‖u_k‖`; the remaining columns come from
/// QR of `[u_k | G_k]` with `G_k` Gaussian from stream `k` of `seed`, so the
/// padding for rank `r` is a prefix of the padding for rank `r + 1`.
pub fn padded_rank_one(
    vectors: &[Vec<f64>],
    scale: f64,
    ranks: &RankVector,
    seed: u64,
) -> Result<TuckerTensor> {
    let shape: Vec<usize> = vectors.iter().map(Vec::len).collect();
    ranks.check_against(&shape)?;
    let mut weight = scale;
    let mut factors = Vec::with_capacity(vectors.len());
    for (k, u) in vectors.iter().enumerate() {
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidShape(format!("zero profile in mode {k}")));
        }
        weight *= norm;
        let col = DenseMatrix::from_col_major(u.len(), 1, u.clone())?;
        let m = if ranks[k] > 1 {
            let mut rng = seeded_stream(seed, k as u64);
            col.hcat(&gaussian_matrix(&mut rng, u.len(), ranks[k] - 1))
        } else {
            col
        };
        factors.push(qr_orthonormalize(&m)?);
    }
    let mut core = DenseTensor::zeros(ranks.as_slice());
    core.data_mut()[0] = weight;
    TuckerTensor::new(core, factors)
}

/// Classical fourth-order Runge–Kutta on the dense system, advanced on
/// demand with substeps no longer than `max_step`.
pub struct DenseRk4<F> {
    f: F,
    t: f64,
    x: DenseTensor,
    max_step: f64,
}

impl<F: Fn(f64, &DenseTensor) -> DenseTensor> DenseRk4<F> {
    pub fn new(f: F, x0: DenseTensor, max_step: f64) -> Self {
        Self {
            f,
            t: 0.0,
            x: x0,
            max_step,
        }
    }

    fn advance(&mut self, target: f64) {
        let span = target - self.t;
        if span <= 0.0 {
            return;
        }
        let n = (span / self.max_step).ceil().max(1.0) as usize;
        let h = span / n as f64;
        for i in 0..n {
            let t = self.t + i as f64 * h;
            let x = &self.x;
            let k1 = (self.f)(t, x);
            let k2 = (self.f)(t + 0.5 * h, &DenseTensor::axpy(0.5 * h, &k1, x).unwrap());
            let k3 = (self.f)(t + 0.5 * h, &DenseTensor::axpy(0.5 * h, &k2, x).unwrap());
            let k4 = (self.f)(t + h, &DenseTensor::axpy(h, &k3, x).unwrap());
            let mut next = x.clone();
            next.add_scaled(h / 6.0, &k1).unwrap();
            next.add_scaled(h / 3.0, &k2).unwrap();
            next.add_scaled(h / 3.0, &k3).unwrap();
            next.add_scaled(h / 6.0, &k4).unwrap();
            self.x = next;
        }
        self.t = target;
    }
}

impl<F: Fn(f64, &DenseTensor) -> DenseTensor> ReferenceTrack for DenseRk4<F> {
    fn at(&mut self, t: f64) -> Result<DenseTensor> {
        if t + 1e-12 < self.t {
            return Err(Error::InvalidConfig(format!(
                "reference requested at {t} after advancing to {}",
                self.t
            )));
        }
        self.advance(t);
        if !self.x.is_finite() {
            return Err(Error::Breakdown("dense reference became non-finite".into()));
        }
        Ok(self.x.clone())
    }
}

/// Step size for the dense reference: `min(1e-4, 0.05 / ρ)`.
pub fn reference_step(size: usize, dim: usize, diffusivity: f64) -> f64 {
    (0.05 / spectral_radius(size, dim, diffusivity)).min(1e-4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_modes_are_eigenvectors() {
        let n = 12;
        let k = laplacian_1d(n);
        let x = grid_points(n);
        let lambdas = laplacian_eigenvalues(n);
        for j in 1..=n {
            let v =
                DenseMatrix::from_fn(n, 1, |i, _| (j as f64 * std::f64::consts::PI * x[i]).sin());
            let kv = k.matmul(&v);
            let scale = v.frobenius_norm() * lambdas[j - 1].abs();
            assert!(kv.max_abs_diff(&v.scaled(lambdas[j - 1])) < 1e-10 * scale);
        }
    }

    #[test]
    fn stencil_matches_kronecker_sum() {
        let shape = [5, 4, 3];
        let x = DenseTensor::from_fn(&shape, |i| {
            (i[0] as f64 - 1.3) * (i[1] as f64 + 0.5) - i[2] as f64
        });
        let mut oracle = DenseTensor::zeros(&shape);
        for (m, &n) in shape.iter().enumerate() {
            oracle
                .add_scaled(1.0, &x.mode_product(m, &laplacian_1d(n)).unwrap())
                .unwrap();
        }
        let got = apply_laplacian_dense(&x);
        assert!(got.max_abs_diff(&oracle).unwrap() < 1e-10 * oracle.norm());
    }

    #[test]
    fn padded_initial_state_is_rank_one() {
        let u = grid_points(10);
        let v: Vec<f64> = u.iter().map(|x| x * (1.0 - x)).collect();
        let r = RankVector::new(vec![3, 4]).unwrap();
        let y = padded_rank_one(&[u.clone(), v.clone()], 2.0, &r, 7).unwrap();
        let full = y.to_full();
        for i in 0..10 {
            for j in 0..10 {
                assert!((full.get(&[i, j]) - 2.0 * u[i] * v[j]).abs() < 1e-13);
            }
        }
        let r5 = RankVector::new(vec![5, 5]).unwrap();
        let z = padded_rank_one(&[u, v], 2.0, &r5, 7).unwrap();
        let prefix = z.factor(1).leading_columns(4);
        assert!(prefix.max_abs_diff(y.factor(1)) < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let f = |_: f64, x: &DenseTensor| x.scaled(-1.0);
        let err = |h: f64| {
            let mut rk = DenseRk4::new(f, DenseTensor::filled(&[1, 1], 1.0), h);
            let x = rk.at(1.0).unwrap();
            (x.data()[0] - (-1f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..18.0).contains(&ratio), "{ratio}");
    }
}

//! Dense d-way tensors and basic multilinear algebra.
//!
//! Storage is column-major over modes: the multi-index `(i_0, …, i_{d-1})`
//! maps to `i_0 + I_0 (i_1 + I_1 (i_2 + …))`, so mode 0 varies fastest.
//! Modes are 0-based throughout the crate.
//!
//! The mode-`n` unfolding orders its columns by the remaining indices with
//! the lowest mode fastest. With this choice the Tucker identity
//! `X_(n) = U_n C_(n) (U_{d-1} ⊗ … ⊗ U_0)ᵀ` (mode `n` skipped in the
//! Kronecker chain) holds with the standard Kronecker product.

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn validate_shape(shape: &[usize]) -> Result<()> {
    if shape.len() < 2 {
        return Err(Error::InvalidShape(format!(
            "tensor order must be at least 2, got {}",
            shape.len()
        )));
    }
    if shape.contains(&0) {
        return Err(Error::InvalidShape(format!("zero mode size in {shape:?}")));
    }
    Ok(())
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        validate_shape(&shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for shape {shape:?}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    /// Zero tensor. Panics on an invalid shape.
    pub fn zeros(shape: &[usize]) -> Self {
        validate_shape(shape).expect("DenseTensor::zeros");
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        let mut t = Self::zeros(shape);
        t.data.fill(value);
        t
    }

    /// Builds a tensor by evaluating `f` at each multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(shape);
        let mut idx = vec![0usize; shape.len()];
        for v in t.data.iter_mut() {
            *v = f(&idx);
            for (i, &s) in idx.iter_mut().zip(shape) {
                *i += 1;
                if *i < s {
                    break;
                }
                *i = 0;
            }
        }
        t
    }

    #[inline]
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.shape.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .rev()
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let k = self.linear_index(idx);
        self.data[k] = value;
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n >= self.order() {
            return Err(Error::ModeOutOfRange {
                mode: n,
                order: self.order(),
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &DenseTensor, what: &str) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    /// Sizes of the index blocks left and right of mode `n`.
    fn split(&self, n: usize) -> (usize, usize) {
        let left = self.shape[..n].iter().product();
        let right = self.shape[n + 1..].iter().product();
        (left, right)
    }

    /// Mode-`n` unfolding `X_(n)` of size `I_n × ∏_{j≠n} I_j`.
    pub fn unfold(&self, n: usize) -> Result<DenseMatrix> {
        self.check_mode(n)?;
        let (left, right) = self.split(n);
        let size = self.shape[n];
        let mut out = vec![0.0; self.data.len()];
        for r in 0..right {
            for i in 0..size {
                let src = &self.data[(i + size * r) * left..][..left];
                for (l, &v) in src.iter().enumerate() {
                    out[i + size * (l + left * r)] = v;
                }
            }
        }
        DenseMatrix::from_col_major(size, left * right, out)
    }

    /// Inverse of [`unfold`](Self::unfold).
    pub fn fold(m: &DenseMatrix, n: usize, shape: &[usize]) -> Result<DenseTensor> {
        validate_shape(shape)?;
        if n >= shape.len() {
            return Err(Error::ModeOutOfRange {
                mode: n,
                order: shape.len(),
            });
        }
        let total: usize = shape.iter().product();
        if m.rows() != shape[n] || m.rows() * m.cols() != total {
            return Err(Error::ShapeMismatch(format!(
                "cannot fold a {}x{} matrix along mode {n} into {shape:?}",
                m.rows(),
                m.cols()
            )));
        }
        let left: usize = shape[..n].iter().product();
        let right: usize = shape[n + 1..].iter().product();
        let size = shape[n];
        let src = m.data();
        let mut data = vec![0.0; total];
        for r in 0..right {
            for i in 0..size {
                let dst = &mut data[(i + size * r) * left..][..left];
                for (l, v) in dst.iter_mut().enumerate() {
                    *v = src[i + size * (l + left * r)];
                }
            }
        }
        Ok(DenseTensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// The `n`-mode product `X ×_n U`, defined by `[X ×_n U]_(n) = U X_(n)`.
    pub fn mode_product(&self, n: usize, u: &DenseMatrix) -> Result<DenseTensor> {
        self.check_mode(n)?;
        if u.cols() != self.shape[n] {
            return Err(Error::ShapeMismatch(format!(
                "mode-{n} product of shape {:?} with a {}x{} matrix",
                self.shape,
                u.rows(),
                u.cols()
            )));
        }
        let (left, right) = self.split(n);
        let inner = self.shape[n];
        let outer = u.rows();
        let mut shape = self.shape.clone();
        shape[n] = outer;
        let mut data = vec![0.0; left * outer * right];
        let ud = u.data();
        if left == 1 {
            // Plain matrix product U * X_(0) on contiguous columns.
            for r in 0..right {
                let dst = &mut data[r * outer..(r + 1) * outer];
                for i in 0..inner {
                    let x = self.data[i + inner * r];
                    for (d, &c) in dst.iter_mut().zip(&ud[i * outer..(i + 1) * outer]) {
                        *d += c * x;
                    }
                }
            }
        } else {
            for r in 0..right {
                for i in 0..inner {
                    let src = &self.data[(i + inner * r) * left..][..left];
                    for j in 0..outer {
                        let c = ud[j + outer * i];
                        let dst = &mut data[(j + outer * r) * left..][..left];
                        for (d, &x) in dst.iter_mut().zip(src) {
                            *d += c * x;
                        }
                    }
                }
            }
        }
        Ok(DenseTensor { shape, data })
    }

    /// `X ×_n Uᵀ` without forming the transpose explicitly at the call site.
    pub fn mode_product_t(&self, n: usize, u: &DenseMatrix) -> Result<DenseTensor> {
        self.mode_product(n, &u.transpose())
    }

    /// Successive products with one matrix per mode; `None` skips a mode.
    pub fn multi_mode_product(&self, mats: &[Option<&DenseMatrix>]) -> Result<DenseTensor> {
        if mats.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for an order-{} tensor",
                mats.len(),
                self.order()
            )));
        }
        // Apply the most contracting products first.
        let mut order: Vec<usize> = (0..mats.len()).filter(|&k| mats[k].is_some()).collect();
        order.sort_by(|&a, &b| {
            let ra = mats[a].unwrap().rows() as f64 / self.shape[a] as f64;
            let rb = mats[b].unwrap().rows() as f64 / self.shape[b] as f64;
            ra.partial_cmp(&rb).unwrap().then(a.cmp(&b))
        });
        let mut out = self.clone();
        for k in order {
            out = out.mode_product(k, mats[k].unwrap())?;
        }
        Ok(out)
    }

    pub fn inner(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other, "inner product")?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// `alpha * x + y`.
    pub fn axpy(alpha: f64, x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
        x.check_same_shape(y, "axpy")?;
        let data = x
            .data
            .iter()
            .zip(&y.data)
            .map(|(a, b)| alpha * a + b)
            .collect();
        Ok(DenseTensor {
            shape: x.shape.clone(),
            data,
        })
    }

    /// In-place `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &DenseTensor) -> Result<()> {
        self.check_same_shape(other, "add_scaled")?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn hadamard(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.check_same_shape(other, "hadamard")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data,
        })
    }

    pub fn scaled(&self, alpha: f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        DenseTensor::axpy(-1.0, other, self)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Free-function forms of the tensor operations.
pub fn unfold(x: &DenseTensor, n: usize) -> Result<DenseMatrix> {
    x.unfold(n)
}

pub fn fold(m: &DenseMatrix, n: usize, shape: &[usize]) -> Result<DenseTensor> {
    DenseTensor::fold(m, n, shape)
}

pub fn mode_product(x: &DenseTensor, n: usize, u: &DenseMatrix) -> Result<DenseTensor> {
    x.mode_product(n, u)
}

pub fn inner(x: &DenseTensor, y: &DenseTensor) -> Result<f64> {
    x.inner(y)
}

pub fn norm(x: &DenseTensor) -> f64 {
    x.norm()
}

pub fn axpy(alpha: f64, x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    DenseTensor::axpy(alpha, x, y)
}

pub fn hadamard_dense(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    x.hadamard(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, gaussian_tensor, seeded};
    use proptest::prelude::*;

    fn rel(a: &DenseTensor, b: &DenseTensor) -> f64 {
        a.sub(b).unwrap().norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn unfold_of_matrix_mode0_is_the_matrix() {
        // [[1,2],[3,4]] stored column-major.
        let x = DenseTensor::new(vec![2, 2], vec![1.0, 3.0, 2.0, 4.0]).unwrap();
        let m = x.unfold(0).unwrap();
        assert_eq!(
            m,
            DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap()
        );
    }

    #[test]
    fn unfold_mode1_of_234_tensor() {
        let x = DenseTensor::from_fn(&[2, 3, 4], |i| (i[0] + 10 * i[1] + 100 * i[2]) as f64);
        let m = x.unfold(1).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 8));
        // Column c enumerates (i0, i2) with i0 fastest.
        for i1 in 0..3 {
            for i0 in 0..2 {
                for i2 in 0..4 {
                    assert_eq!(m[(i1, i0 + 2 * i2)], x.get(&[i0, i1, i2]));
                }
            }
        }
        assert_eq!(DenseTensor::fold(&m, 1, &[2, 3, 4]).unwrap(), x);
    }

    #[test]
    fn unfold_matches_index_arithmetic_for_all_modes() {
        let mut rng = seeded(7);
        let x = gaussian_tensor(&mut rng, &[3, 4, 5]);
        for n in 0..3 {
            let m = x.unfold(n).unwrap();
            let others: Vec<usize> = (0..3).filter(|&k| k != n).collect();
            let mut idx = [0usize; 3];
            for a in 0..x.shape()[others[0]] {
                for b in 0..x.shape()[others[1]] {
                    for i in 0..x.shape()[n] {
                        idx[n] = i;
                        idx[others[0]] = a;
                        idx[others[1]] = b;
                        let col = a + x.shape()[others[0]] * b;
                        assert_eq!(m[(i, col)], x.get(&idx));
                    }
                }
            }
            assert_eq!(DenseTensor::fold(&m, n, x.shape()).unwrap(), x);
        }
    }

    #[test]
    fn fold_edge_cases() {
        let z = DenseMatrix::zeros(3, 8);
        assert_eq!(
            DenseTensor::fold(&z, 1, &[2, 3, 4]).unwrap(),
            DenseTensor::zeros(&[2, 3, 4])
        );
        let row = DenseMatrix::from_fn(1, 5, |_, j| j as f64);
        let t = DenseTensor::fold(&row, 0, &[1, 5]).unwrap();
        assert_eq!(t.data(), row.data());
        assert!(DenseTensor::fold(&z, 0, &[2, 3, 4]).is_err());
        assert!(DenseTensor::fold(&z, 3, &[2, 3, 4]).is_err());
    }

    #[test]
    fn mode_errors() {
        let x = DenseTensor::zeros(&[2, 3]);
        assert!(matches!(x.unfold(2), Err(Error::ModeOutOfRange { .. })));
        assert!(x.mode_product(0, &DenseMatrix::zeros(2, 3)).is_err());
        assert!(DenseTensor::new(vec![4], vec![0.0; 4]).is_err());
        assert!(DenseTensor::new(vec![2, 2], vec![0.0; 3]).is_err());
    }

    #[test]
    fn identity_mode_product() {
        let mut rng = seeded(1);
        let x = gaussian_tensor(&mut rng, &[3, 4, 2]);
        for n in 0..3 {
            let i = DenseMatrix::identity(x.shape()[n]);
            assert_eq!(x.mode_product(n, &i).unwrap(), x);
        }
    }

    #[test]
    fn norm_inner_basics() {
        let ones = DenseTensor::filled(&[2, 3, 4], 1.0);
        assert!((ones.norm() - 24f64.sqrt()).abs() < 1e-15);
        let zero = DenseTensor::zeros(&[2, 3, 4]);
        assert_eq!(ones.inner(&zero).unwrap(), 0.0);
        assert!(ones.inner(&DenseTensor::zeros(&[2, 3, 5])).is_err());
    }

    #[test]
    fn axpy_and_hadamard() {
        let mut rng = seeded(3);
        let x = gaussian_tensor(&mut rng, &[3, 3, 3]);
        let y = gaussian_tensor(&mut rng, &[3, 3, 3]);
        assert_eq!(DenseTensor::axpy(0.0, &x, &y).unwrap(), y);
        let ones = DenseTensor::filled(&[3, 3, 3], 1.0);
        assert_eq!(x.hadamard(&ones).unwrap(), x);
        let h = x.hadamard(&y).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let idx = [a, b, c];
                    assert_eq!(h.get(&idx), x.get(&idx) * y.get(&idx));
                }
            }
        }
        assert!(x.hadamard(&DenseTensor::zeros(&[3, 3])).is_err());
    }

    fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(1usize..5, 2..=4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fold_unfold_roundtrip(shape in shape_strategy(), seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let x = gaussian_tensor(&mut rng, &shape);
            for n in 0..shape.len() {
                let m = x.unfold(n).unwrap();
                prop_assert_eq!(&DenseTensor::fold(&m, n, &shape).unwrap(), &x);
            }
        }

        #[test]
        fn mode_product_contraction(shape in shape_strategy(), seed in any::<u64>(), j in 1usize..4, k in 1usize..4) {
            let mut rng = seeded(seed);
            let x = gaussian_tensor(&mut rng, &shape);
            let n = (seed as usize) % shape.len();
            let u = gaussian_matrix(&mut rng, j, shape[n]);
            let v = gaussian_matrix(&mut rng, k, j);
            let lhs = x.mode_product(n, &u).unwrap().mode_product(n, &v).unwrap();
            let rhs = x.mode_product(n, &v.matmul(&u)).unwrap();
            prop_assert!(rel(&lhs, &rhs) <= 1e-12);
        }

        #[test]
        fn mode_products_commute(shape in shape_strategy(), seed in any::<u64>(), j in 1usize..4, k in 1usize..4) {
            let mut rng = seeded(seed);
            let x = gaussian_tensor(&mut rng, &shape);
            let n = (seed as usize) % shape.len();
            let m = (n + 1) % shape.len();
            let u = gaussian_matrix(&mut rng, j, shape[n]);
            let w = gaussian_matrix(&mut rng, k, shape[m]);
            let lhs = x.mode_product(n, &u).unwrap().mode_product(m, &w).unwrap();
            let rhs = x.mode_product(m, &w).unwrap().mode_product(n, &u).unwrap();
            prop_assert!(rel(&lhs, &rhs) <= 1e-12);
        }

        #[test]
        fn norm_squared_is_self_inner(shape in shape_strategy(), seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let x = gaussian_tensor(&mut rng, &shape);
            let ip = x.inner(&x).unwrap();
            prop_assert!((x.norm().powi(2) - ip).abs() <= 1e-14 * ip.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn cauchy_schwarz(shape in shape_strategy(), seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let x = gaussian_tensor(&mut rng, &shape);
            let y = gaussian_tensor(&mut rng, &shape);
            prop_assert!(x.inner(&y).unwrap().abs() <= x.norm() * y.norm() * (1.0 + 1e-14));
        }
    }
}

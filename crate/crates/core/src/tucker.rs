//! Tucker tensors `𝒞 ×_1 U_1 ⋯ ×_d U_d` with orthonormal factors, HOSVD and
//! HOOI compression, and structured arithmetic.
//!
//! Structured operations (sums, Hadamard products, Kronecker-sum operators)
//! first build a valid but non-orthonormal factorization and then call
//! [`TuckerTensor::orthonormalized`], which takes a QR factorization of each
//! factor and absorbs the triangular factors into the core. When a factor has
//! more columns than rows, the QR step caps the rank at the mode size without
//! changing the represented tensor.

use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, householder_qr, leading_left_singular_vectors};
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;

/// Maximum Gram deviation accepted for factor matrices.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

/// Tucker rank `(r_1, …, r_d)`; every entry at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankVector(Vec<usize>);

impl RankVector {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.is_empty() || ranks.contains(&0) {
            return Err(Error::InvalidRank(format!(
                "ranks must be positive, got {ranks:?}"
            )));
        }
        Ok(Self(ranks))
    }

    /// The same rank in every one of `order` modes.
    pub fn uniform(order: usize, r: usize) -> Result<Self> {
        Self::new(vec![r; order])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Checks `r_k ≤ I_k` against an ambient shape.
    pub fn check_against(&self, shape: &[usize]) -> Result<()> {
        if shape.len() != self.0.len() {
            return Err(Error::InvalidRank(format!(
                "rank {:?} has order {} but the shape {shape:?} has order {}",
                self.0,
                self.0.len(),
                shape.len()
            )));
        }
        if let Some(k) = (0..shape.len()).find(|&k| self.0[k] > shape[k]) {
            return Err(Error::InvalidRank(format!(
                "rank {} exceeds mode size {} in mode {k}",
                self.0[k], shape[k]
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for RankVector {
    type Output = usize;

    fn index(&self, k: usize) -> &usize {
        &self.0[k]
    }
}

/// Options for higher-order orthogonal iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HooiOptions {
    /// Stop once the relative fit changes by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for HooiOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_sweeps: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuckerTensor {
    core: DenseTensor,
    factors: Vec<DenseMatrix>,
    shape: Vec<usize>,
}

impl TuckerTensor {
    /// Validates shapes and orthonormality of the factors.
    pub fn new(core: DenseTensor, factors: Vec<DenseMatrix>) -> Result<Self> {
        let y = Self::from_parts(core, factors)?;
        for (k, u) in y.factors.iter().enumerate() {
            let dev = u.gram_deviation();
            if !(dev <= ORTHONORMAL_TOLERANCE) {
                return Err(Error::InvalidShape(format!(
                    "factor {k} is not orthonormal (Gram deviation {dev:e})"
                )));
            }
        }
        Ok(y)
    }

    /// Accepts arbitrary factors and restores orthonormality by QR, absorbing
    /// the triangular factors into the core.
    pub fn orthonormalized(core: DenseTensor, factors: Vec<DenseMatrix>) -> Result<Self> {
        let y = Self::from_parts(core, factors)?;
        let mut core = y.core;
        let mut factors = Vec::with_capacity(y.factors.len());
        for (k, u) in y.factors.into_iter().enumerate() {
            let (q, r) = householder_qr(&u);
            core = core.mode_product(k, &r)?;
            factors.push(q);
        }
        Ok(Self {
            core,
            factors,
            shape: y.shape,
        })
    }

    pub(crate) fn from_parts(core: DenseTensor, factors: Vec<DenseMatrix>) -> Result<Self> {
        if factors.len() != core.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} factors for an order-{} core",
                factors.len(),
                core.order()
            )));
        }
        for (k, u) in factors.iter().enumerate() {
            if u.cols() != core.shape()[k] {
                return Err(Error::ShapeMismatch(format!(
                    "factor {k} has {} columns, core mode size is {}",
                    u.cols(),
                    core.shape()[k]
                )));
            }
            if u.rows() == 0 {
                return Err(Error::InvalidShape(format!("factor {k} has no rows")));
            }
        }
        let shape = factors.iter().map(|u| u.rows()).collect();
        Ok(Self {
            core,
            factors,
            shape,
        })
    }

    /// The zero tensor of the given rank, with canonical factors.
    pub fn zeros(shape: &[usize], ranks: &RankVector) -> Result<Self> {
        ranks.check_against(shape)?;
        let factors = shape
            .iter()
            .zip(ranks.as_slice())
            .map(|(&n, &r)| DenseMatrix::from_fn(n, r, |i, j| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Self::from_parts(DenseTensor::zeros(ranks.as_slice()), factors)
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[DenseMatrix] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> &DenseMatrix {
        &self.factors[k]
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn ranks(&self) -> RankVector {
        RankVector(self.core.shape().to_vec())
    }

    pub fn into_parts(self) -> (DenseTensor, Vec<DenseMatrix>) {
        (self.core, self.factors)
    }

    /// Frobenius norm; equals the core norm because the factors are
    /// orthonormal.
    pub fn norm(&self) -> f64 {
        self.core.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.core.is_finite() && self.factors.iter().all(DenseMatrix::is_finite)
    }

    /// Largest Gram deviation over all factors.
    pub fn max_gram_deviation(&self) -> f64 {
        self.factors
            .iter()
            .map(DenseMatrix::gram_deviation)
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, alpha: f64) -> TuckerTensor {
        TuckerTensor {
            core: self.core.scaled(alpha),
            factors: self.factors.clone(),
            shape: self.shape.clone(),
        }
    }

    pub fn to_full(&self) -> DenseTensor {
        let mats: Vec<Option<&DenseMatrix>> = self.factors.iter().map(Some).collect();
        self.core
            .multi_mode_product(&mats)
            .expect("Tucker parts are consistent")
    }

    /// `U_k ↦ U_k Q_k` and `𝒞 ↦ 𝒞 ×_k Q_kᵀ`; the represented tensor is
    /// unchanged.
    pub fn gauge_rotate(&self, qs: &[DenseMatrix]) -> Result<TuckerTensor> {
        if qs.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} rotations for an order-{} tensor",
                qs.len(),
                self.order()
            )));
        }
        let mut core = self.core.clone();
        let mut factors = Vec::with_capacity(qs.len());
        for (k, q) in qs.iter().enumerate() {
            let r = self.core.shape()[k];
            if q.rows() != r || q.cols() != r {
                return Err(Error::ShapeMismatch(format!(
                    "rotation {k} is {}x{}, expected {r}x{r}",
                    q.rows(),
                    q.cols()
                )));
            }
            let dev = q.gram_deviation();
            if !(dev <= ORTHONORMAL_TOLERANCE) {
                return Err(Error::InvalidShape(format!(
                    "rotation {k} is not orthogonal (Gram deviation {dev:e})"
                )));
            }
            core = core.mode_product(k, &q.transpose())?;
            factors.push(self.factors[k].matmul(q));
        }
        Ok(TuckerTensor {
            core,
            factors,
            shape: self.shape.clone(),
        })
    }

    /// `⟨self, other⟩` computed on the cores.
    pub fn inner(&self, other: &TuckerTensor) -> Result<f64> {
        check_same_shape(self, other)?;
        let cross: Vec<DenseMatrix> = self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(u, v)| u.t_matmul(v))
            .collect();
        let mats: Vec<Option<&DenseMatrix>> = cross.iter().map(Some).collect();
        self.core.inner(&other.core.multi_mode_product(&mats)?)
    }
}

fn check_same_shape(a: &TuckerTensor, b: &TuckerTensor) -> Result<()> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch(format!(
            "Tucker shapes {:?} and {:?}",
            a.shape, b.shape
        )));
    }
    Ok(())
}

/// `A ×_k U_kᵀ` for every `k` (or every `k ≠ skip`).
pub(crate) fn project_all_but(
    a: &DenseTensor,
    factors: &[DenseMatrix],
    skip: Option<usize>,
) -> Result<DenseTensor> {
    let ts: Vec<DenseMatrix> = factors.iter().map(DenseMatrix::transpose).collect();
    let mats: Vec<Option<&DenseMatrix>> = ts
        .iter()
        .enumerate()
        .map(|(k, t)| if Some(k) == skip { None } else { Some(t) })
        .collect();
    a.multi_mode_product(&mats)
}

/// Truncated higher-order SVD.
pub fn hosvd(a: &DenseTensor, ranks: &RankVector) -> Result<TuckerTensor> {
    ranks.check_against(a.shape())?;
    let mut factors = Vec::with_capacity(a.order());
    for k in 0..a.order() {
        factors.push(leading_left_singular_vectors(&a.unfold(k)?, ranks[k])?);
    }
    let core = project_all_but(a, &factors, None)?;
    TuckerTensor::from_parts(core, factors)
}

/// Higher-order orthogonal iteration started from the HOSVD.
pub fn hooi(a: &DenseTensor, ranks: &RankVector, opts: HooiOptions) -> Result<TuckerTensor> {
    hooi_with_history(a, ranks, opts).map(|(y, _)| y)
}

/// As [`hooi`], also returning the core norm after initialization and after
/// every sweep. The sequence is nondecreasing up to rounding.
pub fn hooi_with_history(
    a: &DenseTensor,
    ranks: &RankVector,
    opts: HooiOptions,
) -> Result<(TuckerTensor, Vec<f64>)> {
    let mut y = hosvd(a, ranks)?;
    let a_norm = a.norm();
    let mut history = vec![y.core.norm()];
    if a_norm == 0.0 {
        return Ok((y, history));
    }
    let fit = |core_norm: f64| {
        let resid = (a_norm * a_norm - core_norm * core_norm).max(0.0).sqrt();
        1.0 - resid / a_norm
    };
    let mut prev_fit = fit(history[0]);
    for _ in 0..opts.max_sweeps {
        for n in 0..a.order() {
            let z = project_all_but(a, &y.factors, Some(n))?;
            y.factors[n] = leading_left_singular_vectors(&z.unfold(n)?, ranks[n])?;
        }
        y.core = project_all_but(a, &y.factors, None)?;
        let core_norm = y.core.norm();
        history.push(core_norm);
        let f = fit(core_norm);
        let done = (f - prev_fit).abs() < opts.tol;
        prev_fit = f;
        if done {
            break;
        }
    }
    Ok((y, history))
}

/// Writes `alpha * block` into `target` at the given multi-index offset.
pub(crate) fn embed_block(
    target: &mut DenseTensor,
    block: &DenseTensor,
    offsets: &[usize],
    alpha: f64,
) {
    let d = block.order();
    let mut idx = vec![0usize; d];
    let mut dst = vec![0usize; d];
    for &v in block.data() {
        for k in 0..d {
            dst[k] = idx[k] + offsets[k];
        }
        let pos = target.linear_index(&dst);
        target.data_mut()[pos] += alpha * v;
        for k in 0..d {
            idx[k] += 1;
            if idx[k] < block.shape()[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `Σ_i coeffs[i] · ys[i]` with concatenated factors and a block-diagonal
/// core.
pub fn tucker_sum(ys: &[&TuckerTensor], coeffs: &[f64]) -> Result<TuckerTensor> {
    if ys.is_empty() || ys.len() != coeffs.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} terms with {} coefficients",
            ys.len(),
            coeffs.len()
        )));
    }
    for y in &ys[1..] {
        check_same_shape(ys[0], y)?;
    }
    let d = ys[0].order();
    let total: Vec<usize> = (0..d)
        .map(|k| ys.iter().map(|y| y.core.shape()[k]).sum())
        .collect();
    let mut core = DenseTensor::zeros(&total);
    let mut offsets = vec![0usize; d];
    for (y, &c) in ys.iter().zip(coeffs) {
        embed_block(&mut core, &y.core, &offsets, c);
        for k in 0..d {
            offsets[k] += y.core.shape()[k];
        }
    }
    let factors = (0..d)
        .map(|k| {
            ys[1..]
                .iter()
                .fold(ys[0].factors[k].clone(), |acc, y| acc.hcat(&y.factors[k]))
        })
        .collect();
    TuckerTensor::orthonormalized(core, factors)
}

/// Elementwise product. Factor column `i + r₁ j` of mode `k` is
/// `U_k[:, i] ⊙ V_k[:, j]` and the core is the Kronecker product of the
/// cores; ranks beyond the mode size are removed exactly by the QR step.
pub fn tucker_hadamard(a: &TuckerTensor, b: &TuckerTensor) -> Result<TuckerTensor> {
    check_same_shape(a, b)?;
    let d = a.order();
    let ra = a.core.shape().to_vec();
    let rb = b.core.shape().to_vec();
    let mut factors = Vec::with_capacity(d);
    for k in 0..d {
        let (u, v) = (&a.factors[k], &b.factors[k]);
        factors.push(DenseMatrix::from_fn(u.rows(), ra[k] * rb[k], |x, c| {
            u[(x, c % ra[k])] * v[(x, c / ra[k])]
        }));
    }
    let shape: Vec<usize> = (0..d).map(|k| ra[k] * rb[k]).collect();
    let mut ia = vec![0usize; d];
    let mut ib = vec![0usize; d];
    let core = DenseTensor::from_fn(&shape, |idx| {
        for k in 0..d {
            ia[k] = idx[k] % ra[k];
            ib[k] = idx[k] / ra[k];
        }
        a.core.get(&ia) * b.core.get(&ib)
    });
    TuckerTensor::orthonormalized(core, factors)
}

/// `Σ_k Y ×_k K_k`.
///
/// Mode `k` uses the factor `[U_k | K_k U_k]`; term `k` sits in the core block
/// offset by `r_k` in mode `k` only, so the rank is at most `2 r_k` per mode.
pub fn apply_kron_sum_operator(ks: &[DenseMatrix], y: &TuckerTensor) -> Result<TuckerTensor> {
    let d = y.order();
    if ks.len() != d {
        return Err(Error::ShapeMismatch(format!(
            "{} operators for an order-{d} tensor",
            ks.len()
        )));
    }
    for (k, m) in ks.iter().enumerate() {
        if m.rows() != y.shape[k] || m.cols() != y.shape[k] {
            return Err(Error::ShapeMismatch(format!(
                "operator {k} is {}x{}, mode size is {}",
                m.rows(),
                m.cols(),
                y.shape[k]
            )));
        }
    }
    let r = y.core.shape().to_vec();
    let doubled: Vec<usize> = r.iter().map(|v| 2 * v).collect();
    let mut core = DenseTensor::zeros(&doubled);
    for k in 0..d {
        let mut offsets = vec![0usize; d];
        offsets[k] = r[k];
        embed_block(&mut core, &y.core, &offsets, 1.0);
    }
    let factors = (0..d)
        .map(|k| y.factors[k].hcat(&ks[k].matmul(&y.factors[k])))
        .collect();
    TuckerTensor::orthonormalized(core, factors)
}

/// Best rank-`ranks` approximation of a Tucker tensor by HOOI on its core.
///
/// Since the factors are orthonormal, HOOI of `𝒟 ×_k W_k` equals HOOI of `𝒟`
/// followed by `W_k Q_k`; the dense tensor is never formed. Target ranks above
/// the current rank are reached by zero padding.
pub fn recompress(y: &TuckerTensor, ranks: &RankVector, opts: HooiOptions) -> Result<TuckerTensor> {
    ranks.check_against(&y.shape)?;
    let current = y.core.shape();
    let inner: Vec<usize> = (0..y.order()).map(|k| ranks[k].min(current[k])).collect();
    let g = hooi(&y.core, &RankVector(inner.clone()), opts)?;
    let factors: Vec<DenseMatrix> = y
        .factors
        .iter()
        .zip(&g.factors)
        .map(|(w, q)| w.matmul(q))
        .collect();
    let compressed = TuckerTensor::from_parts(g.core, factors)?;
    if inner == ranks.as_slice() {
        return Ok(compressed);
    }
    pad_to_rank(&compressed, ranks)
}

/// Zero-pads the core and completes the factors to a larger rank.
pub fn pad_to_rank(y: &TuckerTensor, ranks: &RankVector) -> Result<TuckerTensor> {
    ranks.check_against(&y.shape)?;
    let current = y.core.shape();
    if (0..y.order()).any(|k| ranks[k] < current[k]) {
        return Err(Error::InvalidRank(format!(
            "cannot pad rank {current:?} down to {:?}",
            ranks.as_slice()
        )));
    }
    let mut core = DenseTensor::zeros(ranks.as_slice());
    embed_block(&mut core, &y.core, &vec![0; y.order()], 1.0);
    let factors = y
        .factors
        .iter()
        .enumerate()
        .map(|(k, u)| complete_orthonormal(u, ranks[k]))
        .collect();
    TuckerTensor::from_parts(core, factors)
}

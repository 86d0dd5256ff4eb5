//! Small dense factorizations: Householder QR, one-sided Jacobi SVD, the
//! orthonormal polar factor, the Gram pseudo-inverse and the matrix
//! exponential.
//!
//! The SVD first reduces a tall `m × n` input to its `n × n` triangular QR
//! factor and then orthogonalizes the columns of that factor with Hestenes
//! (one-sided Jacobi) rotations. One-sided Jacobi keeps small singular values
//! to high relative accuracy, which matters when cores carry singular values
//! spanning many orders of magnitude.
//!
//! Sign convention: every singular pair is signed so that the entry of
//! largest magnitude in the left vector is positive (lowest row index wins
//! ties). `left * rightᵀ` is invariant under this choice.

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};

const MAX_JACOBI_SWEEPS: usize = 80;

/// Condition estimate of `C Cᵀ` above which the Gram pseudo-inverse refuses.
pub const GRAM_CONDITION_LIMIT: f64 = 1e14;

#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// `m × n`, orthonormal columns.
    pub left: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `n × n` orthogonal.
    pub right: DenseMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut scaled = self.left.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            for v in scaled.col_mut(j) {
                *v *= s;
            }
        }
        scaled.matmul_t(&self.right)
    }
}

/// Householder QR of an `m × n` matrix: returns `Q` (`m × k`, orthonormal
/// columns) and `R` (`k × n`, upper trapezoidal) with `k = min(m, n)`.
///
/// Rank-deficient input is accepted; `Q` stays orthonormal and the
/// corresponding diagonal entries of `R` vanish.
pub fn householder_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    let mut w = a.clone();
    let mut reflectors: Vec<Option<(Vec<f64>, f64)>> = Vec::with_capacity(k);
    for j in 0..k {
        let x = &w.col(j)[j..];
        let norm = dot(x, x).sqrt();
        if norm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        if vv == 0.0 {
            reflectors.push(None);
            continue;
        }
        let tau = 2.0 / vv;
        for c in j..n {
            let col = &mut w.col_mut(c)[j..];
            let s = tau * dot(&v, col);
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= s * vi;
            }
        }
        reflectors.push(Some((v, tau)));
    }
    let r = DenseMatrix::from_fn(k, n, |i, c| if i <= c { w[(i, c)] } else { 0.0 });
    let mut q = DenseMatrix::from_fn(m, k, |i, c| if i == c { 1.0 } else { 0.0 });
    for (j, refl) in reflectors.iter().enumerate().rev() {
        if let Some((v, tau)) = refl {
            for c in 0..k {
                let col = &mut q.col_mut(c)[j..];
                let s = tau * dot(v, col);
                if s != 0.0 {
                    for (ci, vi) in col.iter_mut().zip(v) {
                        *ci -= s * vi;
                    }
                }
            }
        }
    }
    (q, r)
}

/// Orthonormal basis of `range(M)` for a tall, full-column-rank `M`.
///
/// Columns are signed so that `R` has a positive diagonal, which makes the
/// result unique.
pub fn qr_orthonormalize(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite("qr_orthonormalize input"));
    }
    if m.rows() < m.cols() {
        return Err(Error::InvalidShape(format!(
            "qr_orthonormalize needs rows >= cols, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (mut q, r) = householder_qr(m);
    let scale = (0..m.cols())
        .map(|j| dot(m.col(j), m.col(j)).sqrt())
        .fold(0.0, f64::max);
    let tol = (m.rows() as f64) * f64::EPSILON * scale;
    for j in 0..m.cols() {
        let d = r[(j, j)];
        if !(d.abs() > tol) {
            return Err(Error::RankDeficient { column: j });
        }
        if d < 0.0 {
            for v in q.col_mut(j) {
                *v = -*v;
            }
        }
    }
    Ok(q)
}

/// Economy SVD `B = left · diag(σ) · rightᵀ` of a tall matrix (`rows ≥ cols`).
pub fn economy_svd(b: &DenseMatrix) -> Result<SvdResult> {
    if !b.is_finite() {
        return Err(Error::NonFinite("economy_svd input"));
    }
    let (m, n) = (b.rows(), b.cols());
    if m < n {
        return Err(Error::InvalidShape(format!(
            "economy_svd needs rows >= cols, got {m}x{n}"
        )));
    }
    if n == 0 {
        return Ok(SvdResult {
            left: DenseMatrix::zeros(m, 0),
            singular_values: Vec::new(),
            right: DenseMatrix::zeros(0, 0),
        });
    }

    // Power-of-two scaling is exact and keeps squared column norms in range.
    let peak = b.data().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let scale = if peak > 0.0 {
        2f64.powi(peak.log2().round() as i32)
    } else {
        1.0
    };
    let (q, r) = householder_qr(&b.scaled(1.0 / scale));
    let (mut w, mut v) = (r, DenseMatrix::identity(n));
    one_sided_jacobi(&mut w, &mut v);

    let norms: Vec<f64> = (0..n).map(|j| dot(w.col(j), w.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j] * scale).collect();
    let sigma_max = norms[order[0]];
    let noise_level = sigma_max * (n as f64) * f64::EPSILON;

    let mut u = DenseMatrix::zeros(n, n);
    let mut missing = Vec::new();
    for (p, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s <= f64::MIN_POSITIVE {
            missing.push(p);
            continue;
        }
        for (dst, &src) in u.col_mut(p).iter_mut().zip(w.col(j)) {
            *dst = src / s;
        }
        if s < noise_level && !reorthogonalize(&mut u, p, &missing) {
            missing.push(p);
        }
    }
    for &p in &missing {
        complete_column(&mut u, p, &missing);
    }

    let mut left = q.matmul(&u);
    let mut right = DenseMatrix::from_fn(n, n, |i, p| v[(i, order[p])]);
    for p in 0..n {
        let col = left.col(p);
        let mut best = 0;
        for i in 1..m {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            for x in left.col_mut(p) {
                *x = -*x;
            }
            for x in right.col_mut(p) {
                *x = -*x;
            }
        }
    }
    Ok(SvdResult {
        left,
        singular_values: sigma,
        right,
    })
}

/// Hestenes rotations until all column pairs of `w` are numerically
/// orthogonal; `v` accumulates the right rotations.
fn one_sided_jacobi(w: &mut DenseMatrix, v: &mut DenseMatrix) {
    let n = w.cols();
    let tol = (n as f64) * f64::EPSILON;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.col(p), w.col(p));
                let beta = dot(w.col(q), w.col(q));
                let gamma = dot(w.col(p), w.col(q));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(w, p, q, c, s);
                rotate_columns(v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate_columns(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let rows = m.rows();
    let data = m.data_mut();
    let (lo, hi) = data.split_at_mut(q * rows);
    let cp = &mut lo[p * rows..(p + 1) * rows];
    let cq = &mut hi[..rows];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Two Gram–Schmidt passes of column `p` against the valid columns before
/// it. Returns false when nothing of the column survives.
fn reorthogonalize(u: &mut DenseMatrix, p: usize, skip: &[usize]) -> bool {
    for _ in 0..2 {
        for j in 0..p {
            if skip.contains(&j) {
                continue;
            }
            let proj = dot(u.col(j), u.col(p));
            let basis = u.col(j).to_vec();
            for (x, b) in u.col_mut(p).iter_mut().zip(&basis) {
                *x -= proj * b;
            }
        }
    }
    let norm = dot(u.col(p), u.col(p)).sqrt();
    if norm < 1e-8 {
        return false;
    }
    for x in u.col_mut(p) {
        *x /= norm;
    }
    true
}

/// Fills column `p` of the square matrix `u` with a canonical basis vector
/// orthogonalized against the other filled columns.
fn complete_column(u: &mut DenseMatrix, p: usize, missing: &[usize]) {
    let n = u.rows();
    let filled: Vec<usize> = (0..u.cols())
        .filter(|j| *j != p && (!missing.contains(j) || *j < p))
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..n {
        let mut cand = vec![0.0; n];
        cand[i] = 1.0;
        for _ in 0..2 {
            for &j in &filled {
                let proj = dot(u.col(j), &cand);
                for (x, b) in cand.iter_mut().zip(u.col(j)) {
                    *x -= proj * b;
                }
            }
        }
        let norm = dot(&cand, &cand).sqrt();
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, cand));
        }
    }
    let (norm, cand) = best.expect("non-empty basis");
    for (dst, x) in u.col_mut(p).iter_mut().zip(cand) {
        *dst = x / norm;
    }
}

/// Extends the orthonormal columns of `q` to `k` orthonormal columns using
/// canonical basis vectors.
pub fn complete_orthonormal(q: &DenseMatrix, k: usize) -> DenseMatrix {
    let m = q.rows();
    assert!(k <= m, "cannot complete to more columns than rows");
    if k <= q.cols() {
        return q.leading_columns(k);
    }
    let mut out = DenseMatrix::zeros(m, k);
    for j in 0..q.cols() {
        out.col_mut(j).copy_from_slice(q.col(j));
    }
    let mut next = 0;
    for p in q.cols()..k {
        loop {
            let mut cand = vec![0.0; m];
            cand[next % m] = 1.0;
            next += 1;
            for _ in 0..2 {
                for j in 0..p {
                    let proj = dot(out.col(j), &cand);
                    for (x, b) in cand.iter_mut().zip(out.col(j)) {
                        *x -= proj * b;
                    }
                }
            }
            let norm = dot(&cand, &cand).sqrt();
            if norm > 0.5 / (m as f64).sqrt() {
                for (dst, x) in out.col_mut(p).iter_mut().zip(cand) {
                    *dst = x / norm;
                }
                break;
            }
            assert!(next < 2 * m + k, "basis completion failed");
        }
    }
    out
}

/// Maximizer of `Tr[Bᵀ V]` over all `V` with orthonormal columns: `R Tᵀ`
/// from the economy SVD `B = R Σ Tᵀ`.
pub fn orthonormal_polar_factor(b: &DenseMatrix) -> Result<DenseMatrix> {
    let svd = economy_svd(b)?;
    Ok(svd.left.matmul_t(&svd.right))
}

/// `Cᵀ (C Cᵀ)⁻¹` for a full-row-rank `C`.
///
/// Fails with [`Error::SingularGram`] when the condition estimate of
/// `C Cᵀ` exceeds [`GRAM_CONDITION_LIMIT`].
pub fn pseudo_inverse_gram(c: &DenseMatrix) -> Result<DenseMatrix> {
    if !c.is_finite() {
        return Err(Error::NonFinite("pseudo_inverse_gram input"));
    }
    if c.rows() > c.cols() {
        return Err(Error::SingularGram {
            condition: f64::INFINITY,
        });
    }
    let gram = c.matmul_t(c);
    let svd = economy_svd(&gram)?;
    let smax = svd.singular_values[0];
    let smin = *svd.singular_values.last().unwrap();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= GRAM_CONDITION_LIMIT) {
        return Err(Error::SingularGram { condition });
    }
    // (C Cᵀ)⁻¹ = T Σ⁻¹ Rᵀ
    let mut scaled = svd.right.clone();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        for v in scaled.col_mut(j) {
            *v /= s;
        }
    }
    let inv = scaled.matmul_t(&svd.left);
    Ok(c.t_matmul(&inv))
}

/// `exp(W)` by scaling and squaring with a Taylor series truncated at
/// machine precision (the scaled matrix has one-norm at most 1/2).
pub fn matrix_exponential(w: &DenseMatrix) -> Result<DenseMatrix> {
    if w.rows() != w.cols() {
        return Err(Error::InvalidShape(format!(
            "matrix_exponential needs a square matrix, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    if !w.is_finite() {
        return Err(Error::NonFinite("matrix_exponential input"));
    }
    let n = w.rows();
    let norm = w.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = w.scaled(0.5f64.powi(squarings));
    let mut result = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&a).scaled(1.0 / k as f64);
        result.add_scaled(1.0, &term);
        if term.norm_one() <= f64::EPSILON * result.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Leading `k` left singular vectors of an arbitrary matrix, completed with
/// canonical directions when the matrix has fewer than `k` columns.
pub fn leading_left_singular_vectors(m: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    if k > m.rows() {
        return Err(Error::InvalidRank(format!(
            "{k} singular vectors requested from a matrix with {} rows",
            m.rows()
        )));
    }
    if m.rows() <= m.cols() {
        let svd = economy_svd(&m.transpose())?;
        Ok(svd.right.leading_columns(k))
    } else {
        let svd = economy_svd(m)?;
        Ok(complete_orthonormal(&svd.left, k))
    }
}

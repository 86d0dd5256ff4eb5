//! The gauge-free Euler step computed by alternating least squares.
//!
//! Each factor update maximizes `Tr[B_nᵀ V]` over matrices `V` with
//! orthonormal columns; the maximizer is the polar factor of `B_n`. The core
//! increment has a closed form given the factor increments. Both block
//! updates are exact minimizers of the defect, so the defect does not grow
//! from sweep to sweep when no regularization is used.

use crate::error::{Error, Result};
use crate::linalg::orthonormal_polar_factor;
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;
use crate::tucker::{embed_block, TuckerTensor};

use super::rhs::{Derivative, ProjectedDerivative, RhsProvider};
use super::{IntegratorConfig, StepReport, TangentIncrement};

/// How the defect `‖tangent − Ȧ‖` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitForm {
    /// Forms the difference explicitly: densely for a dense derivative,
    /// as a QR-orthonormalized Tucker sum for a Tucker derivative.
    Direct,
    /// Expanded inner products of small matrices. Cheap, but the square root
    /// of a difference of squares loses about half the digits once the
    /// defect is much smaller than the derivative.
    Gram,
}

/// Per-step quantities that do not change across sweeps.
pub(crate) struct StepContext<'a> {
    y: &'a TuckerTensor,
    adot: &'a Derivative,
    proj: ProjectedDerivative,
    unfolded: Vec<DenseMatrix>,
    /// `P_n C_(n)ᵀ`
    pc: Vec<DenseMatrix>,
    /// `C_(n) C_(n)ᵀ`
    cc: Vec<DenseMatrix>,
}

impl<'a> StepContext<'a> {
    pub(crate) fn new(y: &'a TuckerTensor, adot: &'a Derivative) -> Result<Self> {
        let proj = ProjectedDerivative::new(adot, y)?;
        let mut unfolded = Vec::with_capacity(y.order());
        let mut pc = Vec::with_capacity(y.order());
        let mut cc = Vec::with_capacity(y.order());
        for n in 0..y.order() {
            let c = y.core().unfold(n)?;
            pc.push(proj.partial[n].matmul_t(&c));
            cc.push(c.matmul_t(&c));
            unfolded.push(c);
        }
        Ok(Self {
            y,
            adot,
            proj,
            unfolded,
            pc,
            cc,
        })
    }

    pub(crate) fn derivative_norm(&self) -> f64 {
        self.proj.norm
    }

    pub(crate) fn projection(&self) -> &ProjectedDerivative {
        &self.proj
    }

    /// `𝒞 ×_k U_kᵀ ΔU_k`
    fn gauge_term(&self, k: usize, du: &DenseMatrix) -> Result<DenseTensor> {
        self.y
            .core()
            .mode_product(k, &self.y.factor(k).t_matmul(du))
    }

    fn core_delta(&self, du: &[DenseMatrix]) -> Result<DenseTensor> {
        let mut dc = self.proj.full.clone();
        for (k, u) in du.iter().enumerate() {
            dc.add_scaled(-1.0, &self.gauge_term(k, u)?)?;
        }
        Ok(dc)
    }

    fn assemble_bn(
        &self,
        n: usize,
        dc: &DenseTensor,
        du: &[DenseMatrix],
        h: f64,
        alpha: f64,
    ) -> Result<DenseMatrix> {
        let mut m = dc.clone();
        for (k, u) in du.iter().enumerate() {
            if k != n {
                m.add_scaled(1.0, &self.gauge_term(k, u)?)?;
            }
        }
        let mut inner = self.cc[n].scaled(1.0 / h);
        inner.add_scaled(-1.0, &m.unfold(n)?.matmul_t(&self.unfolded[n]));
        if alpha > 0.0 {
            for i in 0..inner.rows() {
                inner[(i, i)] += alpha / h;
            }
        }
        let mut b = self.pc[n].clone();
        b.add_scaled(1.0, &self.y.factor(n).matmul(&inner));
        Ok(b)
    }

    pub(crate) fn fit(&self, dc: &DenseTensor, du: &[DenseMatrix], form: FitForm) -> Result<f64> {
        check_increment(self.y, dc, du)?;
        let value = match form {
            FitForm::Direct => self.fit_direct(dc, du)?,
            FitForm::Gram => self.fit_gram(dc, du)?,
        };
        if !value.is_finite() {
            return Err(Error::NonFinite("defect"));
        }
        Ok(value)
    }

    fn fit_direct(&self, dc: &DenseTensor, du: &[DenseMatrix]) -> Result<f64> {
        let y = self.y;
        let d = y.order();
        let r = y.core().shape();
        let extra = match self.adot {
            Derivative::Dense(_) => None,
            Derivative::Tucker(a) => Some(a),
        };
        let block: Vec<usize> = (0..d)
            .map(|k| 2 * r[k] + extra.map_or(0, |a| a.core().shape()[k]))
            .collect();
        let mut core = DenseTensor::zeros(&block);
        embed_block(&mut core, dc, &vec![0; d], 1.0);
        for k in 0..d {
            let mut offsets = vec![0; d];
            offsets[k] = r[k];
            embed_block(&mut core, y.core(), &offsets, 1.0);
        }
        let mut factors: Vec<DenseMatrix> = (0..d).map(|k| y.factor(k).hcat(&du[k])).collect();
        match (self.adot, extra) {
            (_, Some(a)) => {
                let offsets: Vec<usize> = r.iter().map(|v| 2 * v).collect();
                embed_block(&mut core, a.core(), &offsets, -1.0);
                for (k, f) in factors.iter_mut().enumerate() {
                    *f = f.hcat(a.factor(k));
                }
                Ok(TuckerTensor::orthonormalized(core, factors)?.norm())
            }
            (Derivative::Dense(a), None) => {
                let mats: Vec<Option<&DenseMatrix>> = factors.iter().map(Some).collect();
                Ok(core.multi_mode_product(&mats)?.sub(a)?.norm())
            }
            (Derivative::Tucker(_), None) => unreachable!(),
        }
    }

    fn fit_gram(&self, dc: &DenseTensor, du: &[DenseMatrix]) -> Result<f64> {
        let a_norm = self.proj.norm;
        let mut sq = a_norm * a_norm + dc.inner(dc)? - 2.0 * self.proj.full.inner(dc)?;
        let mut s_sum = DenseTensor::zeros(dc.shape());
        let mut s_sq = 0.0;
        for (k, u) in du.iter().enumerate() {
            sq += u.t_matmul(u).inner(&self.cc[k]);
            sq -= 2.0 * self.pc[k].inner(u);
            let s = self.gauge_term(k, u)?;
            sq += 2.0 * dc.inner(&s)?;
            s_sq += s.inner(&s)?;
            s_sum.add_scaled(1.0, &s)?;
        }
        sq += s_sum.inner(&s_sum)? - s_sq;
        Ok(sq.max(0.0).sqrt())
    }

    fn relative(&self, defect: f64) -> f64 {
        if self.proj.norm > 0.0 {
            defect / self.proj.norm
        } else {
            defect
        }
    }
}

fn check_increment(y: &TuckerTensor, dc: &DenseTensor, du: &[DenseMatrix]) -> Result<()> {
    if dc.shape() != y.core().shape() || du.len() != y.order() {
        return Err(Error::ShapeMismatch(
            "increment does not match the base point".into(),
        ));
    }
    for (k, u) in du.iter().enumerate() {
        let f = y.factor(k);
        if u.rows() != f.rows() || u.cols() != f.cols() {
            return Err(Error::ShapeMismatch(format!(
                "factor increment {k} is {}x{}, expected {}x{}",
                u.rows(),
                u.cols(),
                f.rows(),
                f.cols()
            )));
        }
    }
    Ok(())
}

fn check_factor_increments(y: &TuckerTensor, du: &[DenseMatrix]) -> Result<()> {
    check_increment(y, &DenseTensor::zeros(y.core().shape()), du)
}

/// `Δ𝒞 = Ȧ ×_k U_kᵀ − Σ_k 𝒞 ×_k U_kᵀ ΔU_k`, the defect-minimizing core
/// increment for fixed factor increments.
pub fn core_delta(
    adot: &Derivative,
    y: &TuckerTensor,
    delta_factors: &[DenseMatrix],
) -> Result<DenseTensor> {
    check_factor_increments(y, delta_factors)?;
    StepContext::new(y, adot)?.core_delta(delta_factors)
}

/// The matrix `B_n` whose polar factor is the updated factor `U_n^h`.
pub fn assemble_bn(
    n: usize,
    adot: &Derivative,
    y: &TuckerTensor,
    inc: &TangentIncrement,
    h: f64,
    alpha: f64,
) -> Result<DenseMatrix> {
    if n >= y.order() {
        return Err(Error::ModeOutOfRange {
            mode: n,
            order: y.order(),
        });
    }
    if !(h > 0.0) || !(alpha >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need h > 0 and alpha >= 0, got h = {h}, alpha = {alpha}"
        )));
    }
    check_increment(y, &inc.delta_core, &inc.delta_factors)?;
    StepContext::new(y, adot)?.assemble_bn(n, &inc.delta_core, &inc.delta_factors, h, alpha)
}

/// `U_n^h` as the maximizer of `Tr[B_nᵀ V]` over orthonormal `V`.
pub fn factor_update(b: &DenseMatrix) -> Result<DenseMatrix> {
    orthonormal_polar_factor(b)
}

/// `‖Δ𝒞 ×_k U_k + Σ_k 𝒞 ×_k ΔU_k ×_{l≠k} U_l − Ȧ‖`.
pub fn fit_norm(
    y: &TuckerTensor,
    inc: &TangentIncrement,
    adot: &Derivative,
    form: FitForm,
) -> Result<f64> {
    StepContext::new(y, adot)?.fit(&inc.delta_core, &inc.delta_factors, form)
}

/// One Euler step with a given derivative and step size.
///
/// Returns the new point, the report and the final factor increments.
pub(crate) fn euler_step_with(
    y: &TuckerTensor,
    adot: &Derivative,
    h: f64,
    alpha: f64,
    cfg: &IntegratorConfig,
    initial: Option<&[DenseMatrix]>,
) -> Result<(TuckerTensor, StepReport, Vec<DenseMatrix>)> {
    let ctx = StepContext::new(y, adot)?;
    let d = y.order();
    let mut du: Vec<DenseMatrix> = match initial {
        Some(init) => {
            check_factor_increments(y, init)?;
            init.to_vec()
        }
        None => y
            .factors()
            .iter()
            .map(|u| DenseMatrix::zeros(u.rows(), u.cols()))
            .collect(),
    };
    let mut dc = ctx.core_delta(&du)?;
    let initial_defect = ctx.fit(&dc, &du, FitForm::Direct)?;
    let mut factors: Vec<DenseMatrix> = y.factors().to_vec();
    let mut history = Vec::new();
    // Rounding in (V − U)/h sets a level below which changes are noise.
    let noise = 10.0 * f64::EPSILON * (ctx.derivative_norm() + y.norm() / h);
    let mut prev = initial_defect;
    let mut current = initial_defect;
    for _ in 0..cfg.max_sweeps {
        for n in 0..d {
            let b = ctx.assemble_bn(n, &dc, &du, h, alpha)?;
            let v = factor_update(&b)?;
            let mut step = v.sub(y.factor(n));
            step = step.scaled(1.0 / h);
            du[n] = step;
            factors[n] = v;
        }
        dc = ctx.core_delta(&du)?;
        current = ctx.fit(&dc, &du, FitForm::Direct).map_err(|_| {
            Error::Breakdown(format!(
                "non-finite defect after sweep {}",
                history.len() + 1
            ))
        })?;
        history.push(ctx.relative(current));
        let change = (current - prev).abs();
        let converged = change < cfg.fit_tolerance * prev.max(f64::EPSILON) || change <= noise;
        prev = current;
        if converged {
            break;
        }
    }
    let mut core = y.core().clone();
    core.add_scaled(h, &dc)?;
    if !core.is_finite() {
        return Err(Error::Breakdown("non-finite core after the step".into()));
    }
    let next = TuckerTensor::new(core, factors)?;
    let report = StepReport {
        sweeps: history.len(),
        relative_defect: ctx.relative(current),
        initial_relative_defect: ctx.relative(initial_defect),
        defect_history: history,
        alpha,
    };
    Ok((next, report, du))
}

/// One explicit Euler step `t → t + h` by alternating least squares.
pub fn als_euler_step(
    y: &TuckerTensor,
    t: f64,
    rhs: &dyn RhsProvider,
    cfg: &IntegratorConfig,
) -> Result<(TuckerTensor, StepReport)> {
    cfg.validate()?;
    let adot = rhs.derivative_at(t, y)?;
    let h = cfg.step_size;
    let alpha = cfg.regularization.alpha(h);
    euler_step_with(y, &adot, h, alpha, cfg, None).map(|(next, report, _)| (next, report))
}

//! Explicit Euler on the gauged system, where `U_kᵀ U̇_k = 0` and
//!
//! ```text
//! U̇_n = (I − U_n U_nᵀ) [Ȧ ×_{k≠n} U_kᵀ]_(n) C_(n)ᵀ (C_(n) C_(n)ᵀ)⁻¹
//! Ċ   = Ȧ ×_k U_kᵀ
//! ```
//!
//! The inverse Gram matrix makes this scheme fragile when the core has tiny
//! singular values, which is the point of keeping it around as a baseline.

use crate::error::{Error, Result};
use crate::linalg::pseudo_inverse_gram;
use crate::tucker::TuckerTensor;

use super::als::{FitForm, StepContext};
use super::rhs::RhsProvider;
use super::StepReport;

/// One gauged Euler step; factors are re-orthonormalized by QR afterwards.
///
/// Fails with [`Error::SingularGram`] when some `C_(n) C_(n)ᵀ` is too badly
/// conditioned to invert.
pub fn gauged_reference_step<R: RhsProvider + ?Sized>(
    y: &TuckerTensor,
    t: f64,
    rhs: &R,
    h: f64,
) -> Result<(TuckerTensor, StepReport)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "step size must be positive, got {h}"
        )));
    }
    let adot = rhs.derivative_at(t, y)?;
    let ctx = StepContext::new(y, &adot)?;
    let proj = ctx.projection();
    let mut du = Vec::with_capacity(y.order());
    for n in 0..y.order() {
        let pinv = pseudo_inverse_gram(&y.core().unfold(n)?)?;
        let w = proj.partial[n].matmul(&pinv);
        let u = y.factor(n);
        du.push(w.sub(&u.matmul(&u.t_matmul(&w))));
    }
    let dc = proj.full.clone();
    let defect = ctx.fit(&dc, &du, FitForm::Direct)?;
    let relative = if ctx.derivative_norm() > 0.0 {
        defect / ctx.derivative_norm()
    } else {
        defect
    };

    let mut core = y.core().clone();
    core.add_scaled(h, &dc)?;
    let factors = y
        .factors()
        .iter()
        .zip(&du)
        .map(|(u, d)| {
            let mut f = u.clone();
            f.add_scaled(h, d);
            f
        })
        .collect();
    let next = TuckerTensor::orthonormalized(core, factors)?;
    if !next.is_finite() {
        return Err(Error::Breakdown(
            "non-finite state after gauged step".into(),
        ));
    }
    let report = StepReport {
        sweeps: 1,
        relative_defect: relative,
        initial_relative_defect: relative,
        defect_history: vec![relative],
        alpha: 0.0,
    };
    Ok((next, report))
}

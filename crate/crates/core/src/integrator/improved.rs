//! Improved Euler (explicit midpoint) built from two ALS Euler steps.

use crate::error::Result;
use crate::matrix::DenseMatrix;
use crate::tucker::TuckerTensor;

use super::als::euler_step_with;
use super::rhs::RhsProvider;
use super::{IntegratorConfig, StepReport};

/// A half step to `t + h/2`, a derivative evaluation there, and a full step
/// from `Y` with that derivative. Each stage uses the regularization weight
/// of its own step size. The report describes the full step.
pub fn improved_euler_step(
    y: &TuckerTensor,
    t: f64,
    rhs: &dyn RhsProvider,
    cfg: &IntegratorConfig,
) -> Result<(TuckerTensor, StepReport)> {
    cfg.validate()?;
    improved_step_with(y, t, rhs, cfg, None).map(|(next, report, _)| (next, report))
}

pub(crate) fn improved_step_with<R: RhsProvider + ?Sized>(
    y: &TuckerTensor,
    t: f64,
    rhs: &R,
    cfg: &IntegratorConfig,
    initial: Option<&[DenseMatrix]>,
) -> Result<(TuckerTensor, StepReport, Vec<DenseMatrix>)> {
    let h = cfg.step_size;
    let half = 0.5 * h;
    let a0 = rhs.derivative_at(t, y)?;
    let (y_half, _, _) =
        euler_step_with(y, &a0, half, cfg.regularization.alpha(half), cfg, initial)?;
    let a1 = rhs.derivative_at(t + half, &y_half)?;
    euler_step_with(y, &a1, h, cfg.regularization.alpha(h), cfg, initial)
}

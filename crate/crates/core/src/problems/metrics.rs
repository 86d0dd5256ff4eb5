//! Error measures against references.

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;
use crate::tucker::{tucker_sum, TuckerTensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub relative_error: f64,
    pub relative_defect: f64,
}

/// `‖A − Y‖ / ‖A‖`; `‖Y‖` when `A = 0`.
pub fn relative_error(y: &TuckerTensor, reference: &DenseTensor) -> Result<f64> {
    if y.shape() != reference.shape() {
        return Err(Error::ShapeMismatch(format!(
            "state {:?} against reference {:?}",
            y.shape(),
            reference.shape()
        )));
    }
    let diff = y.to_full().sub(reference)?.norm();
    let scale = reference.norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Same as [`relative_error`] with a Tucker reference; the difference is
/// formed as a Tucker sum.
pub fn relative_error_tucker(y: &TuckerTensor, reference: &TuckerTensor) -> Result<f64> {
    let diff = tucker_sum(&[y, reference], &[1.0, -1.0])?.norm();
    let scale = reference.norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

pub fn error_metrics(
    y: &TuckerTensor,
    reference: &DenseTensor,
    relative_defect: f64,
) -> Result<ErrorMetrics> {
    Ok(ErrorMetrics {
        relative_error: relative_error(y, reference)?,
        relative_defect,
    })
}

/// Least-squares slope of `log err` against `log h`.
pub fn fitted_slope(hs: &[f64], errors: &[f64]) -> Result<f64> {
    if hs.len() != errors.len() || hs.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "slope needs at least two matching points, got {} and {}",
            hs.len(),
            errors.len()
        )));
    }
    if hs
        .iter()
        .chain(errors)
        .any(|v| !(*v > 0.0 && v.is_finite()))
    {
        return Err(Error::NonFinite("slope data"));
    }
    let x: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("step sizes must differ".into()));
    }
    Ok(sxy / sxx)
}

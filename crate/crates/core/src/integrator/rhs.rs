//! Derivative values and their projections onto the current factors.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;
use crate::tucker::{project_all_but, TuckerTensor};

/// A derivative `Ȧ(t)` or `F(t, Y)`, dense or in Tucker form.
#[derive(Debug, Clone, PartialEq)]
pub enum Derivative {
    Dense(DenseTensor),
    Tucker(TuckerTensor),
}

impl Derivative {
    pub fn shape(&self) -> &[usize] {
        match self {
            Derivative::Dense(a) => a.shape(),
            Derivative::Tucker(a) => a.shape(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Derivative::Dense(a) => a.norm(),
            Derivative::Tucker(a) => a.norm(),
        }
    }

    pub fn to_dense(&self) -> DenseTensor {
        match self {
            Derivative::Dense(a) => a.clone(),
            Derivative::Tucker(a) => a.to_full(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Derivative::Dense(a) => a.is_finite(),
            Derivative::Tucker(a) => a.is_finite(),
        }
    }
}

/// Source of derivative values for the integrators.
///
/// Data problems ignore `y`; ODE problems evaluate `F(t, y)`.
pub trait RhsProvider {
    fn derivative_at(&self, t: f64, y: &TuckerTensor) -> Result<Derivative>;
}

impl<F> RhsProvider for F
where
    F: Fn(f64, &TuckerTensor) -> Result<Derivative>,
{
    fn derivative_at(&self, t: f64, y: &TuckerTensor) -> Result<Derivative> {
        self(t, y)
    }
}

/// Contractions of a derivative against the factors of a base point.
///
/// `partial[n] = [Ȧ ×_{k≠n} U_kᵀ]_(n)` and `full = Ȧ ×_k U_kᵀ`. For a Tucker
/// derivative `𝒟 ×_k V_k` these are formed from the small matrices
/// `U_kᵀ V_k` without densifying.
#[derive(Debug, Clone)]
pub struct ProjectedDerivative {
    pub partial: Vec<DenseMatrix>,
    pub full: DenseTensor,
    pub norm: f64,
}

impl ProjectedDerivative {
    pub fn new(adot: &Derivative, y: &TuckerTensor) -> Result<Self> {
        if adot.shape() != y.shape() {
            return Err(Error::ShapeMismatch(format!(
                "derivative shape {:?} against base shape {:?}",
                adot.shape(),
                y.shape()
            )));
        }
        if !adot.is_finite() {
            return Err(Error::NonFinite("derivative"));
        }
        let d = y.order();
        let mut partial = Vec::with_capacity(d);
        match adot {
            Derivative::Dense(a) => {
                for n in 0..d {
                    partial.push(project_all_but(a, y.factors(), Some(n))?.unfold(n)?);
                }
            }
            Derivative::Tucker(a) => {
                let cross: Vec<DenseMatrix> = y
                    .factors()
                    .iter()
                    .zip(a.factors())
                    .map(|(u, v)| u.t_matmul(v))
                    .collect();
                for n in 0..d {
                    let mats: Vec<Option<&DenseMatrix>> = cross
                        .iter()
                        .enumerate()
                        .map(|(k, w)| if k == n { None } else { Some(w) })
                        .collect();
                    let z = a.core().multi_mode_product(&mats)?;
                    partial.push(a.factor(n).matmul(&z.unfold(n)?));
                }
            }
        }
        let full = DenseTensor::fold(&y.factor(0).t_matmul(&partial[0]), 0, y.core().shape())?;
        Ok(Self {
            partial,
            full,
            norm: adot.norm(),
        })
    }
}

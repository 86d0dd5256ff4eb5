//! `A(t) = eᵗ 𝒞 ×_k exp(t W_k)` with a superdiagonal core whose entries decay
//! like `2^{−(d−1) j}` and random skew-symmetric `W_k`.
//!
//! The mode-k singular values of `A(t)` are `eᵗ c_j` for all `t`, so ranks
//! well above the numerical rank give cores with tiny singular values.

use crate::error::Result;
use crate::integrator::{Derivative, RhsProvider};
use crate::linalg::matrix_exponential;
use crate::matrix::DenseMatrix;
use crate::random::{random_skew, seeded};
use crate::tensor::DenseTensor;
use crate::tucker::{hooi, HooiOptions, TuckerTensor};

use super::{ClosedForm, Problem, ProblemKind, ProblemParams, ReferenceTrack};

#[derive(Debug, Clone)]
pub struct RotatingDecayProblem {
    shape: Vec<usize>,
    diagonal: Vec<f64>,
    core: DenseTensor,
    generators: Vec<DenseMatrix>,
    min_rank: usize,
    initial: TuckerTensor,
}

impl RotatingDecayProblem {
    pub fn new(params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        let shape = params.shape();
        let d = params.dim;
        let diagonal: Vec<f64> = (1..=params.size)
            .map(|j| 2f64.powi(-((d - 1) as i32) * j as i32))
            .collect();
        let mut core = DenseTensor::zeros(&shape);
        for (j, &c) in diagonal.iter().enumerate() {
            core.set(&vec![j; d], c);
        }
        let mut rng = seeded(params.seed);
        let generators = (0..d)
            .map(|_| random_skew(&mut rng, params.size, 1.0))
            .collect();
        let initial = hooi(&core, &params.ranks, HooiOptions::default())?;
        let min_rank = params.ranks.as_slice().iter().copied().min().unwrap_or(0);
        Ok(Self {
            shape,
            diagonal,
            core,
            generators,
            min_rank,
            initial,
        })
    }

    pub fn generators(&self) -> &[DenseMatrix] {
        &self.generators
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn data(&self, t: f64) -> Result<DenseTensor> {
        let mut a = self.core.scaled(t.exp());
        for (k, w) in self.generators.iter().enumerate() {
            let q = matrix_exponential(&w.scaled(t))?;
            a = a.mode_product(k, &q)?;
        }
        Ok(a)
    }

    /// `Ȧ = A + Σ_k A ×_k W_k`.
    pub fn derivative(&self, t: f64) -> Result<DenseTensor> {
        let a = self.data(t)?;
        let mut out = a.clone();
        for (k, w) in self.generators.iter().enumerate() {
            out.add_scaled(1.0, &a.mode_product(k, w)?)?;
        }
        Ok(out)
    }

    /// `Σ_{j>r} c_j / ‖c‖` for the smallest rank of the run; time independent.
    pub fn tail_ratio(&self) -> f64 {
        let norm = self.diagonal.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.diagonal.iter().skip(self.min_rank).sum::<f64>() / norm
    }
}

impl RhsProvider for RotatingDecayProblem {
    fn derivative_at(&self, t: f64, _y: &TuckerTensor) -> Result<Derivative> {
        Ok(Derivative::Dense(self.derivative(t)?))
    }
}

impl Problem for RotatingDecayProblem {
    fn kind(&self) -> ProblemKind {
        ProblemKind::RotatingDecay
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn initial_state(&self) -> &TuckerTensor {
        &self.initial
    }

    fn reference(&self) -> Option<Box<dyn ReferenceTrack + '_>> {
        Some(Box::new(ClosedForm(move |t| self.data(t))))
    }

    fn model_accuracy(&self, _t: f64) -> Option<f64> {
        Some(self.tail_ratio())
    }
}

//! `A(t) = eᵗ ℬ ×_k U_k + ε (1 + t + sin 3t) 𝒞`: a low-rank tensor growing
//! exponentially plus a full-rank perturbation of size ε.

use crate::error::Result;
use crate::integrator::{Derivative, RhsProvider};
use crate::random::{gaussian_tensor, random_orthonormal, seeded};
use crate::tensor::DenseTensor;
use crate::tucker::{hooi, HooiOptions, TuckerTensor};

use super::{ClosedForm, Problem, ProblemKind, ProblemParams, ReferenceTrack};

#[derive(Debug, Clone)]
pub struct KochLubichProblem {
    shape: Vec<usize>,
    eps: f64,
    /// `ℬ ×_k U_k`, with inner rank equal to the run rank.
    low_rank: DenseTensor,
    perturbation: DenseTensor,
    initial: TuckerTensor,
}

impl KochLubichProblem {
    pub fn new(params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        let shape = params.shape();
        let ranks = params.ranks.as_slice();
        let mut rng = seeded(params.seed);
        let factors: Vec<_> = shape
            .iter()
            .zip(ranks)
            .map(|(&n, &r)| random_orthonormal(&mut rng, n, r))
            .collect();
        let core = gaussian_tensor(&mut rng, ranks);
        let perturbation = gaussian_tensor(&mut rng, &shape);
        let low_rank = TuckerTensor::new(core, factors)?.to_full();
        let mut problem = Self {
            shape,
            eps: params.eps,
            low_rank,
            perturbation,
            initial: TuckerTensor::zeros(&params.shape(), &params.ranks)?,
        };
        problem.initial = hooi(&problem.data(0.0), &params.ranks, HooiOptions::default())?;
        Ok(problem)
    }

    pub fn data(&self, t: f64) -> DenseTensor {
        let mut a = self.low_rank.scaled(t.exp());
        a.add_scaled(self.eps * (1.0 + t + (3.0 * t).sin()), &self.perturbation)
            .expect("same shape");
        a
    }

    /// `Ȧ(t)` differentiated in closed form.
    pub fn derivative(&self, t: f64) -> DenseTensor {
        let mut a = self.low_rank.scaled(t.exp());
        a.add_scaled(self.eps * (1.0 + 3.0 * (3.0 * t).cos()), &self.perturbation)
            .expect("same shape");
        a
    }

    /// The same derivative written as the linear ODE `Ȧ = A + ε(3cos 3t − sin 3t − t) 𝒞`.
    pub fn ode_rhs(&self, t: f64, a: &DenseTensor) -> DenseTensor {
        let mut out = a.clone();
        let c = self.eps * (3.0 * (3.0 * t).cos() - (3.0 * t).sin() - t);
        out.add_scaled(c, &self.perturbation).expect("same shape");
        out
    }

    pub fn perturbation(&self) -> &DenseTensor {
        &self.perturbation
    }
}

impl RhsProvider for KochLubichProblem {
    fn derivative_at(&self, t: f64, _y: &TuckerTensor) -> Result<Derivative> {
        Ok(Derivative::Dense(self.derivative(t)))
    }
}

impl Problem for KochLubichProblem {
    fn kind(&self) -> ProblemKind {
        ProblemKind::KochLubich
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn initial_state(&self) -> &TuckerTensor {
        &self.initial
    }

    fn reference(&self) -> Option<Box<dyn ReferenceTrack + '_>> {
        Some(Box::new(ClosedForm(move |t| Ok(self.data(t)))))
    }
}

//! Reaction–diffusion `u_t = 0.01 Δu + 0.1 u³` with Dirichlet boundary.
//!
//! The cubic term is formed by two exact Hadamard products, whose rank is
//! the cube of the state rank, and then recompressed to the state rank by
//! HOOI on the small core.

use crate::error::Result;
use crate::integrator::{Derivative, RhsProvider};
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;
use crate::tucker::{
    apply_kron_sum_operator, recompress, tucker_hadamard, tucker_sum, HooiOptions, RankVector,
    TuckerTensor,
};

use super::pde::{
    apply_laplacian_dense, diffusion_operators, grid_points, padded_rank_one, reference_step,
    DenseRk4,
};
use super::{Problem, ProblemKind, ProblemParams, ReferenceTrack, DENSE_REFERENCE_LIMIT};

pub const REACTION_DIFFUSIVITY: f64 = 0.01;
pub const REACTION_RATE: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ReactionDiffusionProblem {
    shape: Vec<usize>,
    size: usize,
    ranks: RankVector,
    operators: Vec<DenseMatrix>,
    initial: TuckerTensor,
}

impl ReactionDiffusionProblem {
    pub fn new(params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        let shape = params.shape();
        let bump: Vec<f64> = grid_points(params.size)
            .into_iter()
            .map(|x| (-100.0 * (x - 0.5) * (x - 0.5)).exp())
            .collect();
        let scale = 10.0 * params.dim as f64;
        let initial = padded_rank_one(&vec![bump; params.dim], scale, &params.ranks, params.seed)?;
        Ok(Self {
            operators: diffusion_operators(&shape, REACTION_DIFFUSIVITY),
            shape,
            size: params.size,
            ranks: params.ranks.clone(),
            initial,
        })
    }

    /// `Y ⊙ Y ⊙ Y` recompressed to the state rank.
    pub fn cubic_term(&self, y: &TuckerTensor) -> Result<TuckerTensor> {
        let square = tucker_hadamard(y, y)?;
        let cube = tucker_hadamard(&square, y)?;
        recompress(&cube, &self.ranks, HooiOptions::default())
    }

    pub fn dense_rhs(&self, x: &DenseTensor) -> DenseTensor {
        let mut out = apply_laplacian_dense(x).scaled(REACTION_DIFFUSIVITY);
        for (o, v) in out.data_mut().iter_mut().zip(x.data()) {
            *o += REACTION_RATE * v * v * v;
        }
        out
    }
}

impl RhsProvider for ReactionDiffusionProblem {
    fn derivative_at(&self, _t: f64, y: &TuckerTensor) -> Result<Derivative> {
        let diffusion = apply_kron_sum_operator(&self.operators, y)?;
        let cubic = self.cubic_term(y)?;
        Ok(Derivative::Tucker(tucker_sum(
            &[&diffusion, &cubic],
            &[1.0, REACTION_RATE],
        )?))
    }
}

impl Problem for ReactionDiffusionProblem {
    fn kind(&self) -> ProblemKind {
        ProblemKind::ReactionDiffusion
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn initial_state(&self) -> &TuckerTensor {
        &self.initial
    }

    fn reference(&self) -> Option<Box<dyn ReferenceTrack + '_>> {
        if self.shape.iter().product::<usize>() > DENSE_REFERENCE_LIMIT {
            return None;
        }
        let step = reference_step(self.size, self.shape.len(), REACTION_DIFFUSIVITY);
        Some(Box::new(DenseRk4::new(
            move |_, x: &DenseTensor| self.dense_rhs(x),
            self.initial.to_full(),
            step,
        )))
    }
}

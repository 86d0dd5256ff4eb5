//! Heat equation `u_t = 0.01 Δu + s(t, x)` on the unit cube with Dirichlet
//! boundary, semi-discretized by central differences. The source
//! `s = ∏_k x_k e^{−t x_k}` is separable and enters as an exact rank-1 term.

use crate::error::Result;
use crate::integrator::{Derivative, RhsProvider};
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;
use crate::tucker::{apply_kron_sum_operator, tucker_sum, TuckerTensor};

use super::pde::{
    apply_laplacian_dense, diffusion_operators, grid_points, padded_rank_one, reference_step,
    DenseRk4,
};
use super::{Problem, ProblemKind, ProblemParams, ReferenceTrack, DENSE_REFERENCE_LIMIT};

pub const HEAT_DIFFUSIVITY: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct HeatSourceProblem {
    shape: Vec<usize>,
    size: usize,
    operators: Vec<DenseMatrix>,
    with_source: bool,
    initial: TuckerTensor,
}

fn gaussian_bump(size: usize) -> Vec<f64> {
    grid_points(size)
        .into_iter()
        .map(|x| (-100.0 * (x - 0.5) * (x - 0.5)).exp())
        .collect()
}

impl HeatSourceProblem {
    pub fn new(params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        let shape = params.shape();
        let bumps = vec![gaussian_bump(params.size); params.dim];
        let initial = padded_rank_one(&bumps, 1.0, &params.ranks, params.seed)?;
        Ok(Self {
            operators: diffusion_operators(&shape, HEAT_DIFFUSIVITY),
            shape,
            size: params.size,
            with_source: true,
            initial,
        })
    }

    /// The same problem with the source switched off.
    pub fn without_source(mut self) -> Self {
        self.with_source = false;
        self
    }

    fn source_profile(&self, t: f64) -> Vec<f64> {
        grid_points(self.size)
            .into_iter()
            .map(|x| x * (-t * x).exp())
            .collect()
    }

    /// The source at time `t` as a rank-1 Tucker tensor.
    pub fn source(&self, t: f64) -> Result<TuckerTensor> {
        let u = self.source_profile(t);
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let col = DenseMatrix::from_col_major(self.size, 1, u.iter().map(|v| v / norm).collect())?;
        let d = self.shape.len();
        let core = DenseTensor::filled(&vec![1; d], norm.powi(d as i32));
        TuckerTensor::new(core, vec![col; d])
    }

    fn dense_source(&self, t: f64) -> DenseTensor {
        let u = self.source_profile(t);
        DenseTensor::from_fn(&self.shape, |idx| idx.iter().map(|&i| u[i]).product())
    }

    /// `F(t, X)` on a dense grid function.
    pub fn dense_rhs(&self, t: f64, x: &DenseTensor) -> DenseTensor {
        let mut out = apply_laplacian_dense(x).scaled(HEAT_DIFFUSIVITY);
        if self.with_source {
            out.add_scaled(1.0, &self.dense_source(t))
                .expect("same shape");
        }
        out
    }
}

impl RhsProvider for HeatSourceProblem {
    fn derivative_at(&self, t: f64, y: &TuckerTensor) -> Result<Derivative> {
        let diffusion = apply_kron_sum_operator(&self.operators, y)?;
        if !self.with_source {
            return Ok(Derivative::Tucker(diffusion));
        }
        let s = self.source(t)?;
        Ok(Derivative::Tucker(tucker_sum(
            &[&diffusion, &s],
            &[1.0, 1.0],
        )?))
    }
}

impl Problem for HeatSourceProblem {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Heat
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
        let step = reference_step(self.size, self.shape.len(), HEAT_DIFFUSIVITY);
        Some(Box::new(DenseRk4::new(
            move |t, x: &DenseTensor| self.dense_rhs(t, x),
            self.initial.to_full(),
            step,
        )))
    }
}

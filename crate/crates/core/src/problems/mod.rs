//! Test problems: two data-driven tensors with known derivatives and two
//! semi-discretized PDEs.

pub mod heat;
pub mod koch_lubich;
pub mod metrics;
pub mod pde;
pub mod reaction;
pub mod rotating;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::RhsProvider;
use crate::tensor::DenseTensor;
use crate::tucker::{RankVector, TuckerTensor};

pub use heat::HeatSourceProblem;
pub use koch_lubich::KochLubichProblem;
pub use metrics::{
    error_metrics, fitted_slope, relative_error, relative_error_tucker, ErrorMetrics,
};
pub use reaction::ReactionDiffusionProblem;
pub use rotating::RotatingDecayProblem;

/// Largest number of grid points for which dense references are computed.
pub const DENSE_REFERENCE_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProblemKind {
    KochLubich,
    RotatingDecay,
    Heat,
    ReactionDiffusion,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [
        ProblemKind::KochLubich,
        ProblemKind::RotatingDecay,
        ProblemKind::Heat,
        ProblemKind::ReactionDiffusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::KochLubich => "koch-lubich",
            ProblemKind::RotatingDecay => "rotating",
            ProblemKind::Heat => "heat",
            ProblemKind::ReactionDiffusion => "reaction",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown experiment {s:?}; expected koch-lubich, rotating, heat or reaction"
                ))
            })
    }
}

impl TryFrom<String> for ProblemKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ProblemKind> for String {
    fn from(k: ProblemKind) -> String {
        k.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub kind: ProblemKind,
    pub dim: usize,
    /// Mode size `I`, the same in every mode.
    pub size: usize,
    pub ranks: RankVector,
    /// Perturbation level; only used by the Koch–Lubich data.
    pub eps: f64,
    pub seed: u64,
}

impl ProblemParams {
    pub fn shape(&self) -> Vec<usize> {
        vec![self.size; self.dim]
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidConfig(format!(
                "dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if self.size == 0 {
            return Err(Error::InvalidConfig("mode size must be positive".into()));
        }
        self.ranks.check_against(&self.shape())?;
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eps must be nonnegative, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Exact or high-accuracy reference values at nondecreasing times.
pub trait ReferenceTrack {
    fn at(&mut self, t: f64) -> Result<DenseTensor>;
}

/// A problem instance: right-hand side, initial state and reference.
pub trait Problem: RhsProvider {
    fn kind(&self) -> ProblemKind;

    fn shape(&self) -> &[usize];

    fn initial_state(&self) -> &TuckerTensor;

    /// `None` when no reference is available at this size.
    fn reference(&self) -> Option<Box<dyn ReferenceTrack + '_>>;

    /// Relative error floor of the best rank-`r` approximation, where known.
    fn model_accuracy(&self, _t: f64) -> Option<f64> {
        None
    }
}

/// Reference track backed by a closed-form solution.
pub struct ClosedForm<F>(pub F);

impl<F: FnMut(f64) -> Result<DenseTensor>> ReferenceTrack for ClosedForm<F> {
    fn at(&mut self, t: f64) -> Result<DenseTensor> {
        (self.0)(t)
    }
}

/// The reference track, or [`Error::Infeasible`] when the grid is too large.
pub fn require_reference(p: &dyn Problem) -> Result<Box<dyn ReferenceTrack + '_>> {
    p.reference().ok_or_else(|| {
        Error::Infeasible(format!(
            "no reference for shape {:?} (dense limit {DENSE_REFERENCE_LIMIT} points)",
            p.shape()
        ))
    })
}

pub fn build_problem(params: &ProblemParams) -> Result<Box<dyn Problem>> {
    params.validate()?;
    Ok(match params.kind {
        ProblemKind::KochLubich => Box::new(KochLubichProblem::new(params)?),
        ProblemKind::RotatingDecay => Box::new(RotatingDecayProblem::new(params)?),
        ProblemKind::Heat => Box::new(HeatSourceProblem::new(params)?),
        ProblemKind::ReactionDiffusion => Box::new(ReactionDiffusionProblem::new(params)?),
    })
}

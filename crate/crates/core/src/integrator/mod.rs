//! Time integration on the manifold of fixed Tucker rank.
//!
//! The tangent increment is parameterized by a core increment `Δ𝒞` and
//! factor increments `ΔU_k` without any gauge condition; the factors after a
//! step are kept orthonormal by construction instead.

pub mod als;
pub mod gauged;
pub mod improved;
pub mod rhs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

pub use als::{als_euler_step, assemble_bn, core_delta, factor_update, fit_norm, FitForm};
pub use gauged::gauged_reference_step;
pub use improved::improved_euler_step;
pub use rhs::{Derivative, ProjectedDerivative, RhsProvider};

/// Tikhonov weight on the factor increments.
///
/// Text form: `off`, `h2`, or a nonnegative number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Regularization {
    Off,
    /// `α = h²` for the step size `h` in use.
    StepSquared,
    Fixed(f64),
}

impl Regularization {
    pub fn alpha(self, h: f64) -> f64 {
        match self {
            Regularization::Off => 0.0,
            Regularization::StepSquared => h * h,
            Regularization::Fixed(a) => a,
        }
    }
}

impl fmt::Display for Regularization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularization::Off => f.write_str("off"),
            Regularization::StepSquared => f.write_str("h2"),
            Regularization::Fixed(a) => write!(f, "{a:?}"),
        }
    }
}

impl FromStr for Regularization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "off" | "none" => Ok(Regularization::Off),
            "h2" | "h^2" | "alpha=h2" | "alpha=h^2" => Ok(Regularization::StepSquared),
            other => {
                let v = other.strip_prefix("alpha=").unwrap_or(other);
                match v.parse::<f64>() {
                    Ok(a) if a >= 0.0 && a.is_finite() => Ok(Regularization::Fixed(a)),
                    _ => Err(Error::InvalidConfig(format!(
                        "regularization must be off, h2 or a nonnegative number, got {s:?}"
                    ))),
                }
            }
        }
    }
}

impl TryFrom<String> for Regularization {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Regularization> for String {
    fn from(r: Regularization) -> String {
        r.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    Euler,
    ImprovedEuler,
    /// Explicit Euler on the gauged system; a baseline for comparisons.
    Gauged,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Euler, Scheme::ImprovedEuler, Scheme::Gauged];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::ImprovedEuler => "improved-euler",
            Scheme::Gauged => "gauged-reference",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown scheme {s:?}; expected euler, improved-euler or gauged-reference"
                ))
            })
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub step_size: f64,
    /// Relative change of the defect below which the sweeps stop.
    pub fit_tolerance: f64,
    pub max_sweeps: usize,
    pub regularization: Regularization,
    pub scheme: Scheme,
}

impl IntegratorConfig {
    /// Explicit Euler, no regularization, tolerance `1e-5`, ten sweeps.
    pub fn new(step_size: f64) -> Self {
        Self {
            step_size,
            fit_tolerance: 1e-5,
            max_sweeps: 10,
            regularization: Regularization::Off,
            scheme: Scheme::Euler,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if !(self.fit_tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "fit tolerance must be nonnegative, got {}",
                self.fit_tolerance
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        if let Regularization::Fixed(a) = self.regularization {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "regularization weight must be nonnegative, got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Discrete tangent increment `(Δ𝒞, ΔU_1, …, ΔU_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentIncrement {
    pub delta_core: DenseTensor,
    pub delta_factors: Vec<DenseMatrix>,
}

impl TangentIncrement {
    pub fn zeros(y: &TuckerTensor) -> Self {
        Self {
            delta_core: DenseTensor::zeros(y.core().shape()),
            delta_factors: y
                .factors()
                .iter()
                .map(|u| DenseMatrix::zeros(u.rows(), u.cols()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub sweeps: usize,
    /// Defect divided by the derivative norm, after the last sweep.
    pub relative_defect: f64,
    /// Before the first sweep, with all factor increments at their start
    /// values.
    pub initial_relative_defect: f64,
    /// One entry per sweep.
    pub defect_history: Vec<f64>,
    pub alpha: f64,
}

/// Steps a trajectory with a fixed configuration and right-hand side.
pub struct Integrator<R> {
    config: IntegratorConfig,
    rhs: R,
    warm_start: bool,
    previous: Option<Vec<DenseMatrix>>,
}

impl<R: RhsProvider> Integrator<R> {
    pub fn new(config: IntegratorConfig, rhs: R) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            rhs,
            warm_start: false,
            previous: None,
        })
    }

    /// Start each step's sweeps from the previous step's factor increments
    /// instead of zero.
    pub fn with_warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn rhs(&self) -> &R {
        &self.rhs
    }

    pub fn step(&mut self, y: &TuckerTensor, t: f64) -> Result<(TuckerTensor, StepReport)> {
        let init = if self.warm_start {
            self.previous.as_deref()
        } else {
            None
        };
        let (next, report, du) = match self.config.scheme {
            Scheme::Euler => {
                let adot = self.rhs.derivative_at(t, y)?;
                let h = self.config.step_size;
                let alpha = self.config.regularization.alpha(h);
                als::euler_step_with(y, &adot, h, alpha, &self.config, init)?
            }
            Scheme::ImprovedEuler => {
                improved::improved_step_with(y, t, &self.rhs, &self.config, init)?
            }
            Scheme::Gauged => {
                let (next, report) = gauged_reference_step(y, t, &self.rhs, self.config.step_size)?;
                (next, report, Vec::new())
            }
        };
        self.previous = (self.warm_start && !du.is_empty()).then_some(du);
        Ok((next, report))
    }
}

//! Experiment driver: configuration, the time loop and CSV output.
//!
//! Configuration files are TOML. Any key may be omitted; missing keys take
//! the defaults of the chosen experiment.
//!
//! ```toml
//! experiment = "rotating"
//! ranks = [8]
//! step = 1e-3
//! regularization = "h2"
//! ```

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{Integrator, IntegratorConfig, Regularization, Scheme};
use crate::problems::{build_problem, relative_error, Problem, ProblemKind, ProblemParams};
use crate::tucker::{RankVector, TuckerTensor};

pub const CSV_HEADER: [&str; 5] = ["t", "rel_error", "rel_defect", "sweeps", "step_ms"];

/// Target number of logged records for long runs.
const LOG_RECORDS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ProblemKind,
    pub dim: usize,
    pub size: usize,
    /// One rank per mode, or a single rank used in every mode.
    pub ranks: Vec<usize>,
    pub step: f64,
    pub horizon: f64,
    pub eps: f64,
    pub scheme: Scheme,
    pub regularization: Regularization,
    /// Must fit in an `i64` to be written as TOML.
    pub seed: u64,
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Log every `stride` steps; by default every step for runs of at most
    /// 1000 steps and `⌈N/1000⌉` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    /// Record wall time per step. Off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
}

impl RunConfig {
    pub fn defaults(kind: ProblemKind) -> Self {
        let base = RunConfig {
            experiment: kind,
            dim: 2,
            size: 50,
            ranks: vec![8],
            step: 1e-3,
            horizon: 0.3,
            eps: 0.0,
            scheme: Scheme::Euler,
            regularization: Regularization::StepSquared,
            seed: 0,
            tolerance: 1e-6,
            max_sweeps: 10,
            stride: None,
            timing: false,
        };
        match kind {
            ProblemKind::KochLubich => RunConfig {
                dim: 4,
                size: 15,
                ranks: vec![10],
                horizon: 1.0,
                eps: 1e-4,
                regularization: Regularization::Off,
                tolerance: 1e-5,
                ..base
            },
            ProblemKind::RotatingDecay => base,
            ProblemKind::Heat => RunConfig {
                size: 64,
                step: 2.5e-4,
                ..base
            },
            ProblemKind::ReactionDiffusion => RunConfig {
                size: 100,
                ranks: vec![5],
                step: 1e-4,
                horizon: 0.012,
                scheme: Scheme::ImprovedEuler,
                ..base
            },
        }
    }

    /// Parses TOML, filling missing keys from the experiment defaults.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Self::resolve(Some(s), &ConfigOverrides::default())
    }

    /// Experiment defaults, then the keys of `text`, then `overrides`.
    pub fn resolve(text: Option<&str>, overrides: &ConfigOverrides) -> Result<Self> {
        let mut user: toml::Table = match text {
            Some(s) => {
                toml::from_str(s).map_err(|e| Error::InvalidConfig(e.message().to_string()))?
            }
            None => toml::Table::new(),
        };
        let extra =
            toml::Table::try_from(overrides).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        user.extend(extra);
        let kind = match user.get("experiment") {
            Some(toml::Value::String(name)) => name.parse()?,
            Some(other) => {
                return Err(Error::InvalidConfig(format!(
                    "experiment must be a string, got {other}"
                )))
            }
            None => ProblemKind::KochLubich,
        };
        let mut table = toml::Table::try_from(RunConfig::defaults(kind))
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        table.extend(user);
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::InvalidConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn rank_vector(&self) -> Result<RankVector> {
        match self.ranks.as_slice() {
            [r] => RankVector::uniform(self.dim, *r),
            rs if rs.len() == self.dim => RankVector::new(rs.to_vec()),
            rs => Err(Error::InvalidConfig(format!(
                "{} ranks given for dimension {}",
                rs.len(),
                self.dim
            ))),
        }
    }

    pub fn problem_params(&self) -> Result<ProblemParams> {
        Ok(ProblemParams {
            kind: self.experiment,
            dim: self.dim,
            size: self.size,
            ranks: self.rank_vector()?,
            eps: self.eps,
            seed: self.seed,
        })
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            step_size: self.step,
            fit_tolerance: self.tolerance,
            max_sweeps: self.max_sweeps,
            regularization: self.regularization,
            scheme: self.scheme,
        }
    }

    /// Number of steps; the horizon must be a whole number of steps.
    pub fn step_count(&self) -> Result<usize> {
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "horizon must be nonnegative, got {}",
                self.horizon
            )));
        }
        let n = (self.horizon / self.step).round();
        if (n * self.step - self.horizon).abs() > 1e-9 * self.horizon.max(self.step) {
            return Err(Error::InvalidConfig(format!(
                "horizon {} is not a multiple of the step {}",
                self.horizon, self.step
            )));
        }
        Ok(n as usize)
    }

    pub fn log_stride(&self) -> Result<usize> {
        let n = self.step_count()?;
        Ok(match self.stride {
            Some(s) => s,
            None if n <= LOG_RECORDS => 1,
            None => n.div_ceil(LOG_RECORDS),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.problem_params()?.validate()?;
        self.integrator_config().validate()?;
        self.step_count()?;
        if self.stride == Some(0) {
            return Err(Error::InvalidConfig("stride must be at least 1".into()));
        }
        if self.seed > i64::MAX as u64 {
            return Err(Error::InvalidConfig(format!(
                "seed {} is too large",
                self.seed
            )));
        }
        Ok(())
    }
}

/// Values that replace those from a config file; `None` keeps the file or
/// default value.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConfigOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ProblemKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularization: Option<Regularization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<bool>,
}

/// One CSV row. The initial record has no defect, sweeps or timing.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub t: f64,
    pub rel_error: Option<f64>,
    pub rel_defect: Option<f64>,
    pub sweeps: Option<usize>,
    pub step_ms: Option<f64>,
}

#[derive(Debug)]
pub struct RunFailure {
    /// Start time of the step that failed.
    pub t: f64,
    pub error: Error,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub final_time: f64,
    pub final_state: TuckerTensor,
    pub failure: Option<RunFailure>,
}

impl RunOutcome {
    pub fn final_error(&self) -> Option<f64> {
        match self.failure {
            Some(_) => None,
            None => self.records.last().and_then(|r| r.rel_error),
        }
    }

    pub fn max_error(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.rel_error)
            .reduce(f64::max)
    }
}

/// Relative error or defect beyond which a run counts as blown up.
pub const BLOW_UP_LIMIT: f64 = 1e6;

/// Integrates the configured problem from `0` to the horizon.
///
/// A failing step does not return `Err`; it ends the run and is reported in
/// [`RunOutcome::failure`]. Errors are only returned for invalid configs.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = build_problem(&cfg.problem_params()?)?;
    run_problem(cfg, problem.as_ref())
}

pub fn run_problem(cfg: &RunConfig, problem: &dyn Problem) -> Result<RunOutcome> {
    let steps = cfg.step_count()?;
    let stride = cfg.log_stride()?;
    let mut reference = problem.reference();
    let rhs = |t: f64, y: &TuckerTensor| problem.derivative_at(t, y);
    let mut integrator = Integrator::new(cfg.integrator_config(), rhs)?;

    let mut error_at = |t: f64, y: &TuckerTensor| -> Result<Option<f64>> {
        match reference.as_mut() {
            Some(r) => Ok(Some(relative_error(y, &r.at(t)?)?)),
            None => Ok(None),
        }
    };

    let mut y = problem.initial_state().clone();
    let mut records = vec![RunRecord {
        t: 0.0,
        rel_error: error_at(0.0, &y)?,
        rel_defect: None,
        sweeps: None,
        step_ms: None,
    }];
    let mut t = 0.0;
    for i in 0..steps {
        t = i as f64 * cfg.step;
        let start = Instant::now();
        let stepped = integrator.step(&y, t).and_then(|(next, report)| {
            if !next.is_finite() || !report.relative_defect.is_finite() {
                Err(Error::Breakdown("non-finite state".into()))
            } else if report.relative_defect > BLOW_UP_LIMIT {
                Err(Error::Breakdown(format!(
                    "relative defect {:.3e} above {BLOW_UP_LIMIT:e}",
                    report.relative_defect
                )))
            } else {
                Ok((next, report))
            }
        });
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let (next, report) = match stepped {
            Ok(v) => v,
            Err(error) => {
                return Ok(RunOutcome {
                    records,
                    final_time: t,
                    final_state: y,
                    failure: Some(RunFailure { t, error }),
                })
            }
        };
        y = next;
        let done = i + 1;
        if done % stride == 0 || done == steps {
            let t_next = done as f64 * cfg.step;
            let rel_error = match error_at(t_next, &y).and_then(|e| match e {
                Some(e) if !(e <= BLOW_UP_LIMIT) => Err(Error::Breakdown(format!(
                    "relative error {e:.3e} above {BLOW_UP_LIMIT:e}"
                ))),
                e => Ok(e),
            }) {
                Ok(e) => e,
                Err(error) => {
                    return Ok(RunOutcome {
                        records,
                        final_time: t_next,
                        final_state: y,
                        failure: Some(RunFailure { t: t_next, error }),
                    })
                }
            };
            records.push(RunRecord {
                t: t_next,
                rel_error,
                rel_defect: Some(report.relative_defect),
                sweeps: Some(report.sweeps),
                step_ms: cfg.timing.then_some(elapsed),
            });
        }
        t = done as f64 * cfg.step;
    }
    Ok(RunOutcome {
        records,
        final_time: t,
        final_state: y,
        failure: None,
    })
}

fn float_field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv output: {e}"))
}

/// Writes the records; a failed run ends with a row at the failing time
/// whose error and defect are `nan`.
pub fn write_csv<W: Write>(outcome: &RunOutcome, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in &outcome.records {
        w.write_record([
            float_field(Some(r.t)),
            float_field(r.rel_error),
            float_field(r.rel_defect),
            r.sweeps.map(|s| s.to_string()).unwrap_or_default(),
            float_field(r.step_ms),
        ])
        .map_err(csv_error)?;
    }
    if let Some(f) = &outcome.failure {
        w.write_record([
            float_field(Some(f.t)),
            "nan".into(),
            "nan".into(),
            String::new(),
            String::new(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidConfig(format!("csv output: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub step: f64,
    pub final_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    pub slope: f64,
}

/// Final-time errors for each step size and their log-log slope.
pub fn convergence_study(base: &RunConfig, steps: &[f64]) -> Result<ConvergenceStudy> {
    base.validate()?;
    let problem = build_problem(&base.problem_params()?)?;
    let mut points = Vec::with_capacity(steps.len());
    for &h in steps {
        let cfg = final_only(base, h)?;
        let outcome = run_problem(&cfg, problem.as_ref())?;
        if let Some(f) = outcome.failure {
            return Err(f.error);
        }
        let final_error = outcome.final_error().ok_or_else(|| {
            Error::Infeasible(format!("no reference for {} at this size", base.experiment))
        })?;
        points.push(ConvergencePoint {
            step: h,
            final_error,
        });
    }
    let hs: Vec<f64> = points.iter().map(|p| p.step).collect();
    let es: Vec<f64> = points.iter().map(|p| p.final_error).collect();
    let slope = crate::problems::fitted_slope(&hs, &es)?;
    Ok(ConvergenceStudy { points, slope })
}

pub fn write_convergence_csv<W: Write>(study: &ConvergenceStudy, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "final_error", "fitted_slope"])
        .map_err(csv_error)?;
    for p in &study.points {
        w.write_record([
            float_field(Some(p.step)),
            float_field(Some(p.final_error)),
            float_field(Some(study.slope)),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidConfig(format!("csv output: {e}")))
}

fn final_only(base: &RunConfig, h: f64) -> Result<RunConfig> {
    let mut cfg = base.clone();
    cfg.step = h;
    cfg.stride = Some(cfg.step_count()?.max(1));
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    SingularGram,
    BlowUp,
    Failed,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Completed => "ok",
            RunStatus::SingularGram => "singular-gram",
            RunStatus::BlowUp => "blow-up",
            RunStatus::Failed => "failed",
        }
    }

    fn of(failure: &Option<RunFailure>) -> Self {
        match failure.as_ref().map(|f| &f.error) {
            None => RunStatus::Completed,
            Some(Error::SingularGram { .. }) => RunStatus::SingularGram,
            Some(Error::Breakdown(_) | Error::NonFinite(_)) => RunStatus::BlowUp,
            Some(_) => RunStatus::Failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub rank: usize,
    pub step: f64,
    pub scheme: Scheme,
    pub final_error: Option<f64>,
    pub status: RunStatus,
    pub model_accuracy: Option<f64>,
}

/// Runs every scheme for every uniform rank and step size.
pub fn stability_comparison(
    base: &RunConfig,
    ranks: &[usize],
    steps: &[f64],
    schemes: &[Scheme],
) -> Result<Vec<StabilityRow>> {
    let mut rows = Vec::new();
    for &r in ranks {
        let mut cfg = base.clone();
        cfg.ranks = vec![r];
        cfg.validate()?;
        let problem = build_problem(&cfg.problem_params()?)?;
        let model_accuracy = problem.model_accuracy(cfg.horizon);
        for &h in steps {
            for &scheme in schemes {
                let mut run = final_only(&cfg, h)?;
                run.scheme = scheme;
                let outcome = run_problem(&run, problem.as_ref())?;
                let mut status = RunStatus::of(&outcome.failure);
                let final_error = outcome.final_error();
                if status == RunStatus::Completed && !final_error.is_some_and(f64::is_finite) {
                    status = RunStatus::BlowUp;
                }
                rows.push(StabilityRow {
                    rank: r,
                    step: h,
                    scheme,
                    final_error,
                    status,
                    model_accuracy,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_stability_csv<W: Write>(rows: &[StabilityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "rank",
        "h",
        "scheme",
        "final_error",
        "status",
        "model_accuracy",
    ])
    .map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.rank.to_string(),
            float_field(Some(r.step)),
            r.scheme.name().to_string(),
            float_field(r.final_error),
            r.status.name().to_string(),
            float_field(r.model_accuracy),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidConfig(format!("csv output: {e}")))
}

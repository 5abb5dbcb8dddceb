//! Semantics catalog and a single dispatch point used by every front end.

use serde::{Deserialize, Serialize};

use crate::direct::{self, Damping, DampingFactor};
use crate::error::EvalError;
use crate::graph::ArgGraph;
use crate::linalg::diff_inf;
use crate::outcome::{DegreeVector, EvalOutcome, SemanticsTag};
use crate::recursive::{self, RecursiveKind};
use crate::sigmoid::{self, SigmoidKind, UnitInterval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightRange {
    /// ℝ
    Real,
    /// (0,1)
    OpenUnit,
    /// [0,1]
    ClosedUnit,
}

impl WeightRange {
    pub fn contains(self, w: f64) -> bool {
        match self {
            WeightRange::Real => w.is_finite(),
            WeightRange::OpenUnit => w > 0.0 && w < 1.0,
            WeightRange::ClosedUnit => (0.0..=1.0).contains(&w),
        }
    }

    pub fn notation(self) -> &'static str {
        match self {
            WeightRange::Real => "R",
            WeightRange::OpenUnit => "(0,1)",
            WeightRange::ClosedUnit => "[0,1]",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convergence {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemanticsInfo {
    pub tag: SemanticsTag,
    pub name: String,
    pub weight_range: WeightRange,
    pub neutral_value: f64,
    pub convergent: Convergence,
    pub bounded: bool,
    pub reverse_impact: bool,
}

fn info(
    tag: SemanticsTag,
    name: &str,
    weight_range: WeightRange,
    neutral_value: f64,
    convergent: Convergence,
    bounded: bool,
    reverse_impact: bool,
) -> SemanticsInfo {
    SemanticsInfo {
        tag,
        name: name.to_string(),
        weight_range,
        neutral_value,
        convergent,
        bounded,
        reverse_impact,
    }
}

/// The five graded semantics with their domains and known properties.
pub fn catalog() -> Vec<SemanticsInfo> {
    use Convergence::*;
    use WeightRange::*;
    vec![
        info(
            SemanticsTag::Dir,
            "direct aggregation",
            Real,
            0.0,
            Yes,
            false,
            true,
        ),
        info(
            SemanticsTag::Sdir,
            "sigmoid direct aggregation",
            OpenUnit,
            0.5,
            Yes,
            false,
            true,
        ),
        info(
            SemanticsTag::Rsig,
            "recursive sigmoid aggregation",
            ClosedUnit,
            0.0,
            No,
            true,
            false,
        ),
        info(
            SemanticsTag::Rdamped,
            "recursive damped aggregation",
            ClosedUnit,
            0.0,
            Unknown,
            true,
            false,
        ),
        info(
            SemanticsTag::Dogged,
            "damped dogged",
            ClosedUnit,
            0.0,
            Unknown,
            true,
            false,
        ),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemanticsConfig {
    pub tag: SemanticsTag,
    #[serde(default)]
    pub damping: Damping,
    #[serde(default)]
    pub sigmoid: SigmoidKind,
    #[serde(default)]
    pub interval: UnitInterval,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
}

impl SemanticsConfig {
    pub fn new(tag: SemanticsTag) -> SemanticsConfig {
        SemanticsConfig {
            tag,
            damping: Damping::Auto,
            sigmoid: SigmoidKind::Logistic,
            interval: UnitInterval::ZeroOne,
            tol: None,
            max_iter: None,
        }
    }

    pub fn with_damping(mut self, damping: Damping) -> SemanticsConfig {
        self.damping = damping;
        self
    }

    pub fn with_sigmoid(mut self, kind: SigmoidKind) -> SemanticsConfig {
        self.sigmoid = kind;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Constant,
    Solve,
    Series,
    Iteration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub outcome: EvalOutcome,
    pub damping: Option<DampingFactor>,
    pub method: Method,
    /// Fixed-point residual of the returned degrees, when converged.
    pub residual: Option<f64>,
}

fn converged(
    degrees: Vec<f64>,
    tag: SemanticsTag,
    damping: Option<f64>,
    iterations: usize,
) -> EvalOutcome {
    EvalOutcome::Converged {
        degrees: DegreeVector {
            degrees,
            semantics: tag,
            damping,
        },
        iterations,
    }
}

pub fn evaluate(g: &ArgGraph, cfg: &SemanticsConfig) -> Result<Evaluation, EvalError> {
    let tol = cfg.tol.unwrap_or(direct::DEFAULT_TOL);
    match cfg.tag {
        SemanticsTag::Gorgias => Ok(Evaluation {
            outcome: converged(vec![0.0; g.len()], SemanticsTag::Gorgias, None, 0),
            damping: None,
            method: Method::Constant,
            residual: Some(0.0),
        }),
        SemanticsTag::Dir => {
            let d = cfg.damping.resolve(g)?;
            let max_iter = cfg.max_iter.unwrap_or_else(|| direct::default_max_iter(g));
            match direct::solve_evaluate(g, &d) {
                Ok(dv) => {
                    let residual = direct::fixed_point_residual(g, &d, &dv.degrees)?;
                    Ok(Evaluation {
                        outcome: EvalOutcome::Converged {
                            degrees: dv,
                            iterations: 0,
                        },
                        damping: Some(d),
                        method: Method::Solve,
                        residual: Some(residual),
                    })
                }
                Err(EvalError::DampingTooSmall { .. } | EvalError::SingularSystem { .. }) => {
                    let outcome = direct::series_evaluate(g, &d, tol, max_iter)?;
                    let residual = match outcome.degrees() {
                        Some(x) => Some(direct::fixed_point_residual(g, &d, x)?),
                        None => None,
                    };
                    Ok(Evaluation {
                        outcome,
                        damping: Some(d),
                        method: Method::Series,
                        residual,
                    })
                }
                Err(e) => Err(e),
            }
        }
        SemanticsTag::Sdir => {
            let d = cfg.damping.resolve(g)?;
            let max_iter = cfg.max_iter.unwrap_or_else(|| direct::default_max_iter(g));
            let residual_of = |x: &[f64]| -> Result<Option<f64>, EvalError> {
                if cfg.interval == UnitInterval::ZeroOne {
                    Ok(Some(sigmoid::sigmoid_fixed_point_residual(
                        g,
                        &d,
                        cfg.sigmoid,
                        x,
                    )?))
                } else {
                    Ok(None)
                }
            };
            match sigmoid::sigmoid_evaluate_on(g, &d, cfg.sigmoid, cfg.interval) {
                Ok(dv) => {
                    let residual = residual_of(&dv.degrees)?;
                    Ok(Evaluation {
                        outcome: EvalOutcome::Converged {
                            degrees: dv,
                            iterations: 0,
                        },
                        damping: Some(d),
                        method: Method::Solve,
                        residual,
                    })
                }
                Err(EvalError::DampingTooSmall { .. } | EvalError::SingularSystem { .. }) => {
                    let outcome =
                        sigmoid::sigmoid_series(g, &d, cfg.sigmoid, cfg.interval, tol, max_iter)?;
                    let residual = match outcome.degrees() {
                        Some(x) => residual_of(x)?,
                        None => None,
                    };
                    Ok(Evaluation {
                        outcome,
                        damping: Some(d),
                        method: Method::Series,
                        residual,
                    })
                }
                Err(e) => Err(e),
            }
        }
        SemanticsTag::Rsig | SemanticsTag::Rdamped | SemanticsTag::Dogged => {
            let damping = if cfg.tag == SemanticsTag::Rsig {
                None
            } else {
                Some(cfg.damping.resolve(g)?)
            };
            let kind = match (cfg.tag, damping) {
                (SemanticsTag::Rdamped, Some(d)) => RecursiveKind::Rdamped(d),
                (SemanticsTag::Dogged, Some(d)) => RecursiveKind::Dogged(d, cfg.sigmoid),
                _ => RecursiveKind::Rsig,
            };
            let max_iter = cfg.max_iter.unwrap_or(recursive::DEFAULT_MAX_ITER);
            let outcome = recursive::recursive_evaluate(kind, g, tol, max_iter)?;
            let residual = match outcome.degrees() {
                Some(x) => Some(diff_inf(x, &recursive::step(kind, g, x)?)),
                None => None,
            };
            Ok(Evaluation {
                outcome,
                damping,
                method: Method::Iteration,
                residual,
            })
        }
        SemanticsTag::Aggregation => {
            let dv = recursive::aggregation_based_evaluate(g)?;
            let residual = recursive::aggregation_residual(g, &dv.degrees);
            Ok(Evaluation {
                outcome: EvalOutcome::Converged {
                    degrees: dv,
                    iterations: 0,
                },
                damping: None,
                method: Method::Iteration,
                residual: Some(residual),
            })
        }
    }
}

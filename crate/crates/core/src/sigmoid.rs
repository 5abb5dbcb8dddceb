//! Sigmoid functions and sigmoid direct aggregation σ(Pr·σ⁻¹(w)).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::direct::{self, DampingFactor};
use crate::error::EvalError;
use crate::graph::ArgGraph;
use crate::linalg::diff_inf;
use crate::outcome::{DegreeVector, EvalOutcome, SemanticsTag};

/// Weights closer than this to 0 or 1 are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmoidKind {
    #[default]
    Logistic,
    Arctan,
    Fraction,
}

impl SigmoidKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmoidKind::Logistic => "logistic",
            SigmoidKind::Arctan => "arctan",
            SigmoidKind::Fraction => "fraction",
        }
    }
}

impl fmt::Display for SigmoidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SigmoidKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logistic" => Ok(SigmoidKind::Logistic),
            "arctan" => Ok(SigmoidKind::Arctan),
            "fraction" => Ok(SigmoidKind::Fraction),
            other => Err(format!("unknown sigmoid `{other}`")),
        }
    }
}

/// Interval the degrees live in; `MinusOneOne` applies y ↦ 2y − 1 after σ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitInterval {
    #[default]
    ZeroOne,
    MinusOneOne,
}

pub fn sigmoid(kind: SigmoidKind, x: f64) -> f64 {
    match kind {
        SigmoidKind::Logistic => {
            if x >= 0.0 {
                1.0 / (1.0 + (-x).exp())
            } else {
                let e = x.exp();
                e / (1.0 + e)
            }
        }
        SigmoidKind::Arctan => x.atan() / PI + 0.5,
        SigmoidKind::Fraction => (1.0 + x.abs() + x) / (2.0 * (1.0 + x.abs())),
    }
}

pub fn sigmoid_inverse(kind: SigmoidKind, y: f64) -> Result<f64, EvalError> {
    if !(y > 0.0 && y < 1.0) {
        return Err(EvalError::OutOfOpenUnitInterval(y));
    }
    Ok(match kind {
        SigmoidKind::Logistic => {
            if y > 0.5 {
                // 1 − y is exact here.
                let c = 1.0 - y;
                (-c).ln_1p() - c.ln()
            } else {
                (y / (1.0 - y)).ln()
            }
        }
        SigmoidKind::Arctan => (PI * (y - 0.5)).tan(),
        SigmoidKind::Fraction => {
            if y >= 0.5 {
                (2.0 * y - 1.0) / (2.0 * (1.0 - y))
            } else {
                1.0 - 1.0 / (2.0 * y)
            }
        }
    })
}

fn to_unit(interval: UnitInterval, y: f64) -> f64 {
    match interval {
        UnitInterval::ZeroOne => y,
        UnitInterval::MinusOneOne => (y + 1.0) / 2.0,
    }
}

fn from_unit(interval: UnitInterval, y: f64) -> f64 {
    match interval {
        UnitInterval::ZeroOne => y,
        UnitInterval::MinusOneOne => 2.0 * y - 1.0,
    }
}

/// σ⁻¹ of every weight, rejecting weights on or near the boundary.
pub fn transformed_weights(
    g: &ArgGraph,
    kind: SigmoidKind,
    interval: UnitInterval,
) -> Result<Vec<f64>, EvalError> {
    g.weights()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            let y = to_unit(interval, value);
            if !(y > BOUNDARY_MARGIN && y < 1.0 - BOUNDARY_MARGIN) {
                return Err(EvalError::WeightOnBoundary { index, value });
            }
            sigmoid_inverse(kind, y)
        })
        .collect()
}

pub fn sigmoid_evaluate(
    g: &ArgGraph,
    d: &DampingFactor,
    kind: SigmoidKind,
) -> Result<DegreeVector, EvalError> {
    sigmoid_evaluate_on(g, d, kind, UnitInterval::ZeroOne)
}

pub fn sigmoid_evaluate_on(
    g: &ArgGraph,
    d: &DampingFactor,
    kind: SigmoidKind,
    interval: UnitInterval,
) -> Result<DegreeVector, EvalError> {
    let u = transformed_weights(g, kind, interval)?;
    let x = direct::solve_on_weights(g, &u, d)?;
    Ok(DegreeVector {
        degrees: x
            .iter()
            .map(|&v| from_unit(interval, sigmoid(kind, v)))
            .collect(),
        semantics: SemanticsTag::Sdir,
        damping: Some(d.value()),
    })
}

/// Neumann series on σ⁻¹(w), mapped back through σ; used as a diagnostic
/// when the solve precondition fails.
pub fn sigmoid_series(
    g: &ArgGraph,
    d: &DampingFactor,
    kind: SigmoidKind,
    interval: UnitInterval,
    tol: f64,
    max_iter: usize,
) -> Result<EvalOutcome, EvalError> {
    let u = transformed_weights(g, kind, interval)?;
    let map = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&x| from_unit(interval, sigmoid(kind, x)))
            .collect()
    };
    Ok(
        match direct::series_on_weights(g, &u, d, tol, max_iter, SemanticsTag::Sdir)? {
            EvalOutcome::Converged {
                mut degrees,
                iterations,
            } => {
                degrees.degrees = map(&degrees.degrees);
                EvalOutcome::Converged {
                    degrees,
                    iterations,
                }
            }
            EvalOutcome::Oscillating { period, states } => EvalOutcome::Oscillating {
                period,
                states: states.iter().map(|s| map(s)).collect(),
            },
            other => other,
        },
    )
}

/// ‖D − σ(σ⁻¹(w) + G σ⁻¹(D)/d)‖∞ on the (0,1) scale.
pub fn sigmoid_fixed_point_residual(
    g: &ArgGraph,
    d: &DampingFactor,
    kind: SigmoidKind,
    degrees: &[f64],
) -> Result<f64, EvalError> {
    let u = transformed_weights(g, kind, UnitInterval::ZeroOne)?;
    let inv: Vec<f64> = degrees
        .iter()
        .map(|&y| sigmoid_inverse(kind, y))
        .collect::<Result<_, _>>()?;
    let s = g.influence(&inv)?;
    let rhs: Vec<f64> = u
        .iter()
        .zip(&s)
        .map(|(ui, si)| sigmoid(kind, ui + si / d.value()))
        .collect();
    Ok(diff_inf(degrees, &rhs))
}

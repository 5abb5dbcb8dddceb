//! Evaluation requests and responses shared by the CLI and the HTTP service.

use serde::{Deserialize, Serialize};
use wasa_core::semantics::Method;
use wasa_core::{
    evaluate, propagation_matrix, ArgGraph, Damping, DampingPolicy, EvalError, EvalOutcome,
    GraphError, SemanticsConfig, SemanticsTag, SigmoidKind, UnitInterval,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRequest {
    pub semantics: SemanticsTag,
    #[serde(default)]
    pub damping: Damping,
    #[serde(default)]
    pub sigmoid: SigmoidKind,
    #[serde(default)]
    pub interval: UnitInterval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub show_propagation: bool,
}

impl Default for EvalRequest {
    fn default() -> EvalRequest {
        EvalRequest::new(SemanticsTag::Dir)
    }
}

impl EvalRequest {
    pub fn new(semantics: SemanticsTag) -> EvalRequest {
        EvalRequest {
            semantics,
            damping: Damping::Auto,
            sigmoid: SigmoidKind::Logistic,
            interval: UnitInterval::ZeroOne,
            tol: None,
            max_iter: None,
            show_propagation: false,
        }
    }

    pub fn config(&self) -> SemanticsConfig {
        SemanticsConfig {
            tag: self.semantics,
            damping: self.damping,
            sigmoid: self.sigmoid,
            interval: self.interval,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArgumentDegree {
    pub id: String,
    pub degree: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingUsed {
    pub value: f64,
    /// `global` or `graph_dependent`.
    pub policy: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResponse {
    pub semantics: SemanticsTag,
    pub status: String,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingUsed>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<ArgumentDegree>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    /// Limit-cycle states, `states[k]` reached at iterations ≡ k (mod period).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Vec<ArgumentDegree>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagation: Option<Propagation>,
}

impl EvalResponse {
    pub fn is_converged(&self) -> bool {
        self.status == "converged"
    }

    pub fn degree_of(&self, id: &str) -> Option<f64> {
        self.degrees
            .as_ref()?
            .iter()
            .find(|d| d.id == id)
            .map(|d| d.degree)
    }
}

fn labelled(g: &ArgGraph, v: &[f64]) -> Vec<ArgumentDegree> {
    g.ids()
        .iter()
        .zip(v)
        .map(|(id, &degree)| ArgumentDegree {
            id: id.clone(),
            degree,
        })
        .collect()
}

pub fn evaluate_graph(g: &ArgGraph, req: &EvalRequest) -> Result<EvalResponse, EvalError> {
    let ev = evaluate(g, &req.config())?;
    let mut resp = EvalResponse {
        semantics: req.semantics,
        status: ev.outcome.status().to_string(),
        method: ev.method,
        damping: ev.damping.map(|d| DampingUsed {
            value: d.value(),
            policy: match d.policy() {
                DampingPolicy::Global => "global".into(),
                DampingPolicy::GraphDependent => "graph_dependent".into(),
            },
        }),
        iterations: None,
        residual: ev.residual,
        degrees: None,
        period: None,
        states: None,
        growth: None,
        reason: None,
        propagation: None,
    };
    match &ev.outcome {
        EvalOutcome::Converged {
            degrees,
            iterations,
        } => {
            resp.degrees = Some(labelled(g, &degrees.degrees));
            resp.iterations = Some(*iterations);
        }
        EvalOutcome::Oscillating { period, states } => {
            resp.period = Some(*period);
            resp.states = Some(states.iter().map(|s| labelled(g, s)).collect());
        }
        EvalOutcome::Diverging { growth } => resp.growth = Some(*growth),
        EvalOutcome::NotWellDefined { reason } => resp.reason = Some(reason.clone()),
    }
    if req.show_propagation && req.semantics == SemanticsTag::Dir {
        if let Some(d) = ev.damping {
            let pr = propagation_matrix(g, &d)?;
            resp.propagation = Some(Propagation {
                ids: g.ids().to_vec(),
                rows: pr.rows(),
            });
        }
    }
    Ok(resp)
}

/// Variant name of an evaluation error, used as a machine-readable kind.
pub fn error_kind(e: &EvalError) -> &'static str {
    match e {
        EvalError::Graph(g) => match g {
            GraphError::DuplicateArgument(_) => "DuplicateArgument",
            GraphError::UnknownEndpoint(_) => "UnknownEndpoint",
            GraphError::DuplicateEdge { .. } => "DuplicateEdge",
            GraphError::NonFiniteWeight(_) => "NonFiniteWeight",
            GraphError::InvalidEntry(_) => "InvalidEntry",
            GraphError::IndexOutOfRange { .. } => "IndexOutOfRange",
            GraphError::DimensionMismatch { .. } => "DimensionMismatch",
            GraphError::SharedComponent(_) => "SharedComponent",
            GraphError::SizeMismatch { .. } => "SizeMismatch",
            GraphError::NotABijection => "NotABijection",
        },
        EvalError::InvalidDamping(_) => "InvalidDamping",
        EvalError::DampingTooSmall { .. } => "DampingTooSmall",
        EvalError::SingularSystem { .. } => "SingularSystem",
        EvalError::InvalidTolerance(_) => "InvalidTolerance",
        EvalError::InvalidIterationBudget => "InvalidIterationBudget",
        EvalError::WeightOnBoundary { .. } => "WeightOnBoundary",
        EvalError::OutOfOpenUnitInterval(_) => "OutOfOpenUnitInterval",
        EvalError::WeightOutOfClosedUnit { .. } => "WeightOutOfClosedUnit",
        EvalError::AttackEdgePresent(_) => "AttackEdgePresent",
        EvalError::NotConverged(_) => "NotConverged",
    }
}

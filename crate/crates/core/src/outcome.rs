use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsTag {
    Gorgias,
    Dir,
    Sdir,
    Rsig,
    Rdamped,
    Dogged,
    Aggregation,
}

impl SemanticsTag {
    pub const ALL: [SemanticsTag; 7] = [
        SemanticsTag::Gorgias,
        SemanticsTag::Dir,
        SemanticsTag::Sdir,
        SemanticsTag::Rsig,
        SemanticsTag::Rdamped,
        SemanticsTag::Dogged,
        SemanticsTag::Aggregation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticsTag::Gorgias => "gorgias",
            SemanticsTag::Dir => "dir",
            SemanticsTag::Sdir => "sdir",
            SemanticsTag::Rsig => "rsig",
            SemanticsTag::Rdamped => "rdamped",
            SemanticsTag::Dogged => "dogged",
            SemanticsTag::Aggregation => "aggregation",
        }
    }
}

impl fmt::Display for SemanticsTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SemanticsTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemanticsTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown semantics `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeVector {
    pub degrees: Vec<f64>,
    pub semantics: SemanticsTag,
    /// Damping factor actually used, if the semantics has one.
    pub damping: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EvalOutcome {
    Converged {
        degrees: DegreeVector,
        iterations: usize,
    },
    /// `states[k]` is the limit-cycle state reached at iterations ≡ k (mod period), counting the weights as iteration 0.
    Oscillating {
        period: usize,
        states: Vec<Vec<f64>>,
    },
    Diverging {
        growth: f64,
    },
    NotWellDefined {
        reason: String,
    },
}

impl EvalOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, EvalOutcome::Converged { .. })
    }

    pub fn degrees(&self) -> Option<&[f64]> {
        match self {
            EvalOutcome::Converged { degrees, .. } => Some(&degrees.degrees),
            _ => None,
        }
    }

    pub fn into_degrees(self) -> Option<DegreeVector> {
        match self {
            EvalOutcome::Converged { degrees, .. } => Some(degrees),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            EvalOutcome::Converged { .. } => "converged",
            EvalOutcome::Oscillating { .. } => "oscillating",
            EvalOutcome::Diverging { .. } => "diverging",
            EvalOutcome::NotWellDefined { .. } => "not_well_defined",
        }
    }
}

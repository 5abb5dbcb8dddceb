//! Executable characteristics of acceptability semantics.
//!
//! Every characteristic is checked by sampling instances that satisfy (or are
//! likely to satisfy) its hypotheses, evaluating the semantics and testing the
//! conclusion numerically. Counterexamples are shrunk greedily.

mod checks;
mod derived;
mod draft;
mod generate;
mod minimize;
mod sut;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ArgGraph;

pub use derived::implication_checks;
pub use sut::{Evaluator, SemanticsUnderTest};

pub const DEFAULT_TRIALS: usize = 200;

/// Equality tolerance for conclusions.
pub const TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Characteristic {
    Anonymity,
    Independence,
    Equivalence,
    Directionality,
    Conservativity,
    InitialMonotony,
    Neutrality,
    ParentMonotony,
    Impact,
    Reinforcement,
    Causality,
    Stickiness,
    Neutralisation,
    Continuity,
    Interchangeability,
    Linearity,
    ReverseImpact,
    Boundedness,
    Dummy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Mandatory,
    Optional,
    /// Only meaningful for support-only graphs with weights in [0,1].
    Bwsa,
}

impl Characteristic {
    pub const ALL: [Characteristic; 19] = [
        Characteristic::Anonymity,
        Characteristic::Independence,
        Characteristic::Equivalence,
        Characteristic::Directionality,
        Characteristic::Conservativity,
        Characteristic::InitialMonotony,
        Characteristic::Neutrality,
        Characteristic::ParentMonotony,
        Characteristic::Impact,
        Characteristic::Reinforcement,
        Characteristic::Causality,
        Characteristic::Stickiness,
        Characteristic::Neutralisation,
        Characteristic::Continuity,
        Characteristic::Interchangeability,
        Characteristic::Linearity,
        Characteristic::ReverseImpact,
        Characteristic::Boundedness,
        Characteristic::Dummy,
    ];

    pub fn name(self) -> &'static str {
        use Characteristic::*;
        match self {
            Anonymity => "Anonymity",
            Independence => "Independence",
            Equivalence => "Equivalence",
            Directionality => "Directionality",
            Conservativity => "Conservativity",
            InitialMonotony => "Initial Monotony",
            Neutrality => "Neutrality",
            ParentMonotony => "Parent Monotony",
            Impact => "Impact",
            Reinforcement => "Reinforcement",
            Causality => "Causality",
            Stickiness => "Stickiness",
            Neutralisation => "Neutralisation",
            Continuity => "Continuity",
            Interchangeability => "Interchangeability",
            Linearity => "Linearity",
            ReverseImpact => "Reverse impact",
            Boundedness => "Boundedness",
            Dummy => "Dummy",
        }
    }

    pub fn group(self) -> Group {
        use Characteristic::*;
        match self {
            Linearity | ReverseImpact | Boundedness => Group::Optional,
            Dummy => Group::Bwsa,
            _ => Group::Mandatory,
        }
    }

    pub fn requires_bwsa(self) -> bool {
        matches!(self, Characteristic::Dummy | Characteristic::Stickiness)
    }

    pub fn mandatory() -> impl Iterator<Item = Characteristic> {
        Characteristic::ALL
            .into_iter()
            .filter(|c| c.group() == Group::Mandatory)
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| !matches!(c, ' ' | '_' | '-'))
        .flat_map(char::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown characteristic `{0}`")]
pub struct UnknownCharacteristic(pub String);

impl FromStr for Characteristic {
    type Err = UnknownCharacteristic;

    fn from_str(s: &str) -> Result<Characteristic, UnknownCharacteristic> {
        let key = squash(s);
        Characteristic::ALL
            .into_iter()
            .find(|c| squash(c.name()) == key)
            .ok_or_else(|| UnknownCharacteristic(s.to_string()))
    }
}

/// A concrete instance a checker evaluates. Indices refer to arguments of
/// the graphs involved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    Single {
        graph: ArgGraph,
    },
    /// Argument `i` of `graph` becomes argument `permutation[i]`.
    Anonymity {
        graph: ArgGraph,
        permutation: Vec<usize>,
    },
    Independence {
        left: ArgGraph,
        right: ArgGraph,
    },
    /// Adds the edge `source → target` with the given sign.
    Directionality {
        graph: ArgGraph,
        target: usize,
        source: usize,
        sign: i8,
    },
    /// `modified` shares the first `graph.len()` arguments with `graph`.
    Pair {
        graph: ArgGraph,
        modified: ArgGraph,
        argument: usize,
    },
    Probe {
        graph: ArgGraph,
        argument: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub label: String,
    pub graph: ArgGraph,
    pub degrees: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub instance: Instance,
    pub graphs: Vec<LabeledGraph>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// `nonvacuous` counts trials in which at least one hypothesis held.
    Passed {
        trials: usize,
        nonvacuous: usize,
    },
    Falsified {
        reason: String,
        counterexample: Option<Counterexample>,
    },
    Inapplicable {
        reason: String,
    },
}

impl Verdict {
    pub fn is_passed(&self) -> bool {
        matches!(self, Verdict::Passed { .. })
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, Verdict::Falsified { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Passed { .. } => "passed",
            Verdict::Falsified { .. } => "falsified",
            Verdict::Inapplicable { .. } => "inapplicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    pub characteristic: Characteristic,
    pub group: Group,
    /// Premises for derived checks, empty otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derived_from: Vec<Characteristic>,
    pub verdict: Verdict,
    pub seed: u64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error("semantics `{semantics}` failed on every sampled instance of {characteristic} (last error: {last})")]
    DomainMismatch {
        semantics: String,
        characteristic: Characteristic,
        last: String,
    },
}

/// Sampling parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub n_max: usize,
    pub density: f64,
}

impl Default for SamplerConfig {
    fn default() -> SamplerConfig {
        SamplerConfig {
            n_max: 6,
            density: 0.35,
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub(crate) fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(label))
}

pub fn check(
    sut: &SemanticsUnderTest,
    c: Characteristic,
    trials: usize,
    seed: u64,
) -> Result<CharacteristicReport, AxiomError> {
    check_with(sut, c, trials, seed, SamplerConfig::default())
}

pub fn check_with(
    sut: &SemanticsUnderTest,
    c: Characteristic,
    trials: usize,
    seed: u64,
    sampler: SamplerConfig,
) -> Result<CharacteristicReport, AxiomError> {
    let verdict = checks::run(sut, c, trials, seed, sampler)?;
    Ok(CharacteristicReport {
        characteristic: c,
        group: c.group(),
        derived_from: Vec::new(),
        verdict,
        seed,
        trials,
    })
}

/// Runs every characteristic in parallel. A domain mismatch is reported as
/// inapplicable.
pub fn check_all(sut: &SemanticsUnderTest, trials: usize, seed: u64) -> Vec<CharacteristicReport> {
    Characteristic::ALL
        .par_iter()
        .map(|&c| {
            check(sut, c, trials, seed).unwrap_or_else(|e| CharacteristicReport {
                characteristic: c,
                group: c.group(),
                derived_from: Vec::new(),
                verdict: Verdict::Inapplicable {
                    reason: e.to_string(),
                },
                seed,
                trials,
            })
        })
        .collect()
}

/// Re-evaluates a stored instance. `None` means the conclusion holds.
pub fn replay(
    sut: &SemanticsUnderTest,
    c: Characteristic,
    instance: &Instance,
) -> Option<Counterexample> {
    checks::examine(sut, c, instance)
        .ok()
        .and_then(|f| f.counterexample(instance))
}

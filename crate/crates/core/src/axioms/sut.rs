use std::fmt;
use std::sync::Arc;

use crate::direct::Damping;
use crate::error::EvalError;
use crate::graph::ArgGraph;
use crate::outcome::{DegreeVector, SemanticsTag};
use crate::random::{Domain, PolarityRestriction};
use crate::semantics::{self, SemanticsConfig, WeightRange};
use crate::sigmoid::SigmoidKind;

pub type Evaluator = dyn Fn(&ArgGraph) -> Result<DegreeVector, EvalError> + Send + Sync;

/// A semantics packaged with the data the checkers need.
#[derive(Clone)]
pub struct SemanticsUnderTest {
    pub name: String,
    pub evaluate: Arc<Evaluator>,
    pub domain: Domain,
    pub neutral: f64,
    pub max_degree: Option<f64>,
    pub min_degree: Option<f64>,
}

impl fmt::Debug for SemanticsUnderTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemanticsUnderTest")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("neutral", &self.neutral)
            .field("max_degree", &self.max_degree)
            .field("min_degree", &self.min_degree)
            .finish()
    }
}

impl SemanticsUnderTest {
    /// Wraps the dispatcher. Anything but a converged outcome is an error.
    pub fn from_config(
        name: impl Into<String>,
        cfg: SemanticsConfig,
        domain: Domain,
        neutral: f64,
    ) -> SemanticsUnderTest {
        let evaluate = move |g: &ArgGraph| -> Result<DegreeVector, EvalError> {
            let e = semantics::evaluate(g, &cfg)?;
            let status = e.outcome.status();
            e.outcome
                .into_degrees()
                .ok_or_else(|| EvalError::NotConverged(status.to_string()))
        };
        SemanticsUnderTest {
            name: name.into(),
            evaluate: Arc::new(evaluate),
            domain,
            neutral,
            max_degree: None,
            min_degree: None,
        }
    }

    pub fn with_bounds(mut self, min: f64, max: f64) -> SemanticsUnderTest {
        self.min_degree = Some(min);
        self.max_degree = Some(max);
        self
    }

    pub fn dir(damping: Damping) -> SemanticsUnderTest {
        let name = match damping {
            Damping::Auto => "dir (d = indegree + 1)".to_string(),
            Damping::Global(d) => format!("dir (d = {d})"),
        };
        let cfg = SemanticsConfig::new(SemanticsTag::Dir).with_damping(damping);
        SemanticsUnderTest::from_config(
            name,
            cfg,
            Domain::new(WeightRange::Real, PolarityRestriction::Bipolar),
            0.0,
        )
    }

    pub fn sdir(damping: Damping, kind: SigmoidKind) -> SemanticsUnderTest {
        let cfg = SemanticsConfig::new(SemanticsTag::Sdir)
            .with_damping(damping)
            .with_sigmoid(kind);
        let name = match damping {
            Damping::Auto => format!("sdir ({kind}, d = indegree + 1)"),
            Damping::Global(d) => format!("sdir ({kind}, d = {d})"),
        };
        SemanticsUnderTest::from_config(
            name,
            cfg,
            Domain::new(WeightRange::OpenUnit, PolarityRestriction::Bipolar),
            0.5,
        )
    }

    /// Every argument gets degree 0.
    pub fn gorgias() -> SemanticsUnderTest {
        let cfg = SemanticsConfig::new(SemanticsTag::Gorgias);
        SemanticsUnderTest::from_config(
            "gorgias",
            cfg,
            Domain::new(WeightRange::Real, PolarityRestriction::Bipolar),
            0.0,
        )
        .with_bounds(0.0, 0.0)
    }

    /// Support-only aggregation over [0,1].
    pub fn aggregation() -> SemanticsUnderTest {
        let cfg = SemanticsConfig::new(SemanticsTag::Aggregation);
        SemanticsUnderTest::from_config(
            "aggregation",
            cfg,
            Domain::new(WeightRange::ClosedUnit, PolarityRestriction::SupportOnly),
            0.0,
        )
        .with_bounds(0.0, 1.0)
    }

    pub fn rsig() -> SemanticsUnderTest {
        let cfg = SemanticsConfig::new(SemanticsTag::Rsig);
        SemanticsUnderTest::from_config(
            "rsig",
            cfg,
            Domain::new(WeightRange::ClosedUnit, PolarityRestriction::Bipolar),
            0.0,
        )
        .with_bounds(0.0, 1.0)
    }

    pub fn rdamped(damping: Damping) -> SemanticsUnderTest {
        let cfg = SemanticsConfig::new(SemanticsTag::Rdamped).with_damping(damping);
        SemanticsUnderTest::from_config(
            "rdamped",
            cfg,
            Domain::new(WeightRange::ClosedUnit, PolarityRestriction::Bipolar),
            0.0,
        )
        .with_bounds(0.0, 1.0)
    }

    pub fn dogged(damping: Damping, kind: SigmoidKind) -> SemanticsUnderTest {
        let cfg = SemanticsConfig::new(SemanticsTag::Dogged)
            .with_damping(damping)
            .with_sigmoid(kind);
        SemanticsUnderTest::from_config(
            format!("dogged ({kind})"),
            cfg,
            Domain::new(WeightRange::ClosedUnit, PolarityRestriction::Bipolar),
            0.0,
        )
        .with_bounds(0.0, 1.0)
    }

    /// Semantics with the given tag and default settings for its catalog domain.
    pub fn for_tag(tag: SemanticsTag, damping: Damping, kind: SigmoidKind) -> SemanticsUnderTest {
        match tag {
            SemanticsTag::Dir => SemanticsUnderTest::dir(damping),
            SemanticsTag::Sdir => SemanticsUnderTest::sdir(damping, kind),
            SemanticsTag::Rsig => SemanticsUnderTest::rsig(),
            SemanticsTag::Rdamped => SemanticsUnderTest::rdamped(damping),
            SemanticsTag::Dogged => SemanticsUnderTest::dogged(damping, kind),
            SemanticsTag::Gorgias => SemanticsUnderTest::gorgias(),
            SemanticsTag::Aggregation => SemanticsUnderTest::aggregation(),
        }
    }

    pub fn degrees(&self, g: &ArgGraph) -> Result<Vec<f64>, EvalError> {
        (self.evaluate)(g).map(|dv| dv.degrees)
    }

    pub fn is_bwsa_domain(&self) -> bool {
        self.domain.weights == WeightRange::ClosedUnit
            && self.domain.polarity == PolarityRestriction::SupportOnly
    }
}

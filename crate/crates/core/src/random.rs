//! Random graph generation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::ArgGraph;
use crate::semantics::WeightRange;

pub const OPEN_MARGIN: f64 = 1e-6;
pub const REAL_SPAN: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityRestriction {
    Bipolar,
    SupportOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub weights: WeightRange,
    pub polarity: PolarityRestriction,
}

impl Domain {
    pub fn new(weights: WeightRange, polarity: PolarityRestriction) -> Domain {
        Domain { weights, polarity }
    }

    /// Sampling interval for weights.
    pub fn weight_bounds(&self) -> (f64, f64) {
        match self.weights {
            WeightRange::Real => (-REAL_SPAN, REAL_SPAN),
            WeightRange::OpenUnit => (OPEN_MARGIN, 1.0 - OPEN_MARGIN),
            WeightRange::ClosedUnit => (0.0, 1.0),
        }
    }

    pub fn admits(&self, g: &ArgGraph) -> bool {
        g.weights().iter().all(|&w| self.weights.contains(w))
            && (self.polarity == PolarityRestriction::Bipolar || !g.has_attack())
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_polarity<R: Rng>(rng: &mut R, polarity: PolarityRestriction) -> i8 {
    match polarity {
        PolarityRestriction::SupportOnly => 1,
        PolarityRestriction::Bipolar => {
            if rng.gen_bool(0.5) {
                1
            } else {
                -1
            }
        }
    }
}

/// `n` uniform in `n_min..=n_max`, each ordered pair (self-pairs included)
/// an edge with probability `density`, weights uniform in `bounds`.
pub fn sample_wasa<R: Rng>(
    rng: &mut R,
    polarity: PolarityRestriction,
    n_min: usize,
    n_max: usize,
    density: f64,
    bounds: (f64, f64),
) -> ArgGraph {
    let n = rng.gen_range(n_min..=n_max.max(n_min));
    let density = density.clamp(0.0, 1.0);
    let mut incidence = vec![0i8; n * n];
    for e in incidence.iter_mut() {
        if rng.gen_bool(density) {
            *e = random_polarity(rng, polarity);
        }
    }
    let weights = (0..n).map(|_| rng.gen_range(bounds.0..=bounds.1)).collect();
    ArgGraph::with_default_ids(incidence, weights).expect("generated graph is well formed")
}

pub fn random_wasa(domain: &Domain, n_max: usize, density: f64, seed: u64) -> ArgGraph {
    let mut rng = rng_from_seed(seed);
    sample_wasa(
        &mut rng,
        domain.polarity,
        1,
        n_max.max(1),
        density,
        domain.weight_bounds(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const REAL: Domain = Domain {
        weights: WeightRange::Real,
        polarity: PolarityRestriction::Bipolar,
    };

    #[test]
    fn deterministic() {
        assert_eq!(
            random_wasa(&REAL, 8, 0.3, 42),
            random_wasa(&REAL, 8, 0.3, 42)
        );
    }

    #[test]
    fn density_zero_is_edgeless() {
        for seed in 0..20 {
            assert_eq!(random_wasa(&REAL, 8, 0.0, seed).edge_count(), 0);
        }
    }

    #[test]
    fn support_only_has_no_attacks() {
        let d = Domain::new(WeightRange::ClosedUnit, PolarityRestriction::SupportOnly);
        for seed in 0..50 {
            let g = random_wasa(&d, 8, 0.6, seed);
            assert!(!g.has_attack());
            assert!(g.is_bwsa());
        }
    }

    #[test]
    fn open_weights_avoid_endpoints() {
        let d = Domain::new(WeightRange::OpenUnit, PolarityRestriction::Bipolar);
        for seed in 0..50 {
            let g = random_wasa(&d, 8, 0.3, seed);
            assert!(g
                .weights()
                .iter()
                .all(|&w| (OPEN_MARGIN..=1.0 - OPEN_MARGIN).contains(&w)));
            assert!((1..=8).contains(&g.len()));
        }
    }
}

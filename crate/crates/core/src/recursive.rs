//! Recursively defined [0,1]-valued semantics.

use crate::direct::DampingFactor;
use crate::error::EvalError;
use crate::graph::ArgGraph;
use crate::iteration::{self, Classified, IterationConfig};
use crate::linalg::diff_inf;
use crate::outcome::{DegreeVector, EvalOutcome, SemanticsTag};
use crate::sigmoid::{sigmoid, sigmoid_inverse, SigmoidKind};

pub const DEFAULT_MAX_ITER: usize = 5000;
pub const AGGREGATION_TOL: f64 = 1e-13;
pub const AGGREGATION_MAX_ITER: usize = 100_000;
pub const AGGREGATION_RESIDUAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RecursiveKind {
    /// Undamped: s = G·f.
    Rsig,
    Rdamped(DampingFactor),
    Dogged(DampingFactor, SigmoidKind),
}

impl RecursiveKind {
    pub fn tag(&self) -> SemanticsTag {
        match self {
            RecursiveKind::Rsig => SemanticsTag::Rsig,
            RecursiveKind::Rdamped(_) => SemanticsTag::Rdamped,
            RecursiveKind::Dogged(..) => SemanticsTag::Dogged,
        }
    }

    pub fn damping(&self) -> Option<f64> {
        match self {
            RecursiveKind::Rsig => None,
            RecursiveKind::Rdamped(d) | RecursiveKind::Dogged(d, _) => Some(d.value()),
        }
    }
}

pub fn check_closed_unit(g: &ArgGraph) -> Result<(), EvalError> {
    match g.weights().iter().position(|w| !(0.0..=1.0).contains(w)) {
        Some(index) => Err(EvalError::WeightOutOfClosedUnit {
            index,
            value: g.weight(index),
        }),
        None => Ok(()),
    }
}

/// Validated step function for one kind on one graph.
struct Stepper<'a> {
    kind: RecursiveKind,
    g: &'a ArgGraph,
    /// σ⁻¹(w) for interior weights (dogged only).
    inner: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(kind: RecursiveKind, g: &'a ArgGraph) -> Result<Stepper<'a>, EvalError> {
        check_closed_unit(g)?;
        let mut inner = Vec::new();
        match kind {
            RecursiveKind::Rsig => {}
            RecursiveKind::Rdamped(d) => {
                // Keeps |s| ≤ 1 so every case-form stays in [0,1].
                let indeg = g.indegree();
                if d.value() < indeg as f64 {
                    return Err(EvalError::DampingTooSmall {
                        damping: d.value(),
                        required: indeg,
                    });
                }
            }
            RecursiveKind::Dogged(_, sk) => {
                inner = g
                    .weights()
                    .iter()
                    .map(|&w| {
                        if w > 0.0 && w < 1.0 {
                            sigmoid_inverse(sk, w)
                        } else {
                            Ok(0.0)
                        }
                    })
                    .collect::<Result<_, _>>()?;
            }
        }
        Ok(Stepper { kind, g, inner })
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        let s = self.g.mul_vec(f);
        let w = self.g.weights();
        let out = s
            .iter()
            .zip(w)
            .enumerate()
            .map(|(i, (&s, &w))| match self.kind {
                RecursiveKind::Rsig => {
                    if s <= 0.0 {
                        w / (1.0 - s)
                    } else {
                        (w + s) / (1.0 + s)
                    }
                }
                RecursiveKind::Rdamped(d) => {
                    let s = s / d.value();
                    if s <= 0.0 {
                        w * (1.0 + s)
                    } else {
                        w + (1.0 - w) * s
                    }
                }
                RecursiveKind::Dogged(d, sk) => {
                    if w == 1.0 {
                        1.0
                    } else if w == 0.0 {
                        0.0
                    } else {
                        sigmoid(sk, s / d.value() + self.inner[i])
                    }
                }
            });
        out.map(|x| x.clamp(0.0, 1.0)).collect()
    }
}

pub fn step(kind: RecursiveKind, g: &ArgGraph, f_prev: &[f64]) -> Result<Vec<f64>, EvalError> {
    if f_prev.len() != g.len() {
        return Err(crate::error::GraphError::DimensionMismatch {
            expected: g.len(),
            found: f_prev.len(),
        }
        .into());
    }
    Ok(Stepper::new(kind, g)?.apply(f_prev))
}

pub fn recursive_evaluate(
    kind: RecursiveKind,
    g: &ArgGraph,
    tol: f64,
    max_iter: usize,
) -> Result<EvalOutcome, EvalError> {
    let stepper = Stepper::new(kind, g)?;
    let cfg = IterationConfig {
        tol,
        max_iter,
        divergence_bound: None,
    };
    let out = iteration::run(g.weights().to_vec(), &cfg, |f| stepper.apply(f))?;
    Ok(match out {
        Classified::Converged { state, iterations } => EvalOutcome::Converged {
            degrees: DegreeVector {
                degrees: state,
                semantics: kind.tag(),
                damping: kind.damping(),
            },
            iterations,
        },
        Classified::Oscillating { period, states } => EvalOutcome::Oscillating { period, states },
        Classified::Diverging { growth } => EvalOutcome::Diverging { growth },
        Classified::Exhausted {
            iterations,
            last_step,
        } => EvalOutcome::NotWellDefined {
            reason: format!(
                "no fixed point within {iterations} iterations (last step {last_step:e})"
            ),
        },
    })
}

/// ‖D − (w + (1 − w)·x/(1 + x))‖∞ with x = G·D.
pub fn aggregation_residual(g: &ArgGraph, degrees: &[f64]) -> f64 {
    let x = g.mul_vec(degrees);
    let rhs: Vec<f64> = g
        .weights()
        .iter()
        .zip(&x)
        .map(|(&w, &x)| w + (1.0 - w) * x / (1.0 + x))
        .collect();
    diff_inf(degrees, &rhs)
}

/// The recursive sigmoid limit restricted to support-only graphs.
pub fn aggregation_based_evaluate(g: &ArgGraph) -> Result<DegreeVector, EvalError> {
    if let Some(i) = (0..g.len()).find(|&i| g.parent_row(i).iter().any(|&e| e < 0)) {
        return Err(EvalError::AttackEdgePresent(g.id(i).to_string()));
    }
    let out = recursive_evaluate(
        RecursiveKind::Rsig,
        g,
        AGGREGATION_TOL,
        AGGREGATION_MAX_ITER,
    )?;
    let degrees = match out {
        EvalOutcome::Converged { degrees, .. } => degrees,
        other => return Err(EvalError::NotConverged(other.status().to_string())),
    };
    let r = aggregation_residual(g, &degrees.degrees);
    if r > AGGREGATION_RESIDUAL {
        return Err(EvalError::NotConverged(format!(
            "fixed-point residual {r:e}"
        )));
    }
    Ok(DegreeVector {
        semantics: SemanticsTag::Aggregation,
        ..degrees
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Edge};

    pub(crate) fn rsig_square() -> ArgGraph {
        build_graph(
            &["a", "b", "c", "d"],
            &[
                Edge::support("a", "b"),
                Edge::support("b", "a"),
                Edge::support("c", "d"),
                Edge::support("d", "c"),
                Edge::attack("a", "c"),
                Edge::attack("c", "a"),
                Edge::attack("b", "d"),
                Edge::attack("d", "b"),
            ],
            &[0.75, 0.25, 0.75, 0.25],
        )
        .unwrap()
    }

    fn all_kinds(g: &ArgGraph) -> Vec<RecursiveKind> {
        let d = DampingFactor::for_graph(g);
        vec![
            RecursiveKind::Rsig,
            RecursiveKind::Rdamped(d),
            RecursiveKind::Dogged(d, SigmoidKind::Logistic),
            RecursiveKind::Dogged(d, SigmoidKind::Fraction),
        ]
    }

    #[test]
    fn rsig_square_first_step() {
        let g = rsig_square();
        assert_eq!(
            step(RecursiveKind::Rsig, &g, g.weights()).unwrap(),
            vec![0.5; 4]
        );
    }

    #[test]
    fn rsig_square_oscillates() {
        let g = rsig_square();
        let out = recursive_evaluate(RecursiveKind::Rsig, &g, 1e-9, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(
            out,
            EvalOutcome::Oscillating {
                period: 2,
                states: vec![vec![0.75, 0.25, 0.75, 0.25], vec![0.5; 4]]
            }
        );
    }

    #[test]
    fn edgeless_step_is_identity() {
        let g = build_graph(&["a", "b", "c"], &[], &[0.0, 0.3, 1.0]).unwrap();
        for k in all_kinds(&g) {
            assert_eq!(step(k, &g, g.weights()).unwrap(), g.weights());
        }
    }

    #[test]
    fn dogged_clamps() {
        let g = build_graph(
            &["a", "b", "c"],
            &[
                Edge::attack("b", "a"),
                Edge::attack("c", "a"),
                Edge::support("a", "c"),
            ],
            &[1.0, 0.9, 0.0],
        )
        .unwrap();
        let k = RecursiveKind::Dogged(DampingFactor::global(1.0).unwrap(), SigmoidKind::Logistic);
        let mut f = g.weights().to_vec();
        for _ in 0..20 {
            f = step(k, &g, &f).unwrap();
            assert_eq!(f[0], 1.0);
            assert_eq!(f[2], 0.0);
        }
    }

    #[test]
    fn rsig_chain() {
        let g = build_graph(&["a", "b"], &[Edge::support("a", "b")], &[0.5, 0.5]).unwrap();
        let out = recursive_evaluate(RecursiveKind::Rsig, &g, 1e-12, DEFAULT_MAX_ITER).unwrap();
        let d = out.degrees().unwrap();
        assert!((d[0] - 0.5).abs() < 1e-12);
        assert!((d[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(aggregation_residual(&g, d) < 1e-12);
        let agg = aggregation_based_evaluate(&g).unwrap();
        assert!((agg.degrees[1] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(agg.semantics, SemanticsTag::Aggregation);
    }

    #[test]
    fn aggregation_examples() {
        let e = build_graph(&["a", "b"], &[], &[0.2, 0.7]).unwrap();
        assert_eq!(
            aggregation_based_evaluate(&e).unwrap().degrees,
            vec![0.2, 0.7]
        );
        let top = build_graph(
            &["a", "b", "c"],
            &[
                Edge::support("b", "a"),
                Edge::support("c", "a"),
                Edge::support("a", "a"),
            ],
            &[1.0, 0.4, 0.9],
        )
        .unwrap();
        assert_eq!(aggregation_based_evaluate(&top).unwrap().degrees[0], 1.0);
        assert!(matches!(
            aggregation_based_evaluate(&rsig_square()),
            Err(EvalError::AttackEdgePresent(_))
        ));
    }

    #[test]
    fn weights_outside_unit_rejected() {
        let g = build_graph(&["a"], &[], &[1.5]).unwrap();
        assert!(matches!(
            step(RecursiveKind::Rsig, &g, &[0.5]),
            Err(EvalError::WeightOutOfClosedUnit { index: 0, .. })
        ));
    }

    #[test]
    fn rdamped_needs_indegree_damping() {
        let g = rsig_square();
        let k = RecursiveKind::Rdamped(DampingFactor::global(1.0).unwrap());
        assert!(matches!(
            step(k, &g, g.weights()),
            Err(EvalError::DampingTooSmall { .. })
        ));
    }

    #[test]
    fn branch_boundaries_agree() {
        // At s = 0 both case-forms give w; probe s = ±tiny on a single edge.
        for w in [0.0, 0.2, 0.5, 0.9, 1.0] {
            for (pol, fa) in [
                (Edge::support("a", "b"), 1e-12),
                (Edge::attack("a", "b"), 1e-12),
            ] {
                let g = build_graph(&["a", "b"], &[pol], &[fa, w]).unwrap();
                let d = DampingFactor::global(1.0).unwrap();
                for k in [RecursiveKind::Rsig, RecursiveKind::Rdamped(d)] {
                    let out = step(k, &g, &[fa, w]).unwrap();
                    assert!((out[1] - w).abs() < 1e-11);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn unit_graph(max_n: usize, support_only: bool) -> impl Strategy<Value = ArgGraph> {
            (1..=max_n).prop_flat_map(move |n| {
                let entries = if support_only {
                    prop_oneof![2 => Just(0i8), 1 => Just(1i8)].boxed()
                } else {
                    prop_oneof![3 => Just(0i8), 1 => Just(1i8), 1 => Just(-1i8)].boxed()
                };
                (
                    proptest::collection::vec(entries, n * n),
                    proptest::collection::vec(
                        prop_oneof![1 => Just(0.0), 1 => Just(1.0), 6 => 0.0f64..=1.0],
                        n,
                    ),
                )
                    .prop_map(|(inc, w)| ArgGraph::with_default_ids(inc, w).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn iterates_stay_in_unit_cube(g in unit_graph(8, false)) {
                // 200 cases × 4 kinds × 15 steps ≈ 10⁴ steps.
                for k in all_kinds(&g) {
                    let mut f = g.weights().to_vec();
                    for _ in 0..15 {
                        f = step(k, &g, &f).unwrap();
                        prop_assert!(f.iter().all(|x| (0.0..=1.0).contains(x)));
                    }
                }
            }

            #[test]
            fn dogged_absorbing(g in unit_graph(8, false)) {
                let k = RecursiveKind::Dogged(DampingFactor::global(1.0).unwrap(), SigmoidKind::Arctan);
                let mut f = g.weights().to_vec();
                for _ in 0..10 {
                    f = step(k, &g, &f).unwrap();
                    for i in 0..g.len() {
                        let w = g.weight(i);
                        if w == 0.0 || w == 1.0 {
                            prop_assert_eq!(f[i], w);
                        }
                    }
                }
            }

            #[test]
            fn aggregation_fixed_point(g in unit_graph(8, true)) {
                let out = aggregation_based_evaluate(&g).unwrap();
                prop_assert!(aggregation_residual(&g, &out.degrees) <= 1e-8);
                for i in 0..g.len() {
                    prop_assert!(out.degrees[i] >= g.weight(i) - 1e-15);
                }
            }
        }
    }
}

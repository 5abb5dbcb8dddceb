//! Direct aggregation: Deg = (I − G/d)⁻¹ w.

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::graph::ArgGraph;
use crate::iteration::{self, Classified, IterationConfig};
use crate::linalg::{diff_inf, mat_norm_inf, norm_inf, Lu};
use crate::outcome::{DegreeVector, EvalOutcome, SemanticsTag};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingPolicy {
    Global,
    GraphDependent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingFactor {
    value: f64,
    policy: DampingPolicy,
}

impl DampingFactor {
    pub fn global(value: f64) -> Result<DampingFactor, EvalError> {
        if !(value.is_finite() && value >= 1.0) {
            return Err(EvalError::InvalidDamping(value));
        }
        Ok(DampingFactor {
            value,
            policy: DampingPolicy::Global,
        })
    }

    /// d = indegree(G) + 1.
    pub fn for_graph(g: &ArgGraph) -> DampingFactor {
        DampingFactor {
            value: (g.indegree() + 1) as f64,
            policy: DampingPolicy::GraphDependent,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn policy(&self) -> DampingPolicy {
        self.policy
    }
}

/// How a caller asks for damping; resolved against a concrete graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum Damping {
    #[default]
    Auto,
    Global(f64),
}

impl Damping {
    pub fn resolve(&self, g: &ArgGraph) -> Result<DampingFactor, EvalError> {
        match *self {
            Damping::Auto => Ok(DampingFactor::for_graph(g)),
            Damping::Global(v) => DampingFactor::global(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationMatrix {
    n: usize,
    entries: Vec<f64>,
    damping: DampingFactor,
}

impl PropagationMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn damping(&self) -> DampingFactor {
        self.damping
    }

    pub fn norm_inf(&self) -> f64 {
        mat_norm_inf(&self.entries, self.n)
    }
}

/// Default budget 10·n + 1000.
pub fn default_max_iter(g: &ArgGraph) -> usize {
    10 * g.len() + 1000
}

pub fn divergence_bound(w: &[f64]) -> f64 {
    1e12 * (1.0 + norm_inf(w))
}

fn step(g: &ArgGraph, d: f64, w: &[f64], f: &[f64]) -> Vec<f64> {
    g.mul_vec(f)
        .iter()
        .zip(w)
        .map(|(s, wi)| wi + s / d)
        .collect()
}

/// The first iterates f_0 = w, f_i = w + G f_{i−1}/d.
pub fn series_iterates<'a>(
    g: &'a ArgGraph,
    d: &DampingFactor,
) -> impl Iterator<Item = Vec<f64>> + 'a {
    let d = d.value();
    let w = g.weights().to_vec();
    std::iter::successors(Some(w.clone()), move |f| Some(step(g, d, &w, f)))
}

pub fn series_evaluate(
    g: &ArgGraph,
    d: &DampingFactor,
    tol: f64,
    max_iter: usize,
) -> Result<EvalOutcome, EvalError> {
    series_on_weights(g, g.weights(), d, tol, max_iter, SemanticsTag::Dir)
}

pub(crate) fn series_on_weights(
    g: &ArgGraph,
    w: &[f64],
    d: &DampingFactor,
    tol: f64,
    max_iter: usize,
    tag: SemanticsTag,
) -> Result<EvalOutcome, EvalError> {
    let cfg = IterationConfig {
        tol,
        max_iter,
        divergence_bound: Some(divergence_bound(w)),
    };
    let dv = d.value();
    let out = iteration::run(w.to_vec(), &cfg, |f| step(g, dv, w, f))?;
    Ok(match out {
        Classified::Converged { state, iterations } => EvalOutcome::Converged {
            degrees: DegreeVector {
                degrees: state,
                semantics: tag,
                damping: Some(dv),
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

/// d must exceed the indegree of the hereditarily circular subgraph.
pub fn check_precondition(g: &ArgGraph, d: &DampingFactor) -> Result<(), EvalError> {
    let h = g.hereditarily_circular();
    if h.is_empty() {
        return Ok(());
    }
    let required = g.circular_indegree();
    if d.value() > required as f64 {
        Ok(())
    } else {
        Err(EvalError::DampingTooSmall {
            damping: d.value(),
            required,
        })
    }
}

fn system(g: &ArgGraph, d: f64) -> Vec<f64> {
    let n = g.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            a[i * n + j] = id - f64::from(g.entry(i, j)) / d;
        }
    }
    a
}

pub fn solve_evaluate(g: &ArgGraph, d: &DampingFactor) -> Result<DegreeVector, EvalError> {
    let degrees = solve_on_weights(g, g.weights(), d)?;
    Ok(DegreeVector {
        degrees,
        semantics: SemanticsTag::Dir,
        damping: Some(d.value()),
    })
}

pub(crate) fn solve_on_weights(
    g: &ArgGraph,
    w: &[f64],
    d: &DampingFactor,
) -> Result<Vec<f64>, EvalError> {
    check_precondition(g, d)?;
    let n = g.len();
    let a = system(g, d.value());
    let lu = Lu::factor(&a, n).ok_or(EvalError::SingularSystem {
        residual: f64::INFINITY,
    })?;
    let x = lu.solve_refined(&a, w);
    let r = residual_on_weights(g, w, d.value(), &x);
    if !(r <= RESIDUAL_TOL * (1.0 + norm_inf(&x))) {
        return Err(EvalError::SingularSystem { residual: r });
    }
    Ok(x)
}

/// (I − G/d)⁻¹. Defined whenever the system is nonsingular; it is the sum of
/// the Neumann series only when `check_precondition` holds.
pub fn propagation_matrix(g: &ArgGraph, d: &DampingFactor) -> Result<PropagationMatrix, EvalError> {
    let n = g.len();
    let a = system(g, d.value());
    let lu = Lu::factor(&a, n).ok_or(EvalError::SingularSystem {
        residual: f64::INFINITY,
    })?;
    let mut entries = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = lu.solve_refined(&a, &e);
        e[j] = 0.0;
        for i in 0..n {
            entries[i * n + j] = col[i];
        }
    }
    // Pr·(I − G/d) − I
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v: f64 = (0..n).map(|k| entries[i * n + k] * a[k * n + j]).sum();
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - id).abs());
        }
    }
    if !(worst <= RESIDUAL_TOL * (1.0 + mat_norm_inf(&entries, n))) {
        return Err(EvalError::SingularSystem { residual: worst });
    }
    Ok(PropagationMatrix {
        n,
        entries,
        damping: *d,
    })
}

/// ‖D − (w + G D/d)‖∞.
pub fn fixed_point_residual(
    g: &ArgGraph,
    d: &DampingFactor,
    degrees: &[f64],
) -> Result<f64, EvalError> {
    if degrees.len() != g.len() {
        return Err(crate::error::GraphError::DimensionMismatch {
            expected: g.len(),
            found: degrees.len(),
        }
        .into());
    }
    Ok(residual_on_weights(g, g.weights(), d.value(), degrees))
}

fn residual_on_weights(g: &ArgGraph, w: &[f64], d: f64, x: &[f64]) -> f64 {
    diff_inf(x, &step(g, d, w, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Edge};

    fn liverpool() -> ArgGraph {
        build_graph(
            &["mnw", "lpl", "wlm", "bpi"],
            &[
                Edge::support("mnw", "lpl"),
                Edge::support("wlm", "lpl"),
                Edge::attack("bpi", "wlm"),
            ],
            &[8.0, 0.0, 5.0, 2.0],
        )
        .unwrap()
    }

    fn school() -> ArgGraph {
        ArgGraph::from_rows(
            &["Miller", "Smith", "Alice", "Bob"],
            &[
                &[0, 1, 0, -1],
                &[1, 0, -1, 0],
                &[1, 0, 0, -1],
                &[0, 1, -1, 0],
            ],
            &[6.0, 4.0, 1.0, 1.5],
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && diff_inf(a, b) <= tol
    }

    fn d(v: f64) -> DampingFactor {
        DampingFactor::global(v).unwrap()
    }

    #[test]
    fn damping_policies() {
        let g = school();
        let auto = Damping::Auto.resolve(&g).unwrap();
        assert_eq!(auto.value(), 3.0);
        assert_eq!(auto.policy(), DampingPolicy::GraphDependent);
        assert!(DampingFactor::global(0.5).is_err());
        assert!(DampingFactor::global(f64::NAN).is_err());
    }

    #[test]
    fn series_self_attack_oscillates() {
        let g = build_graph(&["a"], &[Edge::attack("a", "a")], &[1.0]).unwrap();
        let out = series_evaluate(&g, &d(1.0), 1e-9, 100).unwrap();
        assert_eq!(
            out,
            EvalOutcome::Oscillating {
                period: 2,
                states: vec![vec![1.0], vec![0.0]]
            }
        );
    }

    #[test]
    fn series_liverpool() {
        let g = liverpool();
        let out = series_evaluate(&g, &d(2.0), 1e-9, default_max_iter(&g)).unwrap();
        assert!(close(out.degrees().unwrap(), &[8.0, 6.0, 4.0, 2.0], 1e-9));
    }

    #[test]
    fn series_edgeless_converges_at_one() {
        let g = build_graph(&["a", "b"], &[], &[1.5, -2.0]).unwrap();
        match series_evaluate(&g, &d(1.0), 1e-9, 10).unwrap() {
            EvalOutcome::Converged {
                degrees,
                iterations,
            } => {
                assert_eq!(iterations, 1);
                assert_eq!(degrees.degrees, vec![1.5, -2.0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn series_rejects_bad_config() {
        let g = liverpool();
        assert!(matches!(
            series_evaluate(&g, &d(2.0), 0.0, 10),
            Err(EvalError::InvalidTolerance(_))
        ));
        assert!(matches!(
            series_evaluate(&g, &d(2.0), 1e-9, 0),
            Err(EvalError::InvalidIterationBudget)
        ));
    }

    #[test]
    fn series_growth_classification() {
        // Linear growth never reaches the divergence bound, so the budget runs out.
        let g = build_graph(&["a"], &[Edge::support("a", "a")], &[1.0]).unwrap();
        assert!(matches!(
            series_evaluate(&g, &d(1.0), 1e-9, 10_000).unwrap(),
            EvalOutcome::NotWellDefined { .. }
        ));
        let g = build_graph(
            &["a", "b"],
            &[
                Edge::support("a", "a"),
                Edge::support("b", "b"),
                Edge::support("a", "b"),
                Edge::support("b", "a"),
            ],
            &[1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            series_evaluate(&g, &d(1.0), 1e-9, 10_000).unwrap(),
            EvalOutcome::Diverging { .. }
        ));
    }

    #[test]
    fn solve_worked_examples() {
        let s = solve_evaluate(&school(), &d(3.0)).unwrap();
        assert!(close(&s.degrees, &[7.0, 5.5, 2.5, 2.5], 1e-9));
        assert_eq!(s.damping, Some(3.0));
        let l3 = build_graph(
            &["mdd", "mpl", "wlm", "bpi", "mcw"],
            &[
                Edge::attack("mdd", "mpl"),
                Edge::attack("wlm", "mpl"),
                Edge::attack("mcw", "mpl"),
                Edge::attack("bpi", "wlm"),
            ],
            &[5.0, 0.0, 5.0, 2.0, 3.0],
        )
        .unwrap();
        assert!((solve_evaluate(&l3, &d(2.0)).unwrap().degrees[1] + 6.0).abs() < 1e-9);
        let l2 = build_graph(
            &["mdd", "lpl", "wlm", "bpi", "mcw"],
            &[
                Edge::support("mdd", "lpl"),
                Edge::support("wlm", "lpl"),
                Edge::support("mcw", "lpl"),
                Edge::attack("bpi", "wlm"),
            ],
            &[5.0, 0.0, 5.0, 2.0, 3.0],
        )
        .unwrap();
        assert!(close(
            &solve_evaluate(&l2, &d(2.0)).unwrap().degrees,
            &[5.0, 6.0, 4.0, 2.0, 3.0],
            1e-9
        ));
    }

    #[test]
    fn solve_refuses_small_damping() {
        let g = build_graph(&["a"], &[Edge::attack("a", "a")], &[1.0]).unwrap();
        assert!(matches!(
            solve_evaluate(&g, &d(1.0)),
            Err(EvalError::DampingTooSmall { required: 1, .. })
        ));
        // Acyclic graphs accept any d ≥ 1 even when d ≤ indegree.
        let fan = build_graph(
            &["a", "b", "c"],
            &[Edge::support("a", "c"), Edge::attack("b", "c")],
            &[1.0, 2.0, 3.0],
        )
        .unwrap();
        let deg = solve_evaluate(&fan, &d(1.0)).unwrap().degrees;
        assert!(close(&deg, &[1.0, 2.0, 2.0], 1e-12));
    }

    #[test]
    fn propagation_examples() {
        let one = build_graph(&["a", "b"], &[Edge::support("a", "b")], &[0.0, 0.0]).unwrap();
        for dv in [1.0, 2.0, 3.0, 5.0] {
            let pr = propagation_matrix(&one, &d(dv)).unwrap();
            assert!(close(pr.entries(), &[1.0, 0.0, 1.0 / dv, 1.0], 1e-12));
            let ss = build_graph(&["a"], &[Edge::support("a", "a")], &[0.0]).unwrap();
            let sa = build_graph(&["a"], &[Edge::attack("a", "a")], &[0.0]).unwrap();
            if dv > 1.0 {
                assert!(
                    (propagation_matrix(&ss, &d(dv)).unwrap().get(0, 0) - dv / (dv - 1.0)).abs()
                        < 1e-12
                );
                assert!(
                    (propagation_matrix(&sa, &d(dv)).unwrap().get(0, 0) - dv / (dv + 1.0)).abs()
                        < 1e-12
                );
            }
        }
        let pr = propagation_matrix(&school(), &d(3.0)).unwrap();
        let expect = [
            23.0, 5.0, 1.0, -8.0, 5.0, 23.0, -8.0, 1.0, 8.0, -1.0, 25.0, -11.0, -1.0, 8.0, -11.0,
            25.0,
        ]
        .map(|x| x / 21.0);
        assert!(close(pr.entries(), &expect, 1e-12));
    }

    #[test]
    fn residual_examples() {
        let g = school();
        let dd = d(3.0);
        let s = solve_evaluate(&g, &dd).unwrap();
        assert!(fixed_point_residual(&g, &dd, &s.degrees).unwrap() <= 1e-9);
        let e = build_graph(&["a", "b"], &[], &[1.0, 2.0]).unwrap();
        assert_eq!(fixed_point_residual(&e, &dd, &[1.0, 2.0]).unwrap(), 0.0);
        // Substitution oracle: D + 0.1 e_1 shifts component 1 by 0.1 and every
        // child of Miller by ±0.1/d.
        let mut p = s.degrees.clone();
        p[0] += 0.1;
        let r = fixed_point_residual(&g, &dd, &p).unwrap();
        assert!(r >= 0.1 * (1.0 - g.indegree() as f64 / 3.0));
        assert!((r - 0.1).abs() < 1e-12);
        assert!(fixed_point_residual(&g, &dd, &[1.0]).is_err());
    }

    #[test]
    fn acyclic_series_is_finite_sum() {
        let g = build_graph(
            &["a", "b", "c"],
            &[
                Edge::support("a", "b"),
                Edge::attack("b", "c"),
                Edge::support("a", "c"),
            ],
            &[1.0, 2.0, 3.0],
        )
        .unwrap();
        let dd = d(2.0);
        let pr = propagation_matrix(&g, &dd).unwrap();
        // Σ_{i<n} (G/d)^i, by hand: b gets 1/2 from a; c gets 1/2 from a,
        // −1/2 from b and −1/4 from a through b.
        let expect = [1.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.25, -0.5, 1.0];
        assert!(close(pr.entries(), &expect, 1e-12));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn graph_strategy(max_n: usize) -> impl Strategy<Value = ArgGraph> {
            (1..=max_n).prop_flat_map(|n| {
                (
                    proptest::collection::vec(
                        prop_oneof![3 => Just(0i8), 1 => Just(1i8), 1 => Just(-1i8)],
                        n * n,
                    ),
                    proptest::collection::vec(-5.0f64..5.0, n),
                )
                    .prop_map(|(inc, w)| ArgGraph::with_default_ids(inc, w).unwrap())
            })
        }

        fn acyclic_strategy(max_n: usize) -> impl Strategy<Value = ArgGraph> {
            graph_strategy(max_n).prop_map(|g| {
                let n = g.len();
                let mut inc = g.incidence().to_vec();
                for i in 0..n {
                    for j in i..n {
                        inc[i * n + j] = 0;
                    }
                }
                ArgGraph::with_default_ids(inc, g.weights().to_vec()).unwrap()
            })
        }

        proptest! {
            #[test]
            fn series_matches_solve(g in graph_strategy(10)) {
                let dd = DampingFactor::for_graph(&g);
                let s = solve_evaluate(&g, &dd).unwrap();
                let out = series_evaluate(&g, &dd, DEFAULT_TOL, default_max_iter(&g)).unwrap();
                let it = out.degrees().expect("series converges for d = indegree + 1");
                prop_assert!(diff_inf(it, &s.degrees) <= 1e-6);
            }

            #[test]
            fn degrees_linear_in_weights(g in graph_strategy(8), a in -2.0f64..2.0, b in -2.0f64..2.0, v in proptest::collection::vec(-5.0f64..5.0, 8)) {
                let dd = DampingFactor::for_graph(&g);
                let n = g.len();
                let u = g.weights().to_vec();
                let v = v[..n].to_vec();
                let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
                let du = solve_on_weights(&g, &u, &dd).unwrap();
                let dv = solve_on_weights(&g, &v, &dd).unwrap();
                let dm = solve_on_weights(&g, &mix, &dd).unwrap();
                for i in 0..n {
                    prop_assert!((dm[i] - (a * du[i] + b * dv[i])).abs() <= 1e-9 * (1.0 + dm[i].abs()));
                }
            }

            #[test]
            fn continuity_modulus(g in graph_strategy(8), delta in proptest::collection::vec(-1e-3f64..1e-3, 8)) {
                let dd = DampingFactor::for_graph(&g);
                let pr = propagation_matrix(&g, &dd).unwrap();
                let n = g.len();
                let w2: Vec<f64> = g.weights().iter().zip(&delta).map(|(x, e)| x + e).collect();
                let a = solve_on_weights(&g, g.weights(), &dd).unwrap();
                let b = solve_on_weights(&g, &w2, &dd).unwrap();
                prop_assert!(diff_inf(&a, &b) <= pr.norm_inf() * norm_inf(&delta[..n]) + 1e-12);
            }

            #[test]
            fn tiny_residual_means_solution(g in graph_strategy(8)) {
                let dd = DampingFactor::for_graph(&g);
                let s = solve_evaluate(&g, &dd).unwrap();
                let r = fixed_point_residual(&g, &dd, &s.degrees).unwrap();
                prop_assert!(r <= 1e-9 * (1.0 + norm_inf(&s.degrees)));
                // Near-solution from the series agrees with the solve.
                let out = series_evaluate(&g, &dd, 1e-13, 100_000).unwrap();
                if let Some(x) = out.degrees() {
                    if fixed_point_residual(&g, &dd, x).unwrap() <= 1e-12 {
                        prop_assert!(diff_inf(x, &s.degrees) <= 1e-9);
                    }
                }
            }

            #[test]
            fn acyclic_stationary_after_n(g in acyclic_strategy(8), dv in 1.0f64..4.0) {
                let dd = DampingFactor::global(dv).unwrap();
                let n = g.len();
                let its: Vec<Vec<f64>> = series_iterates(&g, &dd).take(n + 2).collect();
                prop_assert_eq!(&its[n], &its[n + 1]);
                let s = solve_evaluate(&g, &dd).unwrap();
                prop_assert!(diff_inf(&its[n], &s.degrees) <= 1e-9 * (1.0 + norm_inf(&s.degrees)));
            }
        }
    }
}

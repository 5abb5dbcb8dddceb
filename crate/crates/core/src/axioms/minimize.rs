//! Greedy counterexample shrinking: delete arguments, delete edges, then
//! replace weights by simpler values, keeping any step that still fails.

use super::checks::examine;
use super::{Characteristic, Instance, SemanticsUnderTest};
use crate::graph::ArgGraph;
use crate::semantics::WeightRange;

const MAX_ROUNDS: usize = 500;

fn simple_weights(range: WeightRange) -> &'static [f64] {
    match range {
        WeightRange::Real => &[1.0, 0.0, -1.0],
        WeightRange::OpenUnit => &[0.5, 0.25, 0.75],
        WeightRange::ClosedUnit => &[1.0, 0.0, 0.5],
    }
}

fn rank(list: &[f64], w: f64) -> usize {
    list.iter().position(|&v| v == w).unwrap_or(list.len())
}

fn fails(sut: &SemanticsUnderTest, c: Characteristic, inst: &Instance) -> bool {
    examine(sut, c, inst).is_ok_and(|f| f.is_violated())
}

pub(crate) fn minimize(sut: &SemanticsUnderTest, c: Characteristic, inst: &Instance) -> Instance {
    let mut current = inst.clone();
    for _ in 0..MAX_ROUNDS {
        match candidates(&current, sut.domain.weights)
            .into_iter()
            .find(|cand| fails(sut, c, cand))
        {
            Some(next) => current = next,
            None => break,
        }
    }
    current
}

fn drop_node(g: &ArgGraph, k: usize) -> ArgGraph {
    g.without_argument(k).expect("index in range")
}

fn shift(i: usize, k: usize) -> usize {
    if i > k {
        i - 1
    } else {
        i
    }
}

fn edge_removals(g: &ArgGraph, keep: &[(usize, usize)]) -> Vec<ArgGraph> {
    let n = g.len();
    let mut out = Vec::new();
    for t in 0..n {
        for s in 0..n {
            if g.entry(t, s) != 0 && !keep.contains(&(t, s)) {
                out.push(g.with_entry(t, s, 0).expect("index in range"));
            }
        }
    }
    out
}

/// Distinct weight values across `graphs`, in first-seen order.
fn weight_values(graphs: &[&ArgGraph]) -> Vec<f64> {
    let mut vals: Vec<f64> = Vec::new();
    for g in graphs {
        for &w in g.weights() {
            if !vals.contains(&w) {
                vals.push(w);
            }
        }
    }
    vals
}

fn replace_weight(g: &ArgGraph, from: f64, to: f64) -> ArgGraph {
    let w = g
        .weights()
        .iter()
        .map(|&x| if x == from { to } else { x })
        .collect();
    g.with_weights(w).expect("finite weights")
}

/// Every (from, to) pair where `to` is strictly simpler than `from`.
fn weight_moves(graphs: &[&ArgGraph], range: WeightRange) -> Vec<(f64, f64)> {
    let list = simple_weights(range);
    let mut moves = Vec::new();
    for v in weight_values(graphs) {
        let r = rank(list, v);
        for &c in &list[..r] {
            moves.push((v, c));
        }
    }
    moves
}

fn single_graph_moves(g: &ArgGraph, range: WeightRange, min_len: usize) -> Vec<ArgGraph> {
    let mut out = Vec::new();
    if g.len() > min_len {
        out.extend((0..g.len()).map(|k| drop_node(g, k)));
    }
    out.extend(edge_removals(g, &[]));
    out.extend(
        weight_moves(&[g], range)
            .into_iter()
            .map(|(f, t)| replace_weight(g, f, t)),
    );
    out
}

fn candidates(inst: &Instance, range: WeightRange) -> Vec<Instance> {
    match inst {
        Instance::Single { graph } => single_graph_moves(graph, range, 1)
            .into_iter()
            .map(|graph| Instance::Single { graph })
            .collect(),
        Instance::Anonymity { graph, permutation } => {
            let mut out = Vec::new();
            if graph.len() > 1 {
                for k in 0..graph.len() {
                    let pk = permutation[k];
                    let perm = permutation
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &p)| shift(p, pk))
                        .collect();
                    out.push(Instance::Anonymity {
                        graph: drop_node(graph, k),
                        permutation: perm,
                    });
                }
            }
            let rest = edge_removals(graph, &[]).into_iter().chain(
                weight_moves(&[graph], range)
                    .into_iter()
                    .map(|(f, t)| replace_weight(graph, f, t)),
            );
            out.extend(rest.map(|g| Instance::Anonymity {
                graph: g,
                permutation: permutation.clone(),
            }));
            out
        }
        Instance::Independence { left, right } => {
            let mut out: Vec<Instance> = single_graph_moves(left, range, 1)
                .into_iter()
                .map(|g| Instance::Independence {
                    left: g,
                    right: right.clone(),
                })
                .collect();
            out.extend(single_graph_moves(right, range, 1).into_iter().map(|g| {
                Instance::Independence {
                    left: left.clone(),
                    right: g,
                }
            }));
            out
        }
        Instance::Directionality {
            graph,
            target,
            source,
            sign,
        } => {
            let (t, s, sign) = (*target, *source, *sign);
            let mut out = Vec::new();
            for k in (0..graph.len()).filter(|&k| k != t && k != s) {
                out.push(Instance::Directionality {
                    graph: drop_node(graph, k),
                    target: shift(t, k),
                    source: shift(s, k),
                    sign,
                });
            }
            let rest = edge_removals(graph, &[]).into_iter().chain(
                weight_moves(&[graph], range)
                    .into_iter()
                    .map(|(f, to)| replace_weight(graph, f, to)),
            );
            out.extend(rest.map(|g| Instance::Directionality {
                graph: g,
                target: t,
                source: s,
                sign,
            }));
            if sign < 0 {
                out.push(Instance::Directionality {
                    graph: graph.clone(),
                    target: t,
                    source: s,
                    sign: 1,
                });
            }
            out
        }
        Instance::Pair {
            graph,
            modified,
            argument,
        } => pair_moves(graph, modified, *argument, range),
        Instance::Probe { graph, argument } => {
            let a = *argument;
            let mut out = Vec::new();
            for k in (0..graph.len()).filter(|&k| k != a) {
                out.push(Instance::Probe {
                    graph: drop_node(graph, k),
                    argument: shift(a, k),
                });
            }
            let rest = edge_removals(graph, &[]).into_iter().chain(
                weight_moves(&[graph], range)
                    .into_iter()
                    .map(|(f, t)| replace_weight(graph, f, t)),
            );
            out.extend(rest.map(|g| Instance::Probe {
                graph: g,
                argument: a,
            }));
            out
        }
    }
}

fn pair_moves(g: &ArgGraph, m: &ArgGraph, a: usize, range: WeightRange) -> Vec<Instance> {
    let n = g.len();
    let pair = |graph: ArgGraph, modified: ArgGraph, argument: usize| Instance::Pair {
        graph,
        modified,
        argument,
    };
    let mut out = Vec::new();
    // Shared arguments leave both graphs, extra ones only the modified graph.
    for k in (0..n).filter(|&k| k != a) {
        out.push(pair(drop_node(g, k), drop_node(m, k), shift(a, k)));
    }
    for k in n..m.len() {
        out.push(pair(g.clone(), drop_node(m, k), a));
    }
    for t in 0..n {
        for s in 0..n {
            let (eg, em) = (g.entry(t, s), m.entry(t, s));
            if eg != 0 && eg == em {
                out.push(pair(
                    g.with_entry(t, s, 0).expect("in range"),
                    m.with_entry(t, s, 0).expect("in range"),
                    a,
                ));
            }
        }
    }
    for t in 0..m.len() {
        for s in 0..m.len() {
            let shared = t < n && s < n && g.entry(t, s) == m.entry(t, s);
            if m.entry(t, s) != 0 && !shared {
                out.push(pair(g.clone(), m.with_entry(t, s, 0).expect("in range"), a));
            }
        }
    }
    for t in 0..n {
        for s in 0..n {
            if g.entry(t, s) != 0 && g.entry(t, s) != m.entry(t, s) {
                out.push(pair(g.with_entry(t, s, 0).expect("in range"), m.clone(), a));
            }
        }
    }
    for (f, to) in weight_moves(&[g, m], range) {
        out.push(pair(replace_weight(g, f, to), replace_weight(m, f, to), a));
    }
    out
}

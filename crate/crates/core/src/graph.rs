//! Weighted attack/support argumentation graphs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Support,
    Attack,
}

impl Polarity {
    pub fn sign(self) -> i8 {
        match self {
            Polarity::Support => 1,
            Polarity::Attack => -1,
        }
    }

    pub fn from_sign(s: i8) -> Option<Polarity> {
        match s {
            1 => Some(Polarity::Support),
            -1 => Some(Polarity::Attack),
            _ => None,
        }
    }

    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Support => Polarity::Attack,
            Polarity::Attack => Polarity::Support,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub polarity: Polarity,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>, polarity: Polarity) -> Edge {
        Edge {
            source: source.into(),
            target: target.into(),
            polarity,
        }
    }

    pub fn support(source: impl Into<String>, target: impl Into<String>) -> Edge {
        Edge::new(source, target, Polarity::Support)
    }

    pub fn attack(source: impl Into<String>, target: impl Into<String>) -> Edge {
        Edge::new(source, target, Polarity::Attack)
    }
}

/// A graph ⟨A, G, w⟩. Entry `(i, j)` of the incidence matrix is +1 when `j`
/// supports `i`, −1 when `j` attacks `i`, 0 otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct ArgGraph {
    ids: Vec<String>,
    incidence: Vec<i8>,
    weights: Vec<f64>,
}

/// Serialized form: one incidence row per argument.
#[derive(Serialize, Deserialize)]
struct RawGraph {
    ids: Vec<String>,
    rows: Vec<Vec<i8>>,
    weights: Vec<f64>,
}

impl From<ArgGraph> for RawGraph {
    fn from(g: ArgGraph) -> RawGraph {
        let n = g.len();
        let rows = (0..n).map(|i| g.parent_row(i).to_vec()).collect();
        RawGraph {
            ids: g.ids,
            rows,
            weights: g.weights,
        }
    }
}

impl TryFrom<RawGraph> for ArgGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<ArgGraph, GraphError> {
        let n = raw.ids.len();
        if let Some(r) = raw.rows.iter().find(|r| r.len() != n) {
            return Err(GraphError::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        if raw.rows.len() != n {
            return Err(GraphError::DimensionMismatch {
                expected: n,
                found: raw.rows.len(),
            });
        }
        ArgGraph::new(raw.ids, raw.rows.concat(), raw.weights)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NeighborSets {
    pub attackers: BTreeSet<usize>,
    pub supporters: BTreeSet<usize>,
    pub backers: BTreeSet<usize>,
    pub detractors: BTreeSet<usize>,
}

pub fn build_graph<S: AsRef<str>>(
    arguments: &[S],
    edges: &[Edge],
    weights: &[f64],
) -> Result<ArgGraph, GraphError> {
    let n = arguments.len();
    if weights.len() != n {
        return Err(GraphError::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    let mut index = HashMap::with_capacity(n);
    for (i, a) in arguments.iter().enumerate() {
        if index.insert(a.as_ref().to_string(), i).is_some() {
            return Err(GraphError::DuplicateArgument(a.as_ref().to_string()));
        }
    }
    let mut incidence = vec![0i8; n * n];
    for e in edges {
        let s = *index
            .get(&e.source)
            .ok_or_else(|| GraphError::UnknownEndpoint(e.source.clone()))?;
        let t = *index
            .get(&e.target)
            .ok_or_else(|| GraphError::UnknownEndpoint(e.target.clone()))?;
        if incidence[t * n + s] != 0 {
            return Err(GraphError::DuplicateEdge {
                from: e.source.clone(),
                to: e.target.clone(),
            });
        }
        incidence[t * n + s] = e.polarity.sign();
    }
    let ids = arguments.iter().map(|a| a.as_ref().to_string()).collect();
    ArgGraph::new(ids, incidence, weights.to_vec())
}

impl ArgGraph {
    /// `incidence` is row-major, n×n.
    pub fn new(
        ids: Vec<String>,
        incidence: Vec<i8>,
        weights: Vec<f64>,
    ) -> Result<ArgGraph, GraphError> {
        let n = ids.len();
        if weights.len() != n {
            return Err(GraphError::DimensionMismatch {
                expected: n,
                found: weights.len(),
            });
        }
        if incidence.len() != n * n {
            return Err(GraphError::DimensionMismatch {
                expected: n * n,
                found: incidence.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(GraphError::DuplicateArgument(id.clone()));
            }
        }
        if let Some(&v) = incidence.iter().find(|&&v| !(-1..=1).contains(&v)) {
            return Err(GraphError::InvalidEntry(v));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(GraphError::NonFiniteWeight(ids[i].clone()));
        }
        Ok(ArgGraph {
            ids,
            incidence,
            weights,
        })
    }

    pub fn from_rows(
        ids: &[&str],
        rows: &[&[i8]],
        weights: &[f64],
    ) -> Result<ArgGraph, GraphError> {
        let n = ids.len();
        if rows.len() != n {
            return Err(GraphError::DimensionMismatch {
                expected: n,
                found: rows.len(),
            });
        }
        let mut incidence = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(GraphError::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            incidence.extend_from_slice(r);
        }
        ArgGraph::new(
            ids.iter().map(|s| s.to_string()).collect(),
            incidence,
            weights.to_vec(),
        )
    }

    /// Arguments named `a0, a1, …`.
    pub fn with_default_ids(incidence: Vec<i8>, weights: Vec<f64>) -> Result<ArgGraph, GraphError> {
        let ids = (0..weights.len()).map(|i| format!("a{i}")).collect();
        ArgGraph::new(ids, incidence, weights)
    }

    pub fn empty() -> ArgGraph {
        ArgGraph {
            ids: Vec::new(),
            incidence: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn incidence(&self) -> &[i8] {
        &self.incidence
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.incidence[i * self.len() + j]
    }

    /// Row `i` of the incidence matrix: the parents of argument `i`.
    pub fn parent_row(&self, i: usize) -> &[i8] {
        let n = self.len();
        &self.incidence[i * n..(i + 1) * n]
    }

    pub fn parents(&self, i: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.parent_row(i)
            .iter()
            .enumerate()
            .filter(|(_, &g)| g != 0)
            .map(|(j, &g)| (j, g))
    }

    pub fn edges(&self) -> Vec<Edge> {
        let n = self.len();
        let mut out = Vec::new();
        for t in 0..n {
            for s in 0..n {
                if let Some(p) = Polarity::from_sign(self.entry(t, s)) {
                    out.push(Edge::new(self.ids[s].clone(), self.ids[t].clone(), p));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.incidence.iter().filter(|&&g| g != 0).count()
    }

    fn check_index(&self, i: usize) -> Result<(), GraphError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(GraphError::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<ArgGraph, GraphError> {
        ArgGraph::new(self.ids.clone(), self.incidence.clone(), weights)
    }

    pub fn with_weight(&self, i: usize, w: f64) -> Result<ArgGraph, GraphError> {
        self.check_index(i)?;
        let mut weights = self.weights.clone();
        weights[i] = w;
        self.with_weights(weights)
    }

    /// Sets entry `(target, source)`; `sign` 0 removes the edge.
    pub fn with_entry(
        &self,
        target: usize,
        source: usize,
        sign: i8,
    ) -> Result<ArgGraph, GraphError> {
        self.check_index(target)?;
        self.check_index(source)?;
        if !(-1..=1).contains(&sign) {
            return Err(GraphError::InvalidEntry(sign));
        }
        let mut g = self.clone();
        let n = g.len();
        g.incidence[target * n + source] = sign;
        Ok(g)
    }

    pub fn without_argument(&self, k: usize) -> Result<ArgGraph, GraphError> {
        self.check_index(k)?;
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != k).collect();
        Ok(self.induced(&keep))
    }

    /// Subgraph on `keep`, in that order.
    pub fn induced(&self, keep: &[usize]) -> ArgGraph {
        let m = keep.len();
        let mut incidence = vec![0i8; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                incidence[a * m + b] = self.entry(i, j);
            }
        }
        ArgGraph {
            ids: keep.iter().map(|&i| self.ids[i].clone()).collect(),
            incidence,
            weights: keep.iter().map(|&i| self.weights[i]).collect(),
        }
    }

    /// Relabels so that old argument `i` becomes new argument `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<ArgGraph, GraphError> {
        let n = self.len();
        if perm.len() != n {
            return Err(GraphError::SizeMismatch {
                left: n,
                right: perm.len(),
            });
        }
        let mut inverse = vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || inverse[p] != usize::MAX {
                return Err(GraphError::NotABijection);
            }
            inverse[p] = i;
        }
        let mut incidence = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                incidence[perm[i] * n + perm[j]] = self.entry(i, j);
            }
        }
        Ok(ArgGraph {
            ids: inverse.iter().map(|&i| self.ids[i].clone()).collect(),
            incidence,
            weights: inverse.iter().map(|&i| self.weights[i]).collect(),
        })
    }

    pub fn with_ids(&self, ids: Vec<String>) -> Result<ArgGraph, GraphError> {
        ArgGraph::new(ids, self.incidence.clone(), self.weights.clone())
    }

    pub fn prefixed(&self, prefix: &str) -> ArgGraph {
        ArgGraph {
            ids: self.ids.iter().map(|s| format!("{prefix}{s}")).collect(),
            incidence: self.incidence.clone(),
            weights: self.weights.clone(),
        }
    }

    /// Appends a parentless argument with no outgoing edges.
    pub fn with_argument(&self, id: impl Into<String>, w: f64) -> Result<ArgGraph, GraphError> {
        let single = ArgGraph::new(vec![id.into()], vec![0], vec![w])?;
        union(self, &single)
    }

    pub fn neighbors(&self, a: usize) -> Result<NeighborSets, GraphError> {
        self.check_index(a)?;
        let mut sets = NeighborSets::default();
        for (j, g) in self.parents(a) {
            if g > 0 {
                sets.supporters.insert(j);
            } else {
                sets.attackers.insert(j);
            }
        }
        // Signed reachability: a parent of a backer (resp. detractor) joins
        // with the sign flipped by an attack edge.
        let mut queue: VecDeque<(usize, bool)> = VecDeque::new();
        for &j in &sets.supporters {
            sets.backers.insert(j);
            queue.push_back((j, true));
        }
        for &j in &sets.attackers {
            sets.detractors.insert(j);
            queue.push_back((j, false));
        }
        while let Some((y, backer)) = queue.pop_front() {
            for (z, g) in self.parents(y) {
                let as_backer = backer == (g > 0);
                let fresh = if as_backer {
                    sets.backers.insert(z)
                } else {
                    sets.detractors.insert(z)
                };
                if fresh {
                    queue.push_back((z, as_backer));
                }
            }
        }
        Ok(sets)
    }

    pub fn influence(&self, v: &[f64]) -> Result<Vec<f64>, GraphError> {
        if v.len() != self.len() {
            return Err(GraphError::DimensionMismatch {
                expected: self.len(),
                found: v.len(),
            });
        }
        Ok(self.mul_vec(v))
    }

    pub(crate) fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                self.parent_row(i)
                    .iter()
                    .zip(v)
                    .fold(0.0, |acc, (&g, &x)| match g {
                        1 => acc + x,
                        -1 => acc - x,
                        _ => acc,
                    })
            })
            .collect()
    }

    /// Zeroes row and column of every target and sets its weight to `neutral`.
    pub fn isolate(&self, targets: &[usize], neutral: f64) -> Result<ArgGraph, GraphError> {
        let n = self.len();
        let mut g = self.clone();
        for &t in targets {
            self.check_index(t)?;
            for k in 0..n {
                g.incidence[t * n + k] = 0;
                g.incidence[k * n + t] = 0;
            }
            g.weights[t] = neutral;
        }
        Ok(g)
    }

    /// `mapping[i]` is the index in `other` that argument `i` maps to.
    pub fn is_isomorphic(&self, other: &ArgGraph, mapping: &[usize]) -> Result<bool, GraphError> {
        let n = self.len();
        if other.len() != n || mapping.len() != n {
            return Err(GraphError::SizeMismatch {
                left: n,
                right: if other.len() != n {
                    other.len()
                } else {
                    mapping.len()
                },
            });
        }
        let mut hit = vec![false; n];
        for &m in mapping {
            if m >= n || hit[m] {
                return Ok(false);
            }
            hit[m] = true;
        }
        for i in 0..n {
            if self.weights[i] != other.weights[mapping[i]] {
                return Ok(false);
            }
            for j in 0..n {
                if self.entry(i, j) != other.entry(mapping[i], mapping[j]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn indegree(&self) -> usize {
        (0..self.len())
            .map(|i| self.parent_row(i).iter().filter(|&&g| g != 0).count())
            .max()
            .unwrap_or(0)
    }

    /// Nodes lying on a cycle of parent relations (self-loops included).
    pub fn circular(&self) -> BTreeSet<usize> {
        let n = self.len();
        let mut dg: DiGraph<(), ()> = DiGraph::with_capacity(n, self.edge_count());
        let nodes: Vec<_> = (0..n).map(|_| dg.add_node(())).collect();
        for i in 0..n {
            for (j, _) in self.parents(i) {
                dg.add_edge(nodes[j], nodes[i], ());
            }
        }
        let mut out = BTreeSet::new();
        for scc in tarjan_scc(&dg) {
            if scc.len() > 1 {
                out.extend(scc.iter().map(|x| x.index()));
            } else {
                let k = scc[0].index();
                if self.entry(k, k) != 0 {
                    out.insert(k);
                }
            }
        }
        out
    }

    /// Circular nodes plus every node reachable from one.
    pub fn hereditarily_circular(&self) -> BTreeSet<usize> {
        let n = self.len();
        let mut out = self.circular();
        let mut queue: VecDeque<usize> = out.iter().copied().collect();
        while let Some(j) = queue.pop_front() {
            for i in 0..n {
                if self.entry(i, j) != 0 && out.insert(i) {
                    queue.push_back(i);
                }
            }
        }
        out
    }

    /// Indegree of the subgraph induced by the hereditarily circular nodes.
    pub fn circular_indegree(&self) -> usize {
        let h = self.hereditarily_circular();
        h.iter()
            .map(|&i| h.iter().filter(|&&j| self.entry(i, j) != 0).count())
            .max()
            .unwrap_or(0)
    }

    pub fn is_bwsa(&self) -> bool {
        self.incidence.iter().all(|&g| g >= 0)
            && self.weights.iter().all(|&w| (0.0..=1.0).contains(&w))
    }

    pub fn has_attack(&self) -> bool {
        self.incidence.iter().any(|&g| g < 0)
    }
}

/// Block-diagonal union of graphs with disjoint ids.
pub fn union(g1: &ArgGraph, g2: &ArgGraph) -> Result<ArgGraph, GraphError> {
    let left: BTreeSet<&str> = g1.ids.iter().map(String::as_str).collect();
    if let Some(shared) = g2.ids.iter().find(|id| left.contains(id.as_str())) {
        return Err(GraphError::SharedComponent(shared.clone()));
    }
    let (n1, n2) = (g1.len(), g2.len());
    let n = n1 + n2;
    let mut incidence = vec![0i8; n * n];
    for i in 0..n1 {
        incidence[i * n..i * n + n1].copy_from_slice(g1.parent_row(i));
    }
    for i in 0..n2 {
        let r = (n1 + i) * n + n1;
        incidence[r..r + n2].copy_from_slice(g2.parent_row(i));
    }
    let mut ids = g1.ids.clone();
    ids.extend(g2.ids.iter().cloned());
    let mut weights = g1.weights.clone();
    weights.extend_from_slice(&g2.weights);
    Ok(ArgGraph {
        ids,
        incidence,
        weights,
    })
}

//! Instance samplers, one per characteristic.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::draft::Draft;
use super::{Characteristic, Instance, SamplerConfig, SemanticsUnderTest};
use crate::graph::ArgGraph;
use crate::random::{random_polarity, PolarityRestriction};
use crate::semantics::WeightRange;

/// Open-interval weights are drawn from this inner range.
pub(crate) const OPEN_INNER: (f64, f64) = (0.02, 0.98);
const REAL_RANGE: (f64, f64) = (-5.0, 5.0);
const MIN_GAP: f64 = 0.05;

pub(crate) struct Gen<'a> {
    pub rng: ChaCha8Rng,
    sut: &'a SemanticsUnderTest,
    cfg: SamplerConfig,
}

impl<'a> Gen<'a> {
    pub fn new(rng: ChaCha8Rng, sut: &'a SemanticsUnderTest, cfg: SamplerConfig) -> Gen<'a> {
        Gen { rng, sut, cfg }
    }

    fn range(&self) -> (f64, f64) {
        match self.sut.domain.weights {
            WeightRange::Real => REAL_RANGE,
            WeightRange::OpenUnit => OPEN_INNER,
            WeightRange::ClosedUnit => (0.0, 1.0),
        }
    }

    pub fn weight(&mut self) -> f64 {
        if self.sut.domain.weights == WeightRange::ClosedUnit {
            let u: f64 = self.rng.gen();
            if u < 0.1 {
                return 0.0;
            }
            if u < 0.2 {
                return 1.0;
            }
        }
        let (lo, hi) = self.range();
        self.rng.gen_range(lo..=hi)
    }

    /// A weight at least `MIN_GAP` away from `w`.
    fn weight_apart(&mut self, w: f64) -> Option<f64> {
        (0..32)
            .map(|_| self.weight())
            .find(|v| (v - w).abs() >= MIN_GAP)
    }

    fn weight_above(&mut self, v: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        let lo = lo.max(v + MIN_GAP);
        (lo < hi).then(|| self.rng.gen_range(lo..=hi))
    }

    fn weight_below(&mut self, v: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        let hi = hi.min(v - MIN_GAP);
        (lo < hi).then(|| self.rng.gen_range(lo..=hi))
    }

    fn sign(&mut self) -> i8 {
        random_polarity(&mut self.rng, self.sut.domain.polarity)
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi.max(lo))
    }

    /// Random graph with `lo..=hi` arguments.
    pub fn draft(&mut self, lo: usize, hi: usize) -> Draft {
        let n = self.size(lo, hi);
        let mut d = Draft::from_graph(&ArgGraph::empty());
        for _ in 0..n {
            let w = self.weight();
            d.push(w);
        }
        for t in 0..n {
            for s in 0..n {
                if self.coin(self.cfg.density) {
                    let sign = self.sign();
                    d.set(t, s, sign);
                }
            }
        }
        d
    }

    pub fn graph(&mut self, lo: usize, hi: usize) -> ArgGraph {
        self.draft(lo, hi).build()
    }

    /// Random parents for a new argument, drawn from `0..cols`.
    fn random_parents(&mut self, d: &mut Draft, target: usize, cols: usize) {
        for s in 0..cols {
            if self.coin(self.cfg.density) {
                let sign = self.sign();
                d.set(target, s, sign);
            }
        }
    }

    /// Random outgoing edges from `source` into `targets`.
    fn random_children(&mut self, d: &mut Draft, source: usize, targets: &[usize], p: f64) {
        for &t in targets {
            if self.coin(p) {
                let sign = self.sign();
                d.set(t, source, sign);
            }
        }
    }

    fn bipolar(&self) -> bool {
        self.sut.domain.polarity == PolarityRestriction::Bipolar
    }

    pub fn instance(&mut self, c: Characteristic) -> Instance {
        use Characteristic::*;
        let n_max = self.cfg.n_max.max(3);
        match c {
            Anonymity => {
                let graph = self.graph(1, n_max);
                let mut permutation: Vec<usize> = (0..graph.len()).collect();
                permutation.shuffle(&mut self.rng);
                Instance::Anonymity { graph, permutation }
            }
            Independence => {
                let half = n_max / 2 + 1;
                let left = self.graph(1, half);
                let right = self.graph(1, half).prefixed("b");
                Instance::Independence { left, right }
            }
            Directionality => {
                let graph = self.graph(1, n_max);
                let n = graph.len();
                let free: Vec<(usize, usize)> = (0..n)
                    .flat_map(|t| (0..n).map(move |s| (t, s)))
                    .filter(|&(t, s)| graph.entry(t, s) == 0)
                    .collect();
                let (target, source) = free.choose(&mut self.rng).copied().unwrap_or((0, 0));
                let sign = self.sign();
                Instance::Directionality {
                    graph,
                    target,
                    source,
                    sign,
                }
            }
            Equivalence => self.equivalence(n_max),
            Conservativity | Boundedness => {
                let mut d = self.draft(1, n_max - 1);
                if self.coin(0.7) {
                    let w = self.weight();
                    let n = d.len();
                    let x = d.push(w);
                    let targets: Vec<usize> = (0..n).collect();
                    self.random_children(&mut d, x, &targets, self.cfg.density);
                }
                Instance::Single { graph: d.build() }
            }
            InitialMonotony => self.initial_monotony(n_max),
            Neutrality => {
                let mut d = self.draft(1, n_max - 1);
                let n = d.len();
                let x = d.push(self.sut.neutral);
                let targets: Vec<usize> = (0..n).collect();
                self.random_children(&mut d, x, &targets, 0.5);
                Instance::Single { graph: d.build() }
            }
            ParentMonotony => self.parent_monotony(n_max),
            Impact => self.fresh_parent(n_max, true),
            ReverseImpact => self.fresh_parent(n_max, false),
            Reinforcement => self.reinforcement(n_max),
            Causality => {
                let mut d = self.draft(1, n_max - 2);
                let a = self.rng.gen_range(0..d.len());
                if self.coin(0.6) {
                    let n = d.len();
                    d.set_row(a, vec![0; n]);
                    for _ in 0..self.rng.gen_range(0..=2) {
                        let x = d.push(self.sut.neutral);
                        let sign = self.sign();
                        d.set(a, x, sign);
                    }
                }
                Instance::Single { graph: d.build() }
            }
            Stickiness => self.stickiness(n_max),
            Dummy => self.dummy(n_max),
            Neutralisation => self.neutralisation(n_max),
            Interchangeability => self.interchangeability(n_max),
            Continuity | Linearity => {
                let graph = self.graph(1, n_max);
                let argument = self.rng.gen_range(0..graph.len());
                Instance::Probe { graph, argument }
            }
        }
    }

    fn equivalence(&mut self, n_max: usize) -> Instance {
        let mut d = self.draft(1, n_max - 2);
        let n = d.len();
        let a = self.rng.gen_range(0..n);
        let b = d.push(d.weights[a]);
        let mut row = d.row(a).to_vec();
        // Optionally route one of b's parent slots through a twin of that parent.
        let parents: Vec<usize> = (0..n).filter(|&j| j != a && row[j] != 0).collect();
        let mut frozen = vec![a];
        if let Some(&x) = parents.choose(&mut self.rng) {
            if self.coin(0.5) {
                let x2 = d.push(d.weights[x]);
                let mut xr = d.row(x).to_vec();
                xr[x2] = 0;
                d.set_row(x2, xr);
                row.push(0);
                row[x2] = row[x];
                row[x] = 0;
                frozen.push(x);
            }
        }
        row.resize(d.len(), 0);
        d.set_row(b, row);
        let targets: Vec<usize> = (0..n).filter(|t| !frozen.contains(t)).collect();
        self.random_children(&mut d, b, &targets, self.cfg.density);
        Instance::Single { graph: d.build() }
    }

    fn initial_monotony(&mut self, n_max: usize) -> Instance {
        let mut d = self.draft(1, n_max - 1);
        let n = d.len();
        let a = self.rng.gen_range(0..n);
        let w = self.weight_apart(d.weights[a]).unwrap_or(d.weights[a]);
        let b = d.push(w);
        let mut row = d.row(a).to_vec();
        row[b] = 0;
        d.set_row(b, row);
        let targets: Vec<usize> = (0..n).filter(|&t| t != a).collect();
        self.random_children(&mut d, b, &targets, self.cfg.density);
        Instance::Single { graph: d.build() }
    }

    fn parent_monotony(&mut self, n_max: usize) -> Instance {
        let base = self.draft(1, n_max - 1);
        let n = base.len();
        let a = self.rng.gen_range(0..n);
        let mut m = base.clone();
        let mut changed = false;
        for _ in 0..self.rng.gen_range(1..=2) {
            match self.rng.gen_range(0..4) {
                0 => {
                    let att: Vec<usize> = (0..n).filter(|&j| m.get(a, j) < 0).collect();
                    if let Some(&j) = att.choose(&mut self.rng) {
                        m.set(a, j, 0);
                        changed = true;
                    }
                }
                1 => {
                    let free: Vec<usize> = (0..n).filter(|&j| m.get(a, j) == 0).collect();
                    if let Some(&j) = free.choose(&mut self.rng) {
                        m.set(a, j, 1);
                        changed = true;
                    }
                }
                2 => {
                    let w = self.weight();
                    let j = m.push(w);
                    m.set(a, j, 1);
                    changed = true;
                }
                _ => {
                    // Weaken an attacker or strengthen a supporter through its weight.
                    let parents: Vec<usize> =
                        (0..n).filter(|&j| j != a && m.get(a, j) != 0).collect();
                    if let Some(&j) = parents.choose(&mut self.rng) {
                        let w = m.weights[j];
                        let nw = if m.get(a, j) < 0 {
                            self.weight_below(w)
                        } else {
                            self.weight_above(w)
                        };
                        if let Some(nw) = nw {
                            m.weights[j] = nw;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            let w = self.weight();
            let j = m.push(w);
            m.set(a, j, 1);
        }
        Instance::Pair {
            graph: base.build(),
            modified: m.build(),
            argument: a,
        }
    }

    fn reinforcement(&mut self, n_max: usize) -> Instance {
        let mut base = self.draft(1, n_max - 1);
        let n = base.len();
        let a = self.rng.gen_range(0..n);
        let mut parents: Vec<usize> = (0..n).filter(|&j| j != a && base.get(a, j) != 0).collect();
        if parents.is_empty() {
            let w = self.weight();
            let j = base.push(w);
            let sign = self.sign();
            base.set(a, j, sign);
            parents.push(j);
        }
        let b = *parents.choose(&mut self.rng).expect("non-empty");
        let mut m = base.clone();
        m.weights[b] = self
            .weight_apart(base.weights[b])
            .unwrap_or(base.weights[b]);
        Instance::Pair {
            graph: base.build(),
            modified: m.build(),
            argument: a,
        }
    }

    /// A new parentless argument with weight above (or below) ν attached to
    /// a random argument.
    fn fresh_parent(&mut self, n_max: usize, above_neutral: bool) -> Instance {
        let mut d = self.draft(1, n_max - 1);
        let a = self.rng.gen_range(0..d.len());
        let nu = self.sut.neutral;
        let w = if above_neutral {
            self.weight_above(nu)
        } else {
            self.weight_below(nu)
        };
        if let Some(w) = w {
            let b = d.push(w);
            let sign = self.sign();
            d.set(a, b, sign);
        }
        Instance::Single { graph: d.build() }
    }

    fn subset(&mut self, cols: usize) -> Vec<usize> {
        (0..cols).filter(|_| self.rng.gen_bool(0.4)).collect()
    }

    fn stickiness(&mut self, n_max: usize) -> Instance {
        let mut d = self.draft(0, n_max.saturating_sub(4));
        let n = d.len();
        let common = self.subset(n);
        let hi = self.weight_above(0.0).unwrap_or(1.0);
        let lo = self.weight_below(hi).unwrap_or(0.0);
        let x = d.push(hi);
        let y = d.push(lo);
        let w = if self.coin(0.5) { 1.0 } else { self.weight() };
        let a = d.push(w);
        let b = d.push(w);
        for &c in &common {
            d.set(a, c, 1);
            d.set(b, c, 1);
        }
        d.set(a, x, 1);
        d.set(b, y, 1);
        Instance::Single { graph: d.build() }
    }

    fn dummy(&mut self, n_max: usize) -> Instance {
        let mut d = self.draft(0, n_max.saturating_sub(3));
        let n = d.len();
        let common = self.subset(n);
        let x = d.push(self.sut.neutral);
        let w = self.weight();
        let a = d.push(w);
        let b = d.push(w);
        for &c in &common {
            d.set(a, c, 1);
            d.set(b, c, 1);
        }
        d.set(a, x, 1);
        Instance::Single { graph: d.build() }
    }

    fn neutralisation(&mut self, n_max: usize) -> Instance {
        let mut d = self.draft(1, n_max - 2);
        if !self.bipolar() {
            return Instance::Single { graph: d.build() };
        }
        let n = d.len();
        let m = self.rng.gen_range(0..n);
        let w = self.weight();
        let k = d.push(w);
        let l = d.push(w);
        self.random_parents(&mut d, k, n);
        let row = d.row(k).to_vec();
        d.set_row(l, row);
        d.set(m, k, -1);
        d.set(m, l, 1);
        Instance::Single { graph: d.build() }
    }

    fn interchangeability(&mut self, n_max: usize) -> Instance {
        let mut d = self.draft(1, n_max - 2);
        let n = d.len();
        let w = self.weight();
        let j = d.push(w);
        let k = d.push(w);
        self.random_parents(&mut d, j, n);
        let row = d.row(j).to_vec();
        d.set_row(k, row);
        let targets: Vec<usize> = (0..n).collect();
        self.random_children(&mut d, j, &targets, 0.5);
        self.random_children(&mut d, k, &targets, 0.5);
        let i = self.rng.gen_range(0..n);
        if d.get(i, j) == d.get(i, k) {
            let sign = self.sign();
            d.set(i, j, sign);
            d.set(i, k, 0);
        }
        Instance::Single { graph: d.build() }
    }
}

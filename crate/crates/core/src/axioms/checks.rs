//! Conclusion checks on concrete instances, and the sampling loop.

use super::generate::Gen;
use super::minimize::minimize;
use super::{
    stream, AxiomError, Characteristic, Counterexample, Instance, LabeledGraph, SamplerConfig,
    SemanticsUnderTest, Verdict, TOL,
};
use crate::error::EvalError;
use crate::graph::{union, ArgGraph};
use crate::linalg::norm_inf;

/// Equality tolerance for hypotheses, tighter than `TOL` so that a
/// hypothesis that barely holds cannot push a conclusion out of tolerance.
const HYP_TOL: f64 = 1e-9;
/// Slack for non-strict hypothesis inequalities.
const SLACK: f64 = 1e-10;
/// Margin a strict hypothesis inequality must clear.
const HYP_STRICT: f64 = 1e-7;
/// Finite-difference steps for the continuity probe.
const CONTINUITY_STEPS: [f64; 3] = [1e-2, 1e-4, 1e-6];
/// Each step must at least shrink the degree change by this factor.
const CONTINUITY_SHRINK: f64 = 0.5;
/// Interchangeability triples examined per instance.
const MAX_TRIPLES: usize = 24;

fn scale(a: f64, b: f64) -> f64 {
    1.0 + a.abs().max(b.abs())
}

pub(crate) fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * scale(a, b)
}

pub(crate) fn eq_tol(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale(a, b)
}

pub(crate) fn hyp_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= HYP_TOL * scale(a, b)
}

pub(crate) fn hyp_le(a: f64, b: f64) -> bool {
    a <= b + SLACK * scale(a, b)
}

pub(crate) fn hyp_lt(a: f64, b: f64) -> bool {
    a + HYP_STRICT * scale(a, b) < b
}

/// `a > b` beyond rounding noise.
pub(crate) fn gt(a: f64, b: f64) -> bool {
    a - b > 8.0 * f64::EPSILON * 1f64.max(a.abs()).max(b.abs())
}

pub(crate) fn vec_eq(x: &[f64], y: &[f64]) -> Option<usize> {
    x.iter().zip(y).position(|(a, b)| !eq(*a, *b))
}

pub(crate) enum Finding {
    Holds {
        exercised: usize,
    },
    Violated {
        note: String,
        graphs: Vec<LabeledGraph>,
    },
}

impl Finding {
    pub fn is_violated(&self) -> bool {
        matches!(self, Finding::Violated { .. })
    }

    pub fn counterexample(self, instance: &Instance) -> Option<Counterexample> {
        match self {
            Finding::Holds { .. } => None,
            Finding::Violated { note, graphs } => Some(Counterexample {
                instance: instance.clone(),
                graphs,
                note,
            }),
        }
    }
}

pub(crate) fn labeled(label: &str, g: &ArgGraph, d: &[f64]) -> LabeledGraph {
    LabeledGraph {
        label: label.to_string(),
        graph: g.clone(),
        degrees: d.to_vec(),
    }
}

fn holds(exercised: usize) -> Result<Finding, EvalError> {
    Ok(Finding::Holds { exercised })
}

fn violated(note: String, graphs: Vec<LabeledGraph>) -> Result<Finding, EvalError> {
    Ok(Finding::Violated { note, graphs })
}

struct Ctx<'a> {
    sut: &'a SemanticsUnderTest,
}

impl Ctx<'_> {
    fn ev(&self, g: &ArgGraph) -> Result<Vec<f64>, EvalError> {
        let d = self.sut.degrees(g)?;
        if d.len() != g.len() || d.iter().any(|x| !x.is_finite()) {
            return Err(EvalError::NotConverged(
                "non-finite or misshapen degree vector".into(),
            ));
        }
        Ok(d)
    }

    fn nu(&self) -> f64 {
        self.sut.neutral
    }

    fn at_max(&self, x: f64) -> bool {
        self.sut.max_degree.is_some_and(|m| eq(x, m))
    }

    fn at_min(&self, x: f64) -> bool {
        self.sut.min_degree.is_some_and(|m| eq(x, m))
    }
}

fn attackers(g: &ArgGraph, a: usize) -> Vec<usize> {
    g.parents(a)
        .filter(|&(_, s)| s < 0)
        .map(|(j, _)| j)
        .collect()
}

fn supporters(g: &ArgGraph, a: usize) -> Vec<usize> {
    g.parents(a)
        .filter(|&(_, s)| s > 0)
        .map(|(j, _)| j)
        .collect()
}

fn sorted_degrees(idx: &[usize], d: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Pairs sorted degree lists; equal multisets give the bijection.
fn matched(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| hyp_eq(*a, *b))
}

/// Evaluates one instance against one characteristic.
pub(crate) fn examine(
    sut: &SemanticsUnderTest,
    c: Characteristic,
    inst: &Instance,
) -> Result<Finding, EvalError> {
    use Characteristic::*;
    let ctx = Ctx { sut };
    match (c, inst) {
        (Anonymity, Instance::Anonymity { graph, permutation }) => {
            anonymity(&ctx, graph, permutation)
        }
        (Independence, Instance::Independence { left, right }) => independence(&ctx, left, right),
        (
            Directionality,
            Instance::Directionality {
                graph,
                target,
                source,
                sign,
            },
        ) => directionality(&ctx, graph, *target, *source, *sign),
        (
            ParentMonotony,
            Instance::Pair {
                graph,
                modified,
                argument,
            },
        ) => parent_monotony(&ctx, graph, modified, *argument),
        (
            Reinforcement,
            Instance::Pair {
                graph,
                modified,
                argument,
            },
        ) => reinforcement(&ctx, graph, modified, *argument),
        (Continuity, Instance::Probe { graph, argument }) => continuity(&ctx, graph, *argument),
        (Linearity, Instance::Probe { graph, argument }) => linearity(&ctx, graph, *argument),
        (_, Instance::Single { graph }) => {
            let d = ctx.ev(graph)?;
            match c {
                Equivalence => equivalence(&ctx, graph, &d),
                Conservativity => conservativity(graph, &d),
                InitialMonotony => initial_monotony(&ctx, graph, &d),
                Neutrality => neutrality(&ctx, graph, &d),
                Impact => impact(&ctx, graph, &d, false),
                ReverseImpact => impact(&ctx, graph, &d, true),
                Causality => causality(&ctx, graph, &d),
                Stickiness => stickiness(graph, &d),
                Dummy => dummy(&ctx, graph, &d),
                Neutralisation => neutralisation(&ctx, graph, &d),
                Interchangeability => interchangeability(&ctx, graph, &d),
                Boundedness => boundedness(&ctx, graph, &d),
                _ => holds(0),
            }
        }
        _ => holds(0),
    }
}

fn anonymity(ctx: &Ctx, g: &ArgGraph, perm: &[usize]) -> Result<Finding, EvalError> {
    let d = ctx.ev(g)?;
    let h = g.permuted(perm)?;
    let dh = ctx.ev(&h)?;
    for a in 0..g.len() {
        if !eq(d[a], dh[perm[a]]) {
            return violated(
                format!(
                    "{} has degree {} but its image has {}",
                    g.id(a),
                    d[a],
                    dh[perm[a]]
                ),
                vec![labeled("A", g, &d), labeled("A'", &h, &dh)],
            );
        }
    }
    holds(1)
}

fn independence(ctx: &Ctx, l: &ArgGraph, r: &ArgGraph) -> Result<Finding, EvalError> {
    let u = union(l, r)?;
    let (dl, dr, du) = (ctx.ev(l)?, ctx.ev(r)?, ctx.ev(&u)?);
    let n = l.len();
    let bad = vec_eq(&dl, &du[..n])
        .map(|i| (u.id(i).to_string(), dl[i], du[i]))
        .or_else(|| vec_eq(&dr, &du[n..]).map(|i| (u.id(n + i).to_string(), dr[i], du[n + i])));
    if let Some((id, alone, joined)) = bad {
        return violated(
            format!("{id} has degree {alone} alone but {joined} in the union"),
            vec![
                labeled("A", l, &dl),
                labeled("A'", r, &dr),
                labeled("A ∪ A'", &u, &du),
            ],
        );
    }
    holds(1)
}

fn directionality(
    ctx: &Ctx,
    g: &ArgGraph,
    target: usize,
    source: usize,
    sign: i8,
) -> Result<Finding, EvalError> {
    let n = g.len();
    if target >= n || source >= n || sign == 0 || g.entry(target, source) != 0 {
        return holds(0);
    }
    let h = g.with_entry(target, source, sign)?;
    let (d, dh) = (ctx.ev(g)?, ctx.ev(&h)?);
    let mut exercised = 0;
    for x in (0..n).filter(|&x| x != target) {
        let nb = g.neighbors(x)?;
        if nb.backers.contains(&target) || nb.detractors.contains(&target) {
            continue;
        }
        exercised += 1;
        if !eq(d[x], dh[x]) {
            return violated(
                format!(
                    "adding {} -> {} moved {} from {} to {}",
                    g.id(source),
                    g.id(target),
                    g.id(x),
                    d[x],
                    dh[x]
                ),
                vec![labeled("A", g, &d), labeled("A'", &h, &dh)],
            );
        }
    }
    holds(exercised)
}

fn equivalence(_ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let n = g.len();
    let mut exercised = 0;
    for a in 0..n {
        let (att_a, sup_a) = (
            sorted_degrees(&attackers(g, a), d),
            sorted_degrees(&supporters(g, a), d),
        );
        for b in (a + 1)..n {
            if (g.weight(a) - g.weight(b)).abs() > 1e-12 {
                continue;
            }
            let (att_b, sup_b) = (
                sorted_degrees(&attackers(g, b), d),
                sorted_degrees(&supporters(g, b), d),
            );
            if !matched(&att_a, &att_b) || !matched(&sup_a, &sup_b) {
                continue;
            }
            exercised += 1;
            if !eq(d[a], d[b]) {
                return violated(
                    format!(
                        "{} and {} are equivalent but have degrees {} and {}",
                        g.id(a),
                        g.id(b),
                        d[a],
                        d[b]
                    ),
                    vec![labeled("A", g, d)],
                );
            }
        }
    }
    holds(exercised)
}

fn conservativity(g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let mut exercised = 0;
    for a in 0..g.len() {
        if g.parents(a).next().is_some() {
            continue;
        }
        exercised += 1;
        if !eq(d[a], g.weight(a)) {
            return violated(
                format!(
                    "{} has no parents, weight {} but degree {}",
                    g.id(a),
                    g.weight(a),
                    d[a]
                ),
                vec![labeled("A", g, d)],
            );
        }
    }
    holds(exercised)
}

fn initial_monotony(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let n = g.len();
    let mut exercised = 0;
    for a in 0..n {
        for b in 0..n {
            if a == b || g.weight(a) - g.weight(b) <= 1e-9 || g.parent_row(a) != g.parent_row(b) {
                continue;
            }
            exercised += 1;
            let ok = gt(d[a], d[b])
                || (ctx.at_max(d[a]) && ctx.at_max(d[b]))
                || (ctx.at_min(d[a]) && ctx.at_min(d[b]));
            if !ok {
                return violated(
                    format!(
                        "{} outweighs {} with the same parents but degrees are {} and {}",
                        g.id(a),
                        g.id(b),
                        d[a],
                        d[b]
                    ),
                    vec![labeled("A", g, d)],
                );
            }
        }
    }
    holds(exercised)
}

fn neutrality(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let mut exercised = 0;
    for x in 0..g.len() {
        if !hyp_eq(d[x], ctx.nu()) {
            continue;
        }
        exercised += 1;
        let h = g.isolate(&[x], ctx.nu())?;
        let dh = ctx.ev(&h)?;
        if let Some(y) = vec_eq(d, &dh) {
            return violated(
                format!(
                    "isolating neutral {} moved {} from {} to {}",
                    g.id(x),
                    g.id(y),
                    d[y],
                    dh[y]
                ),
                vec![labeled("A", g, d), labeled("A|x", &h, &dh)],
            );
        }
    }
    holds(exercised)
}

/// True when `m` extends `g`'s argument list.
fn shares_prefix(g: &ArgGraph, m: &ArgGraph) -> bool {
    m.len() >= g.len() && m.ids()[..g.len()] == *g.ids()
}

fn parent_monotony(ctx: &Ctx, g: &ArgGraph, m: &ArgGraph, a: usize) -> Result<Finding, EvalError> {
    let n = g.len();
    if a >= n || !shares_prefix(g, m) || (g.weight(a) - m.weight(a)).abs() > 1e-12 {
        return holds(0);
    }
    let att_m = attackers(m, a);
    let sup_g = supporters(g, a);
    if att_m.iter().any(|&j| j >= n || g.entry(a, j) >= 0)
        || sup_g.iter().any(|&j| m.entry(a, j) <= 0)
    {
        return holds(0);
    }
    let (d, dm) = (ctx.ev(g)?, ctx.ev(m)?);
    if att_m.iter().any(|&j| !hyp_le(dm[j], d[j])) || sup_g.iter().any(|&j| !hyp_le(d[j], dm[j])) {
        return holds(0);
    }
    // A dropped attacker or a new supporter below ν acts in reverse, so both
    // must be at least neutral for the change to count as an improvement.
    let nu = ctx.nu();
    let dropped = attackers(g, a).into_iter().filter(|&j| m.entry(a, j) >= 0);
    let added = supporters(m, a)
        .into_iter()
        .filter(|&j| j >= n || g.entry(a, j) <= 0);
    if dropped.clone().any(|j| !hyp_le(nu, d[j])) || added.clone().any(|j| !hyp_le(nu, dm[j])) {
        return holds(0);
    }
    if d[a] > dm[a] + TOL * scale(d[a], dm[a]) {
        return violated(
            format!(
                "{} fell from {} to {} although its parents improved",
                g.id(a),
                d[a],
                dm[a]
            ),
            vec![labeled("A", g, &d), labeled("A'", m, &dm)],
        );
    }
    holds(1)
}

fn reinforcement(ctx: &Ctx, g: &ArgGraph, m: &ArgGraph, a: usize) -> Result<Finding, EvalError> {
    let n = g.len();
    if a >= n
        || m.len() != n
        || m.ids() != g.ids()
        || (g.weight(a) - m.weight(a)).abs() > 1e-12
        || g.parent_row(a) != m.parent_row(a)
    {
        return holds(0);
    }
    let (att, sup) = (attackers(g, a), supporters(g, a));
    let (d, dm) = (ctx.ev(g)?, ctx.ev(m)?);
    // Case 1: parents of a are better off in A; case 2: in A'.
    let better = |x: &[f64], y: &[f64]| {
        att.iter().all(|&j| hyp_le(x[j], y[j]))
            && sup.iter().all(|&j| hyp_le(y[j], x[j]))
            && (att.iter().any(|&j| hyp_lt(x[j], y[j])) || sup.iter().any(|&j| hyp_lt(y[j], x[j])))
    };
    let case1 = better(&d, &dm);
    let case2 = better(&dm, &d);
    let fail = if case1 {
        !(gt(d[a], dm[a]) || (ctx.at_max(d[a]) && ctx.at_max(dm[a])))
    } else if case2 {
        // Mirror of case 1, so saturation at Max also excuses it.
        let both_max = ctx.at_max(d[a]) && ctx.at_max(dm[a]);
        !(gt(dm[a], d[a]) || (ctx.at_min(d[a]) && ctx.at_min(dm[a])) || both_max)
    } else {
        return holds(0);
    };
    if fail {
        return violated(
            format!(
                "parents of {} changed strictly in one direction but its degree went from {} to {}",
                g.id(a),
                d[a],
                dm[a]
            ),
            vec![labeled("A", g, &d), labeled("A'", m, &dm)],
        );
    }
    holds(1)
}

/// Impact, or reverse impact when `reverse` is set.
fn impact(ctx: &Ctx, g: &ArgGraph, d: &[f64], reverse: bool) -> Result<Finding, EvalError> {
    let n = g.len();
    let nu = ctx.nu();
    let mut exercised = 0;
    for a in 0..n {
        let nb = g.neighbors(a)?;
        for b in (0..n).filter(|&b| b != a) {
            let sign = g.entry(a, b);
            if sign == 0 {
                continue;
            }
            let relevant = if reverse {
                hyp_lt(d[b], nu)
            } else {
                hyp_lt(nu, d[b])
            };
            if !relevant
                || (sign < 0 && nb.backers.contains(&b))
                || (sign > 0 && nb.detractors.contains(&b))
            {
                continue;
            }
            let h = g.isolate(&[b], nu)?;
            let dh = ctx.ev(&h)?;
            let (with, without) = (d[a], dh[a]);
            let both_max = ctx.at_max(with) && ctx.at_max(without);
            let both_min = ctx.at_min(with) && ctx.at_min(without);
            // Direction in which `b` pushes `a` when present.
            let raises = (sign > 0) != reverse;
            let ok = if raises {
                gt(with, without) || both_max || (reverse && both_min)
            } else {
                gt(without, with) || both_min || (reverse && both_max)
            };
            if !ok {
                let role = if sign > 0 { "supporter" } else { "attacker" };
                return violated(
                    format!(
                        "{role} {} of {} (degree {}) changes it from {} to {} when isolated",
                        g.id(b),
                        g.id(a),
                        d[b],
                        with,
                        without
                    ),
                    vec![labeled("A", g, d), labeled("A|b", &h, &dh)],
                );
            }
            exercised += 1;
        }
    }
    holds(exercised)
}

fn causality(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let mut exercised = 0;
    for a in 0..g.len() {
        if !g.parents(a).all(|(j, _)| hyp_eq(d[j], ctx.nu())) {
            continue;
        }
        exercised += 1;
        if !eq(d[a], g.weight(a)) {
            return violated(
                format!(
                    "{} has degree {} != weight {} but every parent is neutral",
                    g.id(a),
                    d[a],
                    g.weight(a)
                ),
                vec![labeled("A", g, d)],
            );
        }
    }
    holds(exercised)
}

fn stickiness(g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let n = g.len();
    let mut exercised = 0;
    for a in 0..n {
        let sa = supporters(g, a);
        for b in (0..n).filter(|&b| b != a) {
            if (g.weight(a) - g.weight(b)).abs() > 1e-12 || !hyp_eq(d[b], 1.0) {
                continue;
            }
            let sb = supporters(g, b);
            let only_a: Vec<usize> = sa.iter().copied().filter(|j| !sb.contains(j)).collect();
            let only_b: Vec<usize> = sb.iter().copied().filter(|j| !sa.contains(j)).collect();
            let (&[x], &[y]) = (only_a.as_slice(), only_b.as_slice()) else {
                continue;
            };
            if !hyp_lt(d[y], d[x]) {
                continue;
            }
            exercised += 1;
            if !eq(d[a], 1.0) {
                return violated(
                    format!(
                        "{} has stronger support than {} (degree 1) but degree {}",
                        g.id(a),
                        g.id(b),
                        d[a]
                    ),
                    vec![labeled("A", g, d)],
                );
            }
        }
    }
    holds(exercised)
}

fn dummy(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let n = g.len();
    let mut exercised = 0;
    for a in 0..n {
        let sa = supporters(g, a);
        for b in (0..n).filter(|&b| b != a) {
            if (g.weight(a) - g.weight(b)).abs() > 1e-12 {
                continue;
            }
            let sb = supporters(g, b);
            if !sb.iter().all(|j| sa.contains(j)) {
                continue;
            }
            let extra: Vec<usize> = sa.iter().copied().filter(|j| !sb.contains(j)).collect();
            let &[x] = extra.as_slice() else {
                continue;
            };
            if !hyp_eq(d[x], ctx.nu()) {
                continue;
            }
            exercised += 1;
            if !eq(d[a], d[b]) {
                return violated(
                    format!(
                        "neutral supporter {} separates {} ({}) from {} ({})",
                        g.id(x),
                        g.id(a),
                        d[a],
                        g.id(b),
                        d[b]
                    ),
                    vec![labeled("A", g, d)],
                );
            }
        }
    }
    holds(exercised)
}

fn neutralisation(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let n = g.len();
    let mut exercised = 0;
    for m in 0..n {
        for k in attackers(g, m) {
            for l in supporters(g, m) {
                if !hyp_eq(d[k], d[l]) {
                    continue;
                }
                exercised += 1;
                let h = g.with_entry(m, k, 0)?.with_entry(m, l, 0)?;
                let dh = ctx.ev(&h)?;
                if let Some(y) = vec_eq(d, &dh) {
                    return violated(
                        format!(
                            "removing the matched pair {} / {} on {} moved {} from {} to {}",
                            g.id(k),
                            g.id(l),
                            g.id(m),
                            g.id(y),
                            d[y],
                            dh[y]
                        ),
                        vec![labeled("A", g, d), labeled("A'", &h, &dh)],
                    );
                }
            }
        }
    }
    holds(exercised)
}

fn interchangeability(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let n = g.len();
    let mut exercised = 0;
    for j in 0..n {
        for k in (j + 1)..n {
            if !hyp_eq(d[j], d[k]) {
                continue;
            }
            for i in 0..n {
                if exercised >= MAX_TRIPLES {
                    return holds(exercised);
                }
                let (gij, gik) = (g.entry(i, j), g.entry(i, k));
                if gij == gik {
                    continue;
                }
                exercised += 1;
                let h = g.with_entry(i, j, gik)?.with_entry(i, k, gij)?;
                let dh = ctx.ev(&h)?;
                if let Some(y) = vec_eq(d, &dh) {
                    return violated(
                        format!(
                            "swapping {} and {} as parents of {} moved {} from {} to {}",
                            g.id(j),
                            g.id(k),
                            g.id(i),
                            g.id(y),
                            d[y],
                            dh[y]
                        ),
                        vec![labeled("A", g, d), labeled("A'", &h, &dh)],
                    );
                }
            }
        }
    }
    holds(exercised)
}

/// Weight perturbed by `step`, moving inward when the domain requires it.
fn nudge(ctx: &Ctx, w: f64, step: f64) -> f64 {
    let up = w + step;
    if ctx.sut.domain.weights.contains(up) {
        up
    } else {
        w - step
    }
}

fn continuity(ctx: &Ctx, g: &ArgGraph, i: usize) -> Result<Finding, EvalError> {
    if i >= g.len() {
        return holds(0);
    }
    let d = ctx.ev(g)?;
    let w = g.weight(i);
    let floor = HYP_TOL * (1.0 + norm_inf(&d));
    let mut previous: Option<f64> = None;
    for eps in CONTINUITY_STEPS {
        let h = g.with_weight(i, nudge(ctx, w, eps))?;
        let dh = ctx.ev(&h)?;
        let delta = norm_inf(&d.iter().zip(&dh).map(|(a, b)| a - b).collect::<Vec<_>>());
        if let Some(p) = previous {
            let bound = (CONTINUITY_SHRINK * p).max(floor);
            if !(delta <= bound) {
                return violated(
                    format!(
                        "perturbing the weight of {} by {eps:e} moved the degrees by {delta:e}, previous step {p:e}",
                        g.id(i)
                    ),
                    vec![labeled("A", g, &d), labeled("A_eps", &h, &dh)],
                );
            }
        }
        previous = Some(delta);
    }
    holds(1)
}

/// Three weights inside the domain for the collinearity test.
fn linearity_points(ctx: &Ctx, w: f64) -> [f64; 3] {
    use crate::semantics::WeightRange;
    match ctx.sut.domain.weights {
        WeightRange::Real => [w, w + 1.0, w + 2.5],
        WeightRange::OpenUnit => [0.2, 0.5, 0.8],
        WeightRange::ClosedUnit => [0.1, 0.5, 0.9],
    }
}

fn linearity(ctx: &Ctx, g: &ArgGraph, a: usize) -> Result<Finding, EvalError> {
    if a >= g.len() {
        return holds(0);
    }
    let t = linearity_points(ctx, g.weight(a));
    let mut graphs = Vec::with_capacity(3);
    let mut y = [0.0; 3];
    for k in 0..3 {
        let h = g.with_weight(a, t[k])?;
        let dh = ctx.ev(&h)?;
        y[k] = dh[a];
        graphs.push(labeled(&format!("w({}) = {}", g.id(a), t[k]), &h, &dh));
    }
    let gap = (y[2] - y[0]) * (t[1] - t[0]) - (y[1] - y[0]) * (t[2] - t[0]);
    let size = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if gap.abs() > TOL * size * (t[2] - t[0]) {
        return violated(
            format!(
                "degree of {} at weights {:?} is {:?}, not collinear",
                g.id(a),
                t,
                y
            ),
            graphs,
        );
    }
    holds(1)
}

fn boundedness(ctx: &Ctx, g: &ArgGraph, d: &[f64]) -> Result<Finding, EvalError> {
    let (Some(lo), Some(hi)) = (ctx.sut.min_degree, ctx.sut.max_degree) else {
        return holds(0);
    };
    if let Some(i) = d
        .iter()
        .position(|&x| x > hi + TOL * scale(x, hi) || x < lo - TOL * scale(x, lo))
    {
        return violated(
            format!("{} has degree {} outside [{lo}, {hi}]", g.id(i), d[i]),
            vec![labeled("A", g, d)],
        );
    }
    holds(1)
}

/// Sampling loop behind `check`.
pub(crate) fn run(
    sut: &SemanticsUnderTest,
    c: Characteristic,
    trials: usize,
    seed: u64,
    sampler: SamplerConfig,
) -> Result<Verdict, AxiomError> {
    if c.requires_bwsa() && !sut.is_bwsa_domain() {
        return Ok(Verdict::Inapplicable {
            reason: format!("{c} is defined for support-only graphs with weights in [0,1]"),
        });
    }
    if c == Characteristic::Boundedness && (sut.max_degree.is_none() || sut.min_degree.is_none()) {
        return Ok(Verdict::Falsified {
            reason: "no maximum and minimum degree declared; the degree space is unbounded".into(),
            counterexample: None,
        });
    }
    let mut gen = Gen::new(stream(seed, c.name()), sut, sampler);
    let mut evaluated = 0;
    let mut nonvacuous = 0;
    let mut last_error = None;
    let mut extremes = (false, false);
    for _ in 0..trials {
        let inst = gen.instance(c);
        match examine(sut, c, &inst) {
            Ok(Finding::Holds { exercised }) => {
                evaluated += 1;
                if exercised > 0 {
                    nonvacuous += 1;
                }
                if c == Characteristic::Boundedness {
                    note_extremes(sut, &inst, &mut extremes);
                }
            }
            Ok(Finding::Violated { .. }) => {
                let small = minimize(sut, c, &inst);
                let cx = examine(sut, c, &small)
                    .ok()
                    .and_then(|f| f.counterexample(&small))
                    .or_else(|| {
                        examine(sut, c, &inst)
                            .ok()
                            .and_then(|f| f.counterexample(&inst))
                    });
                let reason = cx.as_ref().map(|x| x.note.clone()).unwrap_or_default();
                return Ok(Verdict::Falsified {
                    reason,
                    counterexample: cx,
                });
            }
            Err(e) => last_error = Some(e),
        }
    }
    if evaluated == 0 && trials > 0 {
        return Err(AxiomError::DomainMismatch {
            semantics: sut.name.clone(),
            characteristic: c,
            last: last_error.map(|e| e.to_string()).unwrap_or_default(),
        });
    }
    if c == Characteristic::ReverseImpact && nonvacuous == 0 {
        return Ok(Verdict::Falsified {
            reason: "no sampled attack or support had a reversed effect".into(),
            counterexample: None,
        });
    }
    if c == Characteristic::Boundedness {
        probe_extremes(sut, &mut extremes);
        if !(extremes.0 && extremes.1) {
            return Ok(Verdict::Falsified {
                reason: "declared bounds were never attained".into(),
                counterexample: None,
            });
        }
    }
    Ok(Verdict::Passed {
        trials: evaluated,
        nonvacuous,
    })
}

fn note_extremes(sut: &SemanticsUnderTest, inst: &Instance, seen: &mut (bool, bool)) {
    if let Instance::Single { graph } = inst {
        if let Ok(d) = sut.degrees(graph) {
            let ctx = Ctx { sut };
            seen.0 |= d.iter().any(|&x| ctx.at_min(x));
            seen.1 |= d.iter().any(|&x| ctx.at_max(x));
        }
    }
}

/// Single arguments at the ends of the weight range.
fn probe_extremes(sut: &SemanticsUnderTest, seen: &mut (bool, bool)) {
    for w in [0.0, 1.0, -1.0] {
        if !sut.domain.weights.contains(w) {
            continue;
        }
        if let Ok(g) = ArgGraph::with_default_ids(vec![0], vec![w]) {
            note_extremes(sut, &Instance::Single { graph: g }, seen);
        }
    }
}

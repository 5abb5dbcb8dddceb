//! Consistency checks for characteristics that follow from others.
//!
//! Each check replays the chain of premise instances used to derive the
//! characteristic on a sampled graph. Whenever every premise instance holds
//! numerically, the derived conclusion must hold as well.

use super::checks::{eq, eq_tol, hyp_eq, hyp_le, hyp_lt, labeled, vec_eq};
use super::draft::Draft;
use super::generate::Gen;
use super::{
    stream, Characteristic, CharacteristicReport, Counterexample, Instance, LabeledGraph,
    SamplerConfig, SemanticsUnderTest, Verdict, TOL,
};
use crate::error::EvalError;
use crate::graph::ArgGraph;

enum Outcome {
    /// Number of instances whose premises all held.
    Consistent(usize),
    Inconsistent(String, Vec<LabeledGraph>),
}

fn supporters(g: &ArgGraph, a: usize) -> Vec<usize> {
    g.parents(a)
        .filter(|&(_, s)| s > 0)
        .map(|(j, _)| j)
        .collect()
}

fn causality(sut: &SemanticsUnderTest, g: &ArgGraph) -> Result<Outcome, EvalError> {
    let nu = sut.neutral;
    let d = sut.degrees(g)?;
    let mut premised = 0;
    for a in 0..g.len() {
        let parents: Vec<usize> = g.parents(a).map(|(j, _)| j).collect();
        if parents.contains(&a) || !parents.iter().all(|&c| hyp_eq(d[c], nu)) {
            continue;
        }
        // Isolate the parents one at a time, checking each Neutrality step.
        let mut cur = g.clone();
        let mut dc = d.clone();
        let mut ok = true;
        for &c in &parents {
            let next = cur.isolate(&[c], nu)?;
            let dn = sut.degrees(&next)?;
            if !hyp_eq(dc[c], nu) || vec_eq(&dc, &dn).is_some() {
                ok = false;
                break;
            }
            cur = next;
            dc = dn;
        }
        // With no parents left, Conservativity fixes the degree.
        if !ok || !eq(dc[a], g.weight(a)) {
            continue;
        }
        premised += 1;
        if !eq_tol(d[a], g.weight(a), TOL * (parents.len() + 2) as f64) {
            return Ok(Outcome::Inconsistent(
                format!(
                    "premises hold for {} yet its degree {} differs from its weight {}",
                    g.id(a),
                    d[a],
                    g.weight(a)
                ),
                vec![labeled("A", g, &d), labeled("A|parents", &cur, &dc)],
            ));
        }
    }
    Ok(Outcome::Consistent(premised))
}

fn dummy(sut: &SemanticsUnderTest, g: &ArgGraph) -> Result<Outcome, EvalError> {
    let nu = sut.neutral;
    let d = sut.degrees(g)?;
    let n = g.len();
    let mut premised = 0;
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
            if x == a || x == b || !hyp_eq(d[x], nu) {
                continue;
            }
            let h = g.isolate(&[x], nu)?;
            let dh = sut.degrees(&h)?;
            // Neutrality at x, then Parent Monotony in both directions
            // between a and b, which now share parents and weight.
            if vec_eq(&d, &dh).is_some() || h.parent_row(a) != h.parent_row(b) || !eq(dh[a], dh[b])
            {
                continue;
            }
            premised += 1;
            if !eq_tol(d[a], d[b], 3.0 * TOL) {
                return Ok(Outcome::Inconsistent(
                    format!(
                        "premises hold but {} = {} and {} = {}",
                        g.id(a),
                        d[a],
                        g.id(b),
                        d[b]
                    ),
                    vec![labeled("A", g, &d), labeled("A|x", &h, &dh)],
                ));
            }
        }
    }
    Ok(Outcome::Consistent(premised))
}

/// One argument supported by parentless arguments with the given weights.
fn star(ids: Vec<String>, root_weight: f64, leaves: &[f64]) -> ArgGraph {
    let m = leaves.len() + 1;
    let mut incidence = vec![0i8; m * m];
    for s in 1..m {
        incidence[s] = 1;
    }
    let mut w = vec![root_weight];
    w.extend_from_slice(leaves);
    ArgGraph::new(ids, incidence, w).expect("star is well formed")
}

fn stickiness_instance(
    sut: &SemanticsUnderTest,
    g: &ArgGraph,
    d: &[f64],
    (a, b, x, y): (usize, usize, usize, usize),
    common: &[usize],
) -> Result<Option<Result<(), (String, Vec<LabeledGraph>)>>, EvalError> {
    let n = g.len();
    // A†: fresh parentless copies carrying the degrees of a's and b's supporters.
    let mut dag = Draft::from_graph(g);
    let d0 = dag.push(d[x]);
    let dc: Vec<usize> = common.iter().map(|&c| dag.push(d[c])).collect();
    let e0 = dag.push(d[y]);
    let ec: Vec<usize> = common.iter().map(|&c| dag.push(d[c])).collect();
    let dagger = dag.clone().build();
    let dd = sut.degrees(&dagger)?;
    if vec_eq(d, &dd[..n]).is_some() {
        return Ok(None);
    }
    // A‡: a and b draw support from the copies instead.
    let mut ddg = dag;
    ddg.set(a, x, 0);
    ddg.set(a, d0, 1);
    ddg.set(b, y, 0);
    ddg.set(b, e0, 1);
    for (k, &c) in common.iter().enumerate() {
        ddg.set(a, c, 0);
        ddg.set(a, dc[k], 1);
        ddg.set(b, c, 0);
        ddg.set(b, ec[k], 1);
    }
    let ddagger = ddg.clone().build();
    let dddg = sut.degrees(&ddagger)?;
    if !eq(dddg[a], dd[a]) || !eq(dddg[b], dd[b]) {
        return Ok(None);
    }
    // A′: no outgoing arcs from a or b.
    let mut pr = ddg;
    for t in 0..pr.len() {
        pr.set(t, a, 0);
        pr.set(t, b, 0);
    }
    let prime = pr.build();
    let dp = sut.degrees(&prime)?;
    if !eq(dp[a], dddg[a]) || !eq(dp[b], dddg[b]) {
        return Ok(None);
    }
    let common_deg: Vec<f64> = common.iter().map(|&c| d[c]).collect();
    let leaves_a: Vec<f64> = std::iter::once(d[x])
        .chain(common_deg.iter().copied())
        .collect();
    let leaves_b: Vec<f64> = std::iter::once(d[y])
        .chain(common_deg.iter().copied())
        .collect();
    let ids_a: Vec<String> = std::iter::once(a)
        .chain(std::iter::once(d0))
        .chain(dc.iter().copied())
        .map(|i| prime.id(i).to_string())
        .collect();
    let ids_b: Vec<String> = std::iter::once(b)
        .chain(std::iter::once(e0))
        .chain(ec.iter().copied())
        .map(|i| prime.id(i).to_string())
        .collect();
    let ga = star(ids_a.clone(), g.weight(a), &leaves_a);
    let gb = star(ids_b, g.weight(b), &leaves_b);
    let gr = star(ids_a, g.weight(b), &leaves_b);
    let (da, db, dr) = (sut.degrees(&ga)?, sut.degrees(&gb)?, sut.degrees(&gr)?);
    if !eq(da[0], dp[a]) || !eq(db[0], dp[b]) || vec_eq(&dr, &db).is_some() {
        return Ok(None);
    }
    if !(1..dr.len()).all(|z| hyp_le(dr[z], da[z])) || dr[0] > da[0] + TOL * (1.0 + da[0].abs()) {
        return Ok(None);
    }
    let bounded = sut.max_degree.is_some_and(|m| d[a] <= m + TOL);
    if !bounded {
        return Ok(None);
    }
    if eq_tol(d[a], 1.0, 8.0 * TOL) {
        return Ok(Some(Ok(())));
    }
    Ok(Some(Err((
        format!(
            "premises hold for {} and {} yet {} has degree {}",
            g.id(a),
            g.id(b),
            g.id(a),
            d[a]
        ),
        vec![
            labeled("A", g, d),
            labeled("A†", &dagger, &dd),
            labeled("A‡", &ddagger, &dddg),
            labeled("A′", &prime, &dp),
            labeled("A^a", &ga, &da),
            labeled("A^b", &gb, &db),
            labeled("A^r", &gr, &dr),
        ],
    ))))
}

fn stickiness(sut: &SemanticsUnderTest, g: &ArgGraph) -> Result<Outcome, EvalError> {
    let d = sut.degrees(g)?;
    let n = g.len();
    let mut premised = 0;
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
            let common: Vec<usize> = sa.iter().copied().filter(|&j| j != x).collect();
            if [x, y].iter().chain(&common).any(|&v| v == a || v == b) {
                continue;
            }
            match stickiness_instance(sut, g, &d, (a, b, x, y), &common)? {
                None => {}
                Some(Ok(())) => premised += 1,
                Some(Err((note, graphs))) => return Ok(Outcome::Inconsistent(note, graphs)),
            }
        }
    }
    Ok(Outcome::Consistent(premised))
}

fn premises(c: Characteristic) -> Vec<Characteristic> {
    use Characteristic::*;
    match c {
        Causality => vec![Conservativity, Neutrality],
        Dummy => vec![Neutrality, ParentMonotony],
        _ => vec![
            ParentMonotony,
            Independence,
            Interchangeability,
            Anonymity,
            Conservativity,
        ],
    }
}

fn run_one(sut: &SemanticsUnderTest, c: Characteristic, trials: usize, seed: u64) -> Verdict {
    if c.requires_bwsa() && !sut.is_bwsa_domain() {
        return Verdict::Inapplicable {
            reason: format!("{c} is derived for support-only graphs with weights in [0,1]"),
        };
    }
    let label = format!("derived {}", c.name());
    let mut gen = Gen::new(stream(seed, &label), sut, SamplerConfig::default());
    let (mut evaluated, mut nonvacuous) = (0, 0);
    for _ in 0..trials {
        let inst = gen.instance(c);
        let Instance::Single { graph } = &inst else {
            continue;
        };
        let result = match c {
            Characteristic::Causality => causality(sut, graph),
            Characteristic::Dummy => dummy(sut, graph),
            _ => stickiness(sut, graph),
        };
        match result {
            Ok(Outcome::Consistent(k)) => {
                evaluated += 1;
                if k > 0 {
                    nonvacuous += 1;
                }
            }
            Ok(Outcome::Inconsistent(note, graphs)) => {
                return Verdict::Falsified {
                    reason: note.clone(),
                    counterexample: Some(Counterexample {
                        instance: inst.clone(),
                        graphs,
                        note,
                    }),
                };
            }
            Err(_) => {}
        }
    }
    Verdict::Passed {
        trials: evaluated,
        nonvacuous,
    }
}

/// Causality, Dummy and Stickiness re-derived from their premises on
/// sampled instances.
pub fn implication_checks(
    sut: &SemanticsUnderTest,
    trials: usize,
    seed: u64,
) -> Vec<CharacteristicReport> {
    [
        Characteristic::Causality,
        Characteristic::Dummy,
        Characteristic::Stickiness,
    ]
    .into_iter()
    .map(|c| CharacteristicReport {
        characteristic: c,
        group: c.group(),
        derived_from: premises(c),
        verdict: run_one(sut, c, trials, seed),
        seed,
        trials,
    })
    .collect()
}

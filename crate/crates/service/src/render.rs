//! Plain-text tables. Numbers are rounded to 6 decimals for display.

use std::fmt::Write;

use wasa_core::axioms::{CharacteristicReport, Verdict};
use wasa_core::ArgGraph;

use crate::eval::EvalResponse;

fn pad_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    // Avoid printing "-0.000000".
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn evaluation(g: &ArgGraph, r: &EvalResponse) -> String {
    let mut out = String::new();
    let mut head = vec![vec!["semantics".to_string(), r.semantics.to_string()]];
    if let Some(d) = &r.damping {
        head.push(vec![
            "damping".into(),
            format!("{} ({})", d.value, d.policy.replace('_', "-")),
        ]);
    }
    let status = match r.period {
        Some(p) => format!("{} (period {p})", r.status),
        None => r.status.clone(),
    };
    head.push(vec!["status".into(), status]);
    if let Some(res) = r.residual {
        head.push(vec!["residual".into(), format!("{res:.3e}")]);
    }
    if let Some(growth) = r.growth {
        head.push(vec!["growth".into(), format!("{growth:.3e}")]);
    }
    if let Some(reason) = &r.reason {
        head.push(vec!["reason".into(), reason.clone()]);
    }
    out.push_str(&pad_table(&head));
    out.push('\n');

    let mut rows = vec![vec!["argument".to_string(), "weight".to_string()]];
    if let Some(ds) = &r.degrees {
        rows[0].push("degree".into());
        for (i, d) in ds.iter().enumerate() {
            rows.push(vec![d.id.clone(), num(g.weight(i)), num(d.degree)]);
        }
    } else if let Some(states) = &r.states {
        for k in 0..states.len() {
            rows[0].push(format!("state {k}"));
        }
        for i in 0..g.len() {
            let mut row = vec![g.id(i).to_string(), num(g.weight(i))];
            row.extend(states.iter().map(|s| num(s[i].degree)));
            rows.push(row);
        }
    } else {
        for i in 0..g.len() {
            rows.push(vec![g.id(i).to_string(), num(g.weight(i))]);
        }
    }
    out.push_str(&pad_table(&rows));

    if let Some(p) = &r.propagation {
        out.push_str("\npropagation matrix\n");
        let mut rows = vec![std::iter::once(String::new())
            .chain(p.ids.iter().cloned())
            .collect::<Vec<_>>()];
        for (id, row) in p.ids.iter().zip(&p.rows) {
            rows.push(
                std::iter::once(id.clone())
                    .chain(row.iter().map(|&x| num(x)))
                    .collect(),
            );
        }
        out.push_str(&pad_table(&rows));
    }
    out
}

fn verdict_detail(v: &Verdict) -> String {
    match v {
        Verdict::Passed { trials, nonvacuous } => {
            format!("{trials} trials, {nonvacuous} nonvacuous")
        }
        Verdict::Falsified { reason, .. } => reason.clone(),
        Verdict::Inapplicable { reason } => reason.clone(),
    }
}

pub fn reports(title: &str, reps: &[CharacteristicReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}\n");
    let mut rows = vec![vec![
        "characteristic".to_string(),
        "group".to_string(),
        "verdict".to_string(),
        "detail".to_string(),
    ]];
    for r in reps {
        let name = if r.derived_from.is_empty() {
            r.characteristic.name().to_string()
        } else {
            format!("{} (derived)", r.characteristic.name())
        };
        rows.push(vec![
            name,
            format!("{:?}", r.group).to_lowercase(),
            r.verdict.label().to_string(),
            verdict_detail(&r.verdict),
        ]);
    }
    out.push_str(&pad_table(&rows));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimals() {
        assert_eq!(num(2.0 / 3.0), "0.666667");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(-6.0), "-6.000000");
    }

    #[test]
    fn columns_align() {
        let t = pad_table(&[
            vec!["a".into(), "bb".into()],
            vec!["ccc".into(), "d".into()],
        ]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }
}

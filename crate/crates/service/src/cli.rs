//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use wasa_core::axioms::{
    check, implication_checks, Characteristic, CharacteristicReport, Group, SemanticsUnderTest,
    Verdict, DEFAULT_TRIALS,
};
use wasa_core::{Damping, SemanticsTag, SigmoidKind};

use crate::document::{parse_graph, serialize_graph, GraphDocument};
use crate::eval::{evaluate_graph, EvalRequest};
use crate::fixtures;
use crate::render;
use crate::store::Store;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
/// Non-convergence for `eval`, a falsified mandatory characteristic for `axioms`.
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "wasa",
    version,
    about = "Weighted bipolar argumentation graphs: evaluation, characteristic checks and a what-if service"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute acceptability degrees for a graph.
    Eval(EvalArgs),
    /// Check characteristics of a semantics on sampled graphs.
    Axioms(AxiomArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// List the bundled example graphs, or print one.
    Fixtures { name: Option<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Records,
}

fn parse_tag(s: &str) -> Result<SemanticsTag, String> {
    s.to_ascii_lowercase().parse()
}

fn parse_damping(s: &str) -> Result<Damping, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Damping::Auto);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| format!("expected a number or `auto`, got `{s}`"))?;
    if v.is_finite() && v >= 1.0 {
        Ok(Damping::Global(v))
    } else {
        Err(format!("damping must be at least 1, got {v}"))
    }
}

fn parse_sigmoid(s: &str) -> Result<SigmoidKind, String> {
    s.to_ascii_lowercase().parse()
}

fn parse_characteristic(s: &str) -> Result<Characteristic, String> {
    s.parse()
        .map_err(|e: wasa_core::axioms::UnknownCharacteristic| e.to_string())
}

#[derive(Args, Debug)]
pub struct SemanticsArgs {
    /// gorgias, dir, sdir, rsig, rdamped, dogged or aggregation.
    #[arg(long, value_parser = parse_tag)]
    pub semantics: SemanticsTag,
    /// A number ≥ 1 or `auto` (indegree + 1).
    #[arg(long, value_parser = parse_damping, default_value = "auto")]
    pub damping: Damping,
    #[arg(long, value_parser = parse_sigmoid, default_value = "logistic")]
    pub sigmoid: SigmoidKind,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Path to a graph document, or the name of a bundled fixture.
    #[arg(long)]
    pub graph: String,
    #[command(flatten)]
    pub semantics: SemanticsArgs,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Print the propagation matrix (dir only).
    #[arg(long)]
    pub show_propagation: bool,
}

#[derive(Args, Debug)]
pub struct AxiomArgs {
    #[command(flatten)]
    pub semantics: SemanticsArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict to these characteristics (repeatable). Defaults to all.
    #[arg(long = "characteristic", value_parser = parse_characteristic)]
    pub characteristics: Vec<Characteristic>,
    /// Also re-derive Causality, Dummy and Stickiness from their premises.
    #[arg(long)]
    pub derived: bool,
    /// Where falsified instances are written.
    #[arg(long, default_value = "counterexamples")]
    pub counterexamples: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    /// Overrides WASA_PORT (default 8080).
    #[arg(long)]
    pub port: Option<u16>,
    /// Overrides WASA_DATA_DIR; without either, graphs live in memory only.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
}

pub fn load_graph(source: &str) -> Result<GraphDocument, String> {
    let path = Path::new(source);
    if path.exists() {
        let bytes = fs::read(path).map_err(|e| format!("{source}: {e}"))?;
        return parse_graph(&bytes).map_err(|e| format!("{source}: {e}"));
    }
    fixtures::fixture(source)
        .ok_or_else(|| format!("`{source}` is neither a readable file nor a bundled fixture"))
}

fn eval(args: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let doc = match load_graph(&args.graph) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let g = doc.to_graph().expect("parsed documents are valid");
    let req = EvalRequest {
        semantics: args.semantics.semantics,
        damping: args.semantics.damping,
        sigmoid: args.semantics.sigmoid,
        tol: args.tol,
        max_iter: args.max_iter,
        show_propagation: args.show_propagation,
        ..EvalRequest::default()
    };
    let resp = match evaluate_graph(&g, &req) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let _ = match args.format {
        Format::Table => write!(out, "{}", render::evaluation(&g, &resp)),
        Format::Records => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&resp).expect("responses serialize")
        ),
    };
    if resp.is_converged() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn write_counterexample(
    dir: &Path,
    sut: &SemanticsUnderTest,
    r: &CharacteristicReport,
) -> std::io::Result<()> {
    let Verdict::Falsified {
        reason,
        counterexample: Some(cx),
    } = &r.verdict
    else {
        return Ok(());
    };
    fs::create_dir_all(dir)?;
    let base = format!("{}-{}", slug(&sut.name), slug(r.characteristic.name()));
    let graphs: Vec<_> = cx
        .graphs
        .iter()
        .map(|lg| {
            json!({
                "label": lg.label,
                "degrees": lg.degrees,
                "document": GraphDocument::from_graph(&lg.graph),
            })
        })
        .collect();
    let record = json!({
        "semantics": sut.name,
        "characteristic": r.characteristic.name(),
        "seed": r.seed,
        "trials": r.trials,
        "reason": reason,
        "instance": cx.instance,
        "graphs": graphs,
    });
    fs::write(
        dir.join(format!("{base}.json")),
        serde_json::to_string_pretty(&record).expect("records serialize"),
    )?;
    for (k, lg) in cx.graphs.iter().enumerate() {
        fs::write(
            dir.join(format!("{base}-{k}.json")),
            serialize_graph(&GraphDocument::from_graph(&lg.graph)),
        )?;
    }
    Ok(())
}

fn gating(r: &CharacteristicReport) -> bool {
    r.derived_from.is_empty() && matches!(r.group, Group::Mandatory | Group::Bwsa)
}

fn axioms(args: &AxiomArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let s = &args.semantics;
    let sut = SemanticsUnderTest::for_tag(s.semantics, s.damping, s.sigmoid);
    let selected: Vec<Characteristic> = if args.characteristics.is_empty() {
        Characteristic::ALL.to_vec()
    } else {
        args.characteristics.clone()
    };
    let mut reps = Vec::new();
    for c in selected {
        match check(&sut, c, args.trials, args.seed) {
            Ok(r) => reps.push(r),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        }
    }
    if args.derived {
        reps.extend(implication_checks(&sut, args.trials, args.seed));
    }
    for r in &reps {
        if let Err(e) = write_counterexample(&args.counterexamples, &sut, r) {
            let _ = writeln!(err, "error: writing counterexample: {e}");
            return EXIT_INPUT;
        }
    }
    let _ = match args.format {
        Format::Table => {
            let title = format!("{}  trials {}  seed {}", sut.name, args.trials, args.seed);
            write!(out, "{}", render::reports(&title, &reps))
        }
        Format::Records => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&reps).expect("reports serialize")
        ),
    };
    if reps
        .iter()
        .filter(|r| gating(r))
        .any(|r| r.verdict.is_falsified())
    {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

fn serve(args: &ServeArgs, err: &mut dyn Write) -> i32 {
    let port = match args.port {
        Some(p) => p,
        None => match std::env::var("WASA_PORT") {
            Ok(v) => match v.parse() {
                Ok(p) => p,
                Err(_) => {
                    let _ = writeln!(err, "error: WASA_PORT `{v}` is not a port number");
                    return EXIT_INPUT;
                }
            },
            Err(_) => 8080,
        },
    };
    let dir = args
        .data_dir
        .clone()
        .or_else(|| std::env::var_os("WASA_DATA_DIR").map(PathBuf::from));
    let store = match &dir {
        Some(d) => match Store::open(d) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", d.display());
                return EXIT_INPUT;
            }
        },
        None => Store::in_memory(),
    };
    let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
    match rt.block_on(crate::server::serve(store, port)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn list_fixtures(name: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match name {
        None => {
            for n in fixtures::names() {
                let _ = writeln!(out, "{n}");
            }
            EXIT_OK
        }
        Some(n) => match fixtures::fixture(n) {
            Some(doc) => {
                let _ = writeln!(out, "{}", serialize_graph(&doc));
                EXIT_OK
            }
            None => {
                let _ = writeln!(err, "error: no fixture `{n}`");
                EXIT_INPUT
            }
        },
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Eval(a) => eval(a, out, err),
        Command::Axioms(a) => axioms(a, out, err),
        Command::Serve(a) => serve(a, err),
        Command::Fixtures { name } => list_fixtures(name.as_deref(), out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damping_values() {
        assert_eq!(parse_damping("auto").unwrap(), Damping::Auto);
        assert_eq!(parse_damping("2").unwrap(), Damping::Global(2.0));
        assert!(parse_damping("0.5").is_err());
        assert!(parse_damping("x").is_err());
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("dir (d = indegree + 1)"), "dir-d-indegree-1");
        assert_eq!(slug("Parent Monotony"), "parent-monotony");
    }

    #[test]
    fn cli_parses() {
        let cli = Cli::try_parse_from([
            "wasa",
            "axioms",
            "--semantics",
            "dir",
            "--characteristic",
            "Independence",
        ])
        .unwrap();
        let Command::Axioms(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.characteristics, vec![Characteristic::Independence]);
        assert!(Cli::try_parse_from([
            "wasa",
            "axioms",
            "--semantics",
            "dir",
            "--characteristic",
            "Nope"
        ])
        .is_err());
    }
}

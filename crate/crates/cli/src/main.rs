//! `kignn`: command line front end for the workbench.
//!
//! Exit codes: 0 when every check passes, 1 on a mismatch or counterexample,
//! 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use kignn::compile::{
    audit_primitives, compile_gml_localsum, compile_isotype_globalsum, compile_isotype_localmax,
    compile_isotype_localsum_square, compile_lddl_semilinear, compile_ml_localmax, compile_unique_address,
    compile_wgml_modal, compile_wgml_top, parse_address_pair, CompileTarget,
};
use kignn::equiv::{bisimilar, cr_signature, find_covering, r_bisimilar, verify_covering};
use kignn::feature::{classify, parse_model, write_model, GnnClassifier};
use kignn::graph::{builtin_graph, parse_graph, random_keying, Fixture, PointedKeyedGraph};
use kignn::logic::{modelcheck_gml, modelcheck_lddl, parse_formula, parse_gml, parse_lddl, parse_ml, Formula, Logic};
use kignn::workbench::{oracle_agreement, separation_report, test_key_invariance, CorpusSpec, SEPARATION_REPORTS};
use serde_json::json;

#[derive(Parser)]
#[command(name = "kignn", version, about = "Key-invariant GNN workbench")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print it back.
    Parse {
        #[arg(long)]
        logic: Logic,
        formula: String,
    },
    /// Model-check a formula at the point of a graph.
    Check {
        #[arg(long)]
        logic: Logic,
        #[arg(long)]
        graph: String,
        formula: String,
    },
    /// Compile a formula, address pair, or graph to a `.kir` model.
    Compile {
        #[arg(long)]
        target: CompileTarget,
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        formula: Option<String>,
        #[arg(long)]
        graph: Option<String>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Evaluate a model at every node of a graph.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        graph: String,
        /// Replace the graph's keys with a seeded random keying.
        #[arg(long)]
        keying_seed: Option<u64>,
    },
    /// Color refinement signature of the point.
    Cr {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Bisimilarity of two pointed graphs (bounded with `--rounds`).
    Bisim {
        g: String,
        h: String,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Search for a covering map from the first graph onto the second.
    Cover { g: String, h: String },
    /// Try to falsify key-invariance of a model.
    Invariance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_nodes: usize,
        #[arg(long, default_value_t = 1)]
        props: usize,
        #[arg(long, default_value_t = 10)]
        keyings: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare a compiler against its semantic oracle on a corpus.
    Oracle {
        #[arg(long)]
        target: CompileTarget,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a named separation report.
    Report { name: String },
}

/// A failure with its exit code.
struct Fail(u8, String);

fn usage(msg: impl std::fmt::Display) -> Fail {
    Fail(2, msg.to_string())
}

/// Reads a `.pg` file, or a builtin fixture name such as `cycle(3)`.
fn load_graph(arg: &str) -> Result<PointedKeyedGraph, Fail> {
    match std::fs::read_to_string(arg) {
        Ok(text) => parse_graph(&text).map_err(|e| usage(format!("{arg}: {e}"))),
        Err(io) => match Fixture::from_str(arg) {
            Ok(f) => builtin_graph(f).map_err(usage),
            Err(_) => Err(usage(format!("{arg}: {io}"))),
        },
    }
}

fn load_model(path: &PathBuf) -> Result<GnnClassifier, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn compile(target: CompileTarget, formula: Option<&str>, graph: Option<&str>) -> Result<GnnClassifier, Fail> {
    use CompileTarget::*;
    if target.takes_graph() {
        let g = load_graph(graph.ok_or_else(|| usage(format!("{target} needs --graph")))?)?;
        let c = match target {
            IsotypeLocalMaxSemilinear => compile_isotype_localmax(&g.pointed),
            IsotypeLocalSumSquare => compile_isotype_localsum_square(&g.pointed),
            _ => compile_isotype_globalsum(&g.pointed),
        };
        return c.map_err(usage);
    }
    let text = formula.ok_or_else(|| usage(format!("{target} needs --formula")))?;
    let c = match target {
        GmlLocalSumRelu => Ok(compile_gml_localsum(&parse_gml(text).map_err(usage)?)),
        MlLocalMaxRelu => compile_ml_localmax(&parse_ml(text).map_err(usage)?),
        WgmlTopLocalMaxRelu => compile_wgml_top(&parse_gml(text).map_err(usage)?),
        WgmlModalLocalMaxSigmoid => compile_wgml_modal(&parse_gml(text).map_err(usage)?),
        LddlLocalMaxSemilinear => Ok(compile_lddl_semilinear(&parse_lddl(text).map_err(usage)?)),
        UniqAddrLocalSum(mode) => {
            let (a, b) = parse_address_pair(text).map_err(usage)?;
            compile_unique_address(&a, &b, mode)
        }
        _ => unreachable!("graph targets handled above"),
    };
    c.map_err(usage)
}

fn emit(json: bool, value: serde_json::Value, text: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("{}", text.trim_end());
    }
}

fn verdict(ok: bool) -> Result<(), Fail> {
    if ok {
        Ok(())
    } else {
        Err(Fail(1, String::new()))
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Parse { logic, formula } => {
            let f = parse_formula(&formula, logic).map_err(usage)?;
            emit(json, json!({ "logic": logic.to_string(), "formula": f.to_string() }), f.to_string());
            Ok(())
        }
        Cmd::Check { logic, graph, formula } => {
            let f = parse_formula(&formula, logic).map_err(usage)?;
            let g = load_graph(&graph)?;
            let holds = match &f {
                Formula::Gml(f) => modelcheck_gml(&g.pointed, f),
                Formula::Lddl(f) => modelcheck_lddl(&g.pointed, f),
            }
            .map_err(usage)?;
            emit(json, json!({ "formula": f.to_string(), "holds": holds }), format!("holds: {holds}"));
            Ok(())
        }
        Cmd::Compile { target, formula, graph, output } => {
            let c = compile(target, formula.as_deref(), graph.as_deref())?;
            let bad = audit_primitives(&c, target);
            let kir = write_model(&c);
            match output {
                Some(p) => std::fs::write(&p, &kir).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None if !json => print!("{kir}"),
                None => {}
            }
            if json {
                emit(true, json!({ "target": target.name(), "dag_size": c.expr.dag_size(),
                    "aggregation_depth": c.expr.aggregation_depth(), "audit": bad, "model": kir }), String::new());
            } else if !bad.is_empty() {
                eprintln!("audit: disallowed {}", bad.join(", "));
            }
            verdict(bad.is_empty())
        }
        Cmd::Eval { model, graph, keying_seed } => {
            let c = load_model(&model)?;
            let mut g = load_graph(&graph)?;
            if let Some(s) = keying_seed {
                g.keying = Some(random_keying(g.graph(), s));
            }
            let nodes = c.classify_nodes(g.graph(), g.keying.as_ref()).map_err(usage)?;
            let at = classify(&c, &g).map_err(usage)?;
            let mut text = format!("point {}: output {} accept {}\n", g.point(), at.output, at.accept);
            for (v, d) in nodes.iter().enumerate() {
                text += &format!("node {v}: output {} accept {}\n", d.output, d.accept);
            }
            emit(json, json!({ "point": g.point(), "decision": at, "nodes": nodes }), text);
            Ok(())
        }
        Cmd::Cr { graph, rounds } => {
            let g = load_graph(&graph)?;
            let sig = cr_signature(&g.pointed, rounds.unwrap_or(usize::MAX));
            let colors: Vec<String> = sig.colors.iter().map(usize::to_string).collect();
            emit(
                json,
                json!(sig),
                format!("point colors by round: {}\nstable round: {}", colors.join(" "), sig.stable_round),
            );
            Ok(())
        }
        Cmd::Bisim { g, h, rounds } => {
            let (g, h) = (load_graph(&g)?, load_graph(&h)?);
            match rounds {
                Some(r) => {
                    let ok = r_bisimilar(&g.pointed, &h.pointed, r);
                    emit(json, json!({ "rounds": r, "bisimilar": ok }), format!("{r}-bisimilar: {ok}"));
                    verdict(ok)
                }
                None => {
                    let w = bisimilar(&g.pointed, &h.pointed);
                    let text = match &w {
                        Some(w) => format!("bisimilar: true\nwitness: {}", serde_json::to_string(w).unwrap()),
                        None => "bisimilar: false".to_string(),
                    };
                    emit(json, json!({ "bisimilar": w.is_some(), "witness": w }), text);
                    verdict(w.is_some())
                }
            }
        }
        Cmd::Cover { g, h } => {
            let (g, h) = (load_graph(&g)?, load_graph(&h)?);
            let f = find_covering(&g.pointed, &h.pointed);
            let verified = f.as_ref().is_some_and(|f| verify_covering(&g.pointed, &h.pointed, f));
            let text = match &f {
                Some(f) => {
                    let pairs: Vec<String> = f.iter().enumerate().map(|(x, y)| format!("{x}->{y}")).collect();
                    format!("covering: {}\nverified: {verified}", pairs.join(" "))
                }
                None => "covering: none".to_string(),
            };
            emit(json, json!({ "covering": f, "verified": verified }), text);
            verdict(verified)
        }
        Cmd::Invariance { model, max_nodes, props, keyings, seed } => {
            let c = load_model(&model)?;
            let rep = test_key_invariance(&c, max_nodes, props, keyings, seed).map_err(usage)?;
            emit(json, json!(rep), rep.to_string());
            verdict(rep.passed())
        }
        Cmd::Oracle { target, max_nodes, count, seed } => {
            let mut spec = CorpusSpec::standard(target);
            spec.max_nodes = max_nodes.unwrap_or(spec.max_nodes);
            spec.count = count.unwrap_or(spec.count);
            spec.seed = seed.unwrap_or(spec.seed);
            let rep = oracle_agreement(target, &spec).map_err(usage)?;
            emit(json, json!(rep), rep.to_string());
            verdict(rep.passed())
        }
        Cmd::Report { name } => {
            let rep = separation_report(&name)
                .ok_or_else(|| usage(format!("unknown report `{name}`; known: {}", SEPARATION_REPORTS.join(", "))))?;
            emit(json, json!(rep), rep.to_string());
            verdict(rep.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

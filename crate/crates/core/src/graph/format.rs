//! The line-oriented `.pg` graph format.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Graph, GraphError, Keying, PointedGraph, PointedKeyedGraph};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseGraphError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseGraphError> {
    Err(ParseGraphError { line, msg: msg.into() })
}

fn num(line: usize, s: Option<&str>, what: &str) -> Result<usize, ParseGraphError> {
    match s.map(str::parse::<usize>) {
        Some(Ok(n)) => Ok(n),
        _ => err(line, format!("expected {what}")),
    }
}

/// Parses a `.pg` document.
pub fn parse_graph(text: &str) -> Result<PointedKeyedGraph, ParseGraphError> {
    let mut nodes: Option<usize> = None;
    let mut graph: Option<Graph> = None;
    let mut point: Option<usize> = None;
    let mut keys: Vec<Option<Rational>> = Vec::new();
    let mut key_values: HashSet<Rational> = HashSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let cmd = parts.next().unwrap();
        let a = parts.next();
        let b = parts.next();
        if parts.next().is_some() {
            return err(line, "trailing tokens");
        }
        let node_arg = |s: Option<&str>, n: usize| -> Result<usize, ParseGraphError> {
            let v = num(line, s, "node id")?;
            if v >= n {
                return err(line, format!("node {v} out of range"));
            }
            Ok(v)
        };
        match (cmd, nodes, &mut graph) {
            ("nodes", None, _) => {
                if b.is_some() {
                    return err(line, "trailing tokens");
                }
                let n = num(line, a, "node count")?;
                if n == 0 {
                    return err(line, "graph needs at least one node");
                }
                nodes = Some(n);
                keys = vec![None; n];
            }
            (_, None, _) => return err(line, "first line must be `nodes <n>`"),
            ("nodes", Some(_), _) => return err(line, "duplicate `nodes` line"),
            ("props", Some(n), g) => {
                if g.is_some() {
                    return err(line, "duplicate `props` line");
                }
                if b.is_some() {
                    return err(line, "trailing tokens");
                }
                *g = Some(Graph::new(n, num(line, a, "proposition count")?));
            }
            (_, Some(_), None) => return err(line, "`props <P>` must precede graph contents"),
            ("edge", Some(n), Some(g)) => {
                let (u, v) = (node_arg(a, n)?, node_arg(b, n)?);
                match g.add_edge(u, v) {
                    Ok(()) => {}
                    Err(GraphError::SelfLoop(x)) => return err(line, format!("self-loop at node {x}")),
                    Err(GraphError::DuplicateEdge(x, y)) => return err(line, format!("duplicate edge {x}-{y}")),
                    Err(e) => return err(line, e.to_string()),
                }
            }
            ("label", Some(n), Some(g)) => {
                let v = node_arg(a, n)?;
                let bits = b.ok_or(()).or_else(|_| err(line, "expected label bits"))?;
                if bits.len() != g.prop_count() || !bits.bytes().all(|c| c == b'0' || c == b'1') {
                    return err(line, format!("label must be {} bits of 0/1", g.prop_count()));
                }
                g.set_label_vec(v, bits.bytes().map(|c| c == b'1').collect()).unwrap();
            }
            ("point", Some(n), Some(_)) => {
                if b.is_some() {
                    return err(line, "trailing tokens");
                }
                if point.is_some() {
                    return err(line, "duplicate `point` line");
                }
                point = Some(node_arg(a, n)?);
            }
            ("key", Some(n), Some(_)) => {
                let v = node_arg(a, n)?;
                let q: Rational = match b.map(str::parse) {
                    Some(Ok(q)) => q,
                    _ => return err(line, "expected rational key"),
                };
                if keys[v].is_some() {
                    return err(line, format!("node {v} keyed twice"));
                }
                if !key_values.insert(q.clone()) {
                    return err(line, format!("duplicate key value {q}"));
                }
                keys[v] = Some(q);
            }
            (other, _, _) => return err(line, format!("unknown directive `{other}`")),
        }
    }
    let end = last_line.max(1);
    let Some(graph) = graph else {
        return err(end, if nodes.is_none() { "missing `nodes` line" } else { "missing `props` line" });
    };
    let Some(point) = point else {
        return err(end, "missing `point` line");
    };
    let keyed = keys.iter().filter(|k| k.is_some()).count();
    let keying = if keyed == 0 {
        None
    } else if keyed == keys.len() {
        Some(Keying::new(keys.into_iter().map(Option::unwrap).collect()))
    } else {
        return err(end, "`key` lines must cover every node or none");
    };
    Ok(PointedKeyedGraph { pointed: PointedGraph { graph, point }, keying })
}

/// Writes a `.pg` document; labels are emitted only for labeled nodes.
pub fn write_graph(g: &PointedKeyedGraph) -> String {
    let gr = g.graph();
    let mut out = String::new();
    writeln!(out, "nodes {}", gr.node_count()).unwrap();
    writeln!(out, "props {}", gr.prop_count()).unwrap();
    for v in 0..gr.node_count() {
        let bits = gr.label_vec(v);
        if bits.iter().any(|&b| b) {
            let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(out, "label {v} {s}").unwrap();
        }
    }
    for (u, v) in gr.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    write!(out, "point {}", g.point()).unwrap();
    if let Some(k) = &g.keying {
        for (v, q) in k.values.iter().enumerate() {
            write!(out, "\nkey {v} {q}").unwrap();
        }
    }
    out
}

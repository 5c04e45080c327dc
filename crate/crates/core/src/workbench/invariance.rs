use std::fmt;

use serde::Serialize;

use crate::feature::GnnClassifier;
use crate::graph::{enumerate_graphs, random_keying, write_graph, EnumerateError, Graph, PointedGraph};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum InvarianceVerdict {
    /// No disagreement on the tested inputs. Not a proof of invariance.
    NoViolationFound,
    Counterexample {
        /// Pointed graph in `.pg` form, without keys.
        graph: String,
        seed_a: u64,
        seed_b: u64,
        keys_a: Vec<String>,
        keys_b: Vec<String>,
        accept_a: bool,
        accept_b: bool,
        output_a: String,
        output_b: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub classifier: String,
    pub corpus: String,
    pub graphs_tested: usize,
    pub keyings_per_graph: usize,
    pub seed: u64,
    /// Evaluations that failed (for example a proposition the graph lacks).
    pub evaluation_errors: usize,
    pub verdict: InvarianceVerdict,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.verdict == InvarianceVerdict::NoViolationFound
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classifier: {}", self.classifier)?;
        writeln!(f, "corpus: {}", self.corpus)?;
        writeln!(f, "graphs tested: {}", self.graphs_tested)?;
        writeln!(f, "keyings per graph: {} (seeds {}..)", self.keyings_per_graph, self.seed)?;
        if self.evaluation_errors > 0 {
            writeln!(f, "evaluation errors: {}", self.evaluation_errors)?;
        }
        match &self.verdict {
            InvarianceVerdict::NoViolationFound => write!(f, "verdict: NO_VIOLATION_FOUND"),
            InvarianceVerdict::Counterexample {
                graph, seed_a, seed_b, keys_a, keys_b, accept_a, accept_b, output_a, output_b,
            } => {
                writeln!(f, "verdict: COUNTEREXAMPLE")?;
                writeln!(f, "keying A (seed {seed_a}): [{}] -> accept={accept_a} output={output_a}", keys_a.join(", "))?;
                writeln!(f, "keying B (seed {seed_b}): [{}] -> accept={accept_b} output={output_b}", keys_b.join(", "))?;
                write!(f, "graph:\n{}", graph.trim_end())
            }
        }
    }
}

/// Evaluates `c` on every pointed graph with up to `max_nodes` nodes under
/// `keyings` seeded keyings and reports the first decision that changes.
pub fn test_key_invariance(
    c: &GnnClassifier,
    max_nodes: usize,
    props: usize,
    keyings: usize,
    seed: u64,
) -> Result<InvarianceReport, EnumerateError> {
    let corpus = format!("all graphs <= {max_nodes} nodes, {props} props");
    Ok(test_key_invariance_on(c, enumerate_graphs(max_nodes, props, false)?, &corpus, keyings, seed))
}

/// Like [`test_key_invariance`] over explicit graphs; every node is a point.
pub fn test_key_invariance_on(
    c: &GnnClassifier,
    graphs: impl IntoIterator<Item = Graph>,
    corpus: &str,
    keyings: usize,
    seed: u64,
) -> InvarianceReport {
    let mut rep = InvarianceReport {
        classifier: c.meta.clone(),
        corpus: corpus.to_string(),
        graphs_tested: 0,
        keyings_per_graph: keyings,
        seed,
        evaluation_errors: 0,
        verdict: InvarianceVerdict::NoViolationFound,
    };
    for g in graphs {
        rep.graphs_tested += 1;
        let mut first = None;
        for j in 0..keyings as u64 {
            let k = random_keying(&g, seed + j);
            let Ok(ds) = c.classify_nodes(&g, Some(&k)) else {
                rep.evaluation_errors += 1;
                continue;
            };
            let Some((k0, d0, s0)) = &first else {
                first = Some((k, ds, seed + j));
                continue;
            };
            if let Some(v) = (0..g.node_count()).find(|&v| ds[v].accept != d0[v].accept) {
                let pg = PointedGraph { graph: g.clone(), point: v };
                let keys = |k: &crate::graph::Keying| k.values.iter().map(|x| x.to_string()).collect();
                rep.verdict = InvarianceVerdict::Counterexample {
                    graph: write_graph(&pg.unkeyed()),
                    seed_a: *s0,
                    seed_b: seed + j,
                    keys_a: keys(k0),
                    keys_b: keys(&k),
                    accept_a: d0[v].accept,
                    accept_b: ds[v].accept,
                    output_a: d0[v].output.to_string(),
                    output_b: ds[v].output.to_string(),
                };
                return rep;
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::fixture_classifier;
    use crate::feature::{Feature, Policy};
    use crate::scalar::Mode;

    #[test]
    fn key_leak_is_flagged() {
        let c = GnnClassifier::new(Feature::val(), Policy::PosNonpos, Mode::Exact).unwrap().with_meta("val");
        let r = test_key_invariance(&c, 1, 0, 20, 0).unwrap();
        match &r.verdict {
            InvarianceVerdict::Counterexample { keys_a, keys_b, accept_a, accept_b, .. } => {
                assert_ne!(accept_a, accept_b);
                assert_ne!(keys_a[0].starts_with('-'), keys_b[0].starts_with('-'));
            }
            v => panic!("{v:?}"),
        }
        assert!(r.to_string().contains("COUNTEREXAMPLE"));
    }

    #[test]
    fn oblivious_and_invariant_pass() {
        let c = GnnClassifier::new(Feature::prop(1).local_max(), Policy::OneZero, Mode::Exact).unwrap();
        assert!(test_key_invariance(&c, 3, 1, 5, 0).unwrap().passed());
        let d = fixture_classifier("diamond2top").unwrap();
        let r = test_key_invariance(&d, 4, 0, 20, 0).unwrap();
        assert!(r.passed());
        assert!(r.to_string().contains("NO_VIOLATION_FOUND"));
    }
}

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::compile::{
    compile_gml_localsum, compile_isotype_globalsum, compile_isotype_localmax, compile_isotype_localsum_square,
    compile_lddl_semilinear, compile_ml_localmax, compile_unique_address, compile_wgml_modal, compile_wgml_top,
    unique_address_query, AddressMode, CompileTarget,
};
use crate::feature::GnnClassifier;
use crate::graph::{
    builtin_graph, component_of, enumerate_graphs, is_isomorphic, random_keying, write_graph, Fixture, Graph,
    PointedGraph, PointedKeyedGraph,
};
use crate::logic::{
    random_gml, random_lddl, random_ml, random_wgml_modal, random_wgml_top, sat_gml, sat_lddl, GmlFormula,
};
use crate::rational::Rational;
use crate::scalar::Scalar;

/// Mismatches kept per source; the total count is always exact.
const KEPT_PER_SOURCE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("corpus out of bounds: {0}")]
    OutOfBounds(String),
    #[error("compile failed for {source_text}: {msg}")]
    Compile { source_text: String, msg: String },
}

/// Which sources to compile and which inputs to run them on.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusSpec {
    /// Number of random formulas (or address pairs); fixture targets ignore it.
    pub count: usize,
    pub depth: usize,
    pub max_grade: usize,
    pub prog_len: usize,
    pub props: usize,
    pub max_nodes: usize,
    pub connected_only: bool,
    /// Seeded keyings per graph; 0 evaluates without keys.
    pub keyings: usize,
    pub seed: u64,
}

impl CorpusSpec {
    /// The standard corpus for each target.
    pub fn standard(target: CompileTarget) -> Self {
        use CompileTarget::*;
        let base = CorpusSpec {
            count: 100,
            depth: 3,
            max_grade: 3,
            prog_len: 3,
            props: 1,
            max_nodes: 4,
            connected_only: true,
            keyings: 10,
            seed: 0,
        };
        match target {
            GmlLocalSumRelu | MlLocalMaxRelu => {
                CorpusSpec { count: 200, props: 2, connected_only: false, keyings: 0, ..base }
            }
            WgmlTopLocalMaxRelu | WgmlModalLocalMaxSigmoid => base,
            LddlLocalMaxSemilinear => CorpusSpec { depth: 2, ..base },
            UniqAddrLocalSum(_) => CorpusSpec { count: 50, depth: 1, ..base },
            IsotypeLocalMaxSemilinear | IsotypeLocalSumSquare => CorpusSpec { count: 0, ..base },
            IsotypeGlobalSumSemilinear => CorpusSpec { count: 0, props: 0, connected_only: false, ..base },
        }
    }

    fn check(&self) -> Result<(), OracleError> {
        let limits = [
            ("max_nodes", self.max_nodes, 5),
            ("props", self.props, 2),
            ("keyings", self.keyings, 100),
            ("count", self.count, 10_000),
            ("depth", self.depth, 4),
            ("max_grade", self.max_grade, 4),
            ("prog_len", self.prog_len, 4),
        ];
        for (name, v, max) in limits {
            if v > max {
                return Err(OracleError::OutOfBounds(format!("{name} = {v} exceeds {max}")));
            }
        }
        if self.max_nodes == 0 {
            return Err(OracleError::OutOfBounds("max_nodes must be positive".into()));
        }
        Ok(())
    }

    fn describe(&self, target: CompileTarget) -> String {
        let graphs = format!(
            "{} graphs <= {} nodes, {} props, {} keyings",
            if self.connected_only { "connected" } else { "all" },
            self.max_nodes,
            self.props,
            self.keyings
        );
        let src = match target {
            t if t.takes_graph() => "fixture targets".to_string(),
            CompileTarget::UniqAddrLocalSum(_) => {
                format!("{} random address pairs (length <= 2, depth <= {})", self.count, self.depth)
            }
            CompileTarget::LddlLocalMaxSemilinear => format!(
                "{} random formulas (depth <= {}, program length <= {})",
                self.count, self.depth, self.prog_len
            ),
            _ => format!("{} random formulas (depth <= {}, grades <= {})", self.count, self.depth, self.max_grade),
        };
        format!("{src}; {graphs}; seed {}", self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MismatchKind {
    /// Decision differs from the oracle.
    Decision,
    /// Output outside `{0, 1}` for a 0/1 target.
    Output,
    /// Evaluation failed.
    Error,
}

/// A replayable disagreement: `graph` is the keyed pointed graph in `.pg` form.
#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub kind: MismatchKind,
    pub source: String,
    pub graph: String,
    pub expected: bool,
    pub got: bool,
    pub output: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub target: String,
    pub corpus: String,
    pub sources: usize,
    pub instances: usize,
    pub mismatch_count: usize,
    pub mismatches: Vec<Mismatch>,
    /// Smallest output among accepted instances, as a float.
    pub min_accept_output: Option<f64>,
    pub wall_ms: u128,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "corpus: {}", self.corpus)?;
        writeln!(f, "sources: {}", self.sources)?;
        writeln!(f, "instances: {}", self.instances)?;
        writeln!(f, "mismatches: {}", self.mismatch_count)?;
        if let Some(m) = self.min_accept_output {
            writeln!(f, "smallest accepting output: {m:e}")?;
        }
        writeln!(f, "wall time: {} ms", self.wall_ms)?;
        for m in &self.mismatches {
            writeln!(f, "-- {:?} on {}: expected {} got {} (output {})", m.kind, m.source, m.expected, m.got, m.output)?;
            writeln!(f, "{}", m.graph.trim_end())?;
        }
        write!(f, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

type NodeOracle = Box<dyn Fn(&Graph) -> Vec<bool> + Send + Sync>;

struct Source {
    label: String,
    classifier: GnnClassifier,
    oracle: NodeOracle,
    props: usize,
    zero_one: bool,
}

fn isotype_fixtures(target: CompileTarget) -> Vec<Fixture> {
    match target {
        CompileTarget::IsotypeLocalMaxSemilinear => {
            vec![Fixture::SingleNode, Fixture::Edge, Fixture::Path(3), Fixture::Cycle(3), Fixture::TriangleP]
        }
        CompileTarget::IsotypeLocalSumSquare => vec![Fixture::SingleNode, Fixture::Edge, Fixture::TriangleP],
        _ => vec![Fixture::TwoIsolated, Fixture::SingleNode, Fixture::Edge, Fixture::Cycle(3)],
    }
}

fn compile_err(source_text: String, e: impl fmt::Display) -> OracleError {
    OracleError::Compile { source_text, msg: e.to_string() }
}

fn gml_source(f: GmlFormula, props: usize, c: GnnClassifier, zero_one: bool) -> Source {
    let label = f.to_string();
    Source { label, classifier: c, oracle: Box::new(move |g| sat_gml(g, &f)), props, zero_one }
}

fn sources(target: CompileTarget, spec: &CorpusSpec) -> Result<Vec<Source>, OracleError> {
    use CompileTarget::*;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    if target.takes_graph() {
        for fx in isotype_fixtures(target) {
            let g = builtin_graph(fx).expect("builtin").pointed;
            let c = match target {
                IsotypeLocalMaxSemilinear => compile_isotype_localmax(&g),
                IsotypeLocalSumSquare => compile_isotype_localsum_square(&g),
                _ => compile_isotype_globalsum(&g),
            }
            .map_err(|e| compile_err(fx.to_string(), e))?;
            let whole = target == IsotypeGlobalSumSemilinear;
            let props = g.graph.prop_count();
            let oracle: NodeOracle = Box::new(move |h| {
                (0..h.node_count())
                    .map(|v| {
                        let pg = PointedGraph { graph: h.clone(), point: v };
                        let pg = if whole { pg } else { component_of(&pg).0 };
                        is_isomorphic(&pg, &g).is_some()
                    })
                    .collect()
            });
            out.push(Source { label: fx.to_string(), classifier: c, oracle, props, zero_one: false });
        }
        return Ok(out);
    }
    for _ in 0..spec.count {
        let s = match target {
            GmlLocalSumRelu => {
                let f = random_gml(&mut rng, spec.depth, spec.max_grade, spec.props);
                let c = compile_gml_localsum(&f);
                gml_source(f, spec.props, c, true)
            }
            MlLocalMaxRelu => {
                let f = random_ml(&mut rng, spec.depth, spec.props);
                let c = compile_ml_localmax(&f).map_err(|e| compile_err(f.to_string(), e))?;
                gml_source(f, spec.props, c, true)
            }
            WgmlTopLocalMaxRelu => {
                let f = random_wgml_top(&mut rng, spec.depth, spec.props);
                let c = compile_wgml_top(&f).map_err(|e| compile_err(f.to_string(), e))?;
                gml_source(f, spec.props, c, false)
            }
            WgmlModalLocalMaxSigmoid => {
                let f = random_wgml_modal(&mut rng, spec.depth, spec.props);
                let c = compile_wgml_modal(&f).map_err(|e| compile_err(f.to_string(), e))?;
                gml_source(f, spec.props, c, false)
            }
            LddlLocalMaxSemilinear => {
                let f = random_lddl(&mut rng, spec.depth, spec.prog_len, spec.props);
                let c = compile_lddl_semilinear(&f);
                let label = f.to_string();
                Source { label, classifier: c, oracle: Box::new(move |g| sat_lddl(g, &f)), props: spec.props, zero_one: false }
            }
            UniqAddrLocalSum(mode) => address_source(&mut rng, spec, mode),
            _ => unreachable!("graph targets handled above"),
        };
        out.push(s);
    }
    Ok(out)
}

/// A compiled source of a corpus with the proposition count of its inputs.
pub struct CorpusItem {
    pub label: String,
    pub classifier: GnnClassifier,
    pub props: usize,
}

/// The classifiers [`oracle_agreement`] would compile for this corpus.
pub fn corpus_classifiers(target: CompileTarget, spec: &CorpusSpec) -> Result<Vec<CorpusItem>, OracleError> {
    spec.check()?;
    Ok(sources(target, spec)?
        .into_iter()
        .map(|s| CorpusItem { label: s.label, classifier: s.classifier, props: s.props })
        .collect())
}

fn random_address(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> Vec<GmlFormula> {
    let len = rng.random_range(1..=2);
    (0..len).map(|_| random_ml(rng, spec.depth, spec.props)).collect()
}

fn address_source(rng: &mut ChaCha8Rng, spec: &CorpusSpec, mode: AddressMode) -> Source {
    let a = random_address(rng, spec);
    let b = random_address(rng, spec);
    let c = compile_unique_address(&a, &b, mode).expect("nonempty addresses");
    let show = |x: &[GmlFormula]| x.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ");
    let label = format!("{} / {}", show(&a), show(&b));
    let oracle: NodeOracle = Box::new(move |g| {
        (0..g.node_count())
            .map(|v| unique_address_query(&PointedGraph { graph: g.clone(), point: v }, &a, &b))
            .collect()
    });
    Source { label, classifier: c, oracle, props: spec.props, zero_one: false }
}

fn is_zero_one(x: &Scalar) -> bool {
    match x {
        Scalar::Exact(q) => q.is_zero() || *q == Rational::one(),
        Scalar::Float(f) => *f == 0.0 || *f == 1.0,
    }
}

struct SourceResult {
    instances: usize,
    min_accept: Option<f64>,
    mismatch_count: usize,
    kept: Vec<Mismatch>,
}

fn run_source(s: &Source, graphs: &[Graph], spec: &CorpusSpec) -> SourceResult {
    let mut r = SourceResult { instances: 0, min_accept: None, mismatch_count: 0, kept: Vec::new() };
    let seeds: Vec<Option<u64>> =
        if spec.keyings == 0 { vec![None] } else { (0..spec.keyings as u64).map(|j| Some(spec.seed + j)).collect() };
    for g in graphs {
        let want = (s.oracle)(g);
        for seed in &seeds {
            let keying = seed.map(|sd| random_keying(g, sd));
            let mut record = |kind: MismatchKind, v: usize, got: bool, output: String| {
                r.mismatch_count += 1;
                if r.kept.len() < KEPT_PER_SOURCE {
                    let pg = PointedKeyedGraph::new(PointedGraph { graph: g.clone(), point: v }, keying.clone())
                        .expect("sizes match");
                    r.kept.push(Mismatch {
                        kind,
                        source: s.label.clone(),
                        graph: write_graph(&pg),
                        expected: want[v],
                        got,
                        output,
                    });
                }
            };
            r.instances += g.node_count();
            match s.classifier.classify_nodes(g, keying.as_ref()) {
                Err(e) => record(MismatchKind::Error, 0, false, e.to_string()),
                Ok(ds) => {
                    for (v, d) in ds.iter().enumerate() {
                        if d.accept {
                            let x = d.output.to_f64();
                            r.min_accept = Some(r.min_accept.map_or(x, |m: f64| m.min(x)));
                        }
                        if d.accept != want[v] {
                            record(MismatchKind::Decision, v, d.accept, d.output.to_string());
                        } else if s.zero_one && !is_zero_one(&d.output) {
                            record(MismatchKind::Output, v, d.accept, d.output.to_string());
                        }
                    }
                }
            }
        }
    }
    r
}

/// Compiles every source of the corpus and compares decisions with the
/// matching semantic oracle on every enumerated graph, node and keying.
pub fn oracle_agreement(target: CompileTarget, spec: &CorpusSpec) -> Result<OracleReport, OracleError> {
    spec.check()?;
    let start = Instant::now();
    let srcs = sources(target, spec)?;
    let mut by_props: Vec<Option<Vec<Graph>>> = vec![None; 3];
    for s in &srcs {
        if by_props[s.props].is_none() {
            let gs = enumerate_graphs(spec.max_nodes, s.props, spec.connected_only)
                .map_err(|e| OracleError::OutOfBounds(e.to_string()))?
                .collect();
            by_props[s.props] = Some(gs);
        }
    }
    let results: Vec<SourceResult> =
        srcs.par_iter().map(|s| run_source(s, by_props[s.props].as_ref().unwrap(), spec)).collect();
    let mut rep = OracleReport {
        target: target.to_string(),
        corpus: spec.describe(target),
        sources: srcs.len(),
        instances: 0,
        mismatch_count: 0,
        mismatches: Vec::new(),
        min_accept_output: None,
        wall_ms: 0,
    };
    for r in results {
        rep.instances += r.instances;
        rep.mismatch_count += r.mismatch_count;
        rep.mismatches.extend(r.kept);
        if let Some(x) = r.min_accept {
            rep.min_accept_output = Some(rep.min_accept_output.map_or(x, |m| m.min(x)));
        }
    }
    rep.wall_ms = start.elapsed().as_millis();
    Ok(rep)
}

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use super::eval::{EvalError, Plan};
use super::Feature;
use crate::graph::{random_keying, write_graph, Keying, PointedGraph, PointedKeyedGraph};
use crate::scalar::{Mode, Scalar};

/// Acceptance threshold for float outputs.
pub const FLOAT_THRESHOLD: f64 = 1e-9;

/// Output bands a classifier promises to respect.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Policy {
    /// `>0` accepts, `<=0` rejects.
    PosNonpos,
    /// `>0` accepts, `<0` rejects; `0` is never output.
    PosNeg,
    /// `>=1` accepts, `<=0` rejects; nothing in `(0,1)`.
    OneZero,
}

impl Policy {
    pub fn band(self) -> &'static str {
        match self {
            Policy::PosNonpos => ">0/<=0",
            Policy::PosNeg => ">0/<0",
            Policy::OneZero => ">=1/<=0",
        }
    }

    /// Whether `x` lies in one of the two bands.
    pub fn conforms(self, x: &Scalar) -> bool {
        match (self, x) {
            (Policy::PosNonpos, _) => true,
            (Policy::PosNeg, Scalar::Exact(q)) => !q.is_zero(),
            (Policy::PosNeg, Scalar::Float(f)) => f.abs() > FLOAT_THRESHOLD,
            (Policy::OneZero, Scalar::Exact(q)) => !q.is_positive() || *q >= crate::rational::Rational::one(),
            (Policy::OneZero, Scalar::Float(f)) => *f <= FLOAT_THRESHOLD || *f >= 1.0 - FLOAT_THRESHOLD,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.band())
    }
}

impl FromStr for Policy {
    type Err = ClassifierError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            ">0/<=0" => Ok(Policy::PosNonpos),
            ">0/<0" => Ok(Policy::PosNeg),
            ">=1/<=0" => Ok(Policy::OneZero),
            _ => Err(ClassifierError::UnknownPolicy(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifierError {
    #[error("unknown policy band `{0}`")]
    UnknownPolicy(String),
    #[error("exact mode requires an expression without sigmoid")]
    SigmoidInExact,
}

/// A feature expression with an acceptance policy and evaluation mode.
#[derive(Debug)]
pub struct GnnClassifier {
    pub expr: Feature,
    pub policy: Policy,
    pub mode: Mode,
    /// Free-form provenance: source formula, graph, compile target.
    pub meta: String,
    plan: OnceLock<Plan>,
}

impl Clone for GnnClassifier {
    fn clone(&self) -> Self {
        GnnClassifier {
            expr: self.expr.clone(),
            policy: self.policy,
            mode: self.mode,
            meta: self.meta.clone(),
            plan: self.plan.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub accept: bool,
    pub output: Scalar,
}

impl Decision {
    pub fn of(output: Scalar) -> Self {
        let accept = match &output {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Float(f) => *f > FLOAT_THRESHOLD,
        };
        Decision { accept, output }
    }
}

impl GnnClassifier {
    pub fn new(expr: Feature, policy: Policy, mode: Mode) -> Result<Self, ClassifierError> {
        if mode == Mode::Exact && !expr.is_exact_capable() {
            return Err(ClassifierError::SigmoidInExact);
        }
        Ok(GnnClassifier { expr, policy, mode, meta: String::new(), plan: OnceLock::new() })
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }

    pub fn plan(&self) -> &Plan {
        self.plan.get_or_init(|| Plan::new(&self.expr, self.mode).expect("mode checked at construction"))
    }

    /// Decisions at every node of `g` under `keying`.
    pub fn classify_nodes(&self, g: &crate::graph::Graph, keying: Option<&Keying>) -> Result<Vec<Decision>, EvalError> {
        Ok(self.plan().eval(g, keying)?.into_iter().map(Decision::of).collect())
    }
}

/// Decision at the point: output `> 0` (float: `> 1e-9`).
pub fn classify(c: &GnnClassifier, g: &PointedKeyedGraph) -> Result<Decision, EvalError> {
    let vals = c.plan().eval(g.graph(), g.keying.as_ref())?;
    Ok(Decision::of(vals[g.point()].clone()))
}

#[derive(Debug, Clone, Serialize)]
pub struct PolicyViolation {
    /// Witness in `.pg` form.
    pub graph: String,
    pub output: Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub policy: Policy,
    pub checked: usize,
    pub violations: Vec<PolicyViolation>,
    pub errors: Vec<String>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }
}

/// Checks the declared band on explicit inputs.
pub fn check_policy_conformance_on(
    c: &GnnClassifier,
    inputs: impl IntoIterator<Item = PointedKeyedGraph>,
) -> ConformanceReport {
    let mut rep = ConformanceReport { policy: c.policy, checked: 0, violations: vec![], errors: vec![] };
    for g in inputs {
        rep.checked += 1;
        match classify(c, &g) {
            Ok(d) if !c.policy.conforms(&d.output) => {
                rep.violations.push(PolicyViolation { graph: write_graph(&g), output: d.output })
            }
            Ok(_) => {}
            Err(e) => rep.errors.push(format!("{e}\n{}", write_graph(&g))),
        }
    }
    rep
}

/// Checks the declared band on every graph under `keyings_per_graph` seeded
/// keyings (seeds `seed, seed+1, ...`), or unkeyed when that count is 0.
pub fn check_policy_conformance(
    c: &GnnClassifier,
    gs: impl IntoIterator<Item = PointedGraph>,
    keyings_per_graph: usize,
    seed: u64,
) -> ConformanceReport {
    let inputs = gs.into_iter().flat_map(move |pg| {
        let v: Vec<PointedKeyedGraph> = if keyings_per_graph == 0 {
            vec![pg.unkeyed()]
        } else {
            (0..keyings_per_graph as u64)
                .map(|j| {
                    let k = random_keying(&pg.graph, seed + j);
                    PointedKeyedGraph { pointed: pg.clone(), keying: Some(k) }
                })
                .collect()
        };
        v
    });
    check_policy_conformance_on(c, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, enumerate_pointed_graphs, Fixture};
    use crate::rational::Rational;

    #[test]
    fn constant_classifiers() {
        let g = builtin_graph(Fixture::Cycle(4)).unwrap();
        let one = GnnClassifier::new(Feature::constant(1), Policy::OneZero, Mode::Exact).unwrap();
        let d = classify(&one, &g).unwrap();
        assert!(d.accept);
        assert_eq!(d.output, Scalar::Exact(Rational::one()));
        let zero = GnnClassifier::new(Feature::constant(0), Policy::OneZero, Mode::Exact).unwrap();
        assert!(!classify(&zero, &g).unwrap().accept);
    }

    #[test]
    fn float_threshold() {
        assert!(!Decision::of(Scalar::Float(1e-10)).accept);
        assert!(Decision::of(Scalar::Float(1e-8)).accept);
    }

    #[test]
    fn half_violates_one_zero_everywhere() {
        let c = GnnClassifier::new(Feature::constant(Rational::new(1, 2)), Policy::OneZero, Mode::Exact).unwrap();
        let gs: Vec<_> = enumerate_pointed_graphs(3, 0, false).unwrap().collect();
        let rep = check_policy_conformance(&c, gs.clone(), 0, 0);
        assert_eq!(rep.violations.len(), gs.len());
    }

    #[test]
    fn zero_key_violates_pos_neg() {
        let c = GnnClassifier::new(Feature::val(), Policy::PosNeg, Mode::Exact).unwrap();
        let pg = builtin_graph(Fixture::Edge).unwrap().pointed;
        let ok = pg.clone().keyed(Keying::new(vec![Rational::one(), Rational::zero()])).unwrap();
        let bad = pg.keyed(Keying::new(vec![Rational::zero(), Rational::one()])).unwrap();
        let rep = check_policy_conformance_on(&c, vec![ok, bad]);
        assert_eq!(rep.checked, 2);
        assert_eq!(rep.violations.len(), 1);
    }

    #[test]
    fn sigmoid_rejected_in_exact() {
        assert_eq!(
            GnnClassifier::new(Feature::val().sigmoid(), Policy::PosNonpos, Mode::Exact).unwrap_err(),
            ClassifierError::SigmoidInExact
        );
    }
}

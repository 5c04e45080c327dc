//! Translators from logics and pointed graphs to GNN classifiers, plus named
//! example classifiers.

mod address;
mod fixtures;
mod isotype;
mod logic;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::feature::{Feature, FeatureExpr, GnnClassifier};
use crate::graph::Graph;
use crate::rational::Rational;
use crate::scalar::Primitive;

pub use address::{address_endpoint, compile_unique_address, parse_address_pair, unique_address_query, AddressMode};
pub use fixtures::{fixture_classifier, FixtureClassifier};
pub use isotype::{
    compile_isotype_globalsum, compile_isotype_localmax, compile_isotype_localsum_square, cs_detector,
    cs_detector_fn, MAX_GLOBALSUM_NODES, MAX_LOCALMAX_NODES, MAX_LOCALSUM_NODES,
};
pub use logic::{
    compile_gml_localsum, compile_lddl_semilinear, compile_ml_localmax, compile_wgml_modal, compile_wgml_modal_scaled,
    compile_wgml_top,
    DEFAULT_SIGMOID_SCALE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("formula is not in the modal fragment: {0}")]
    NotModal(String),
    #[error("formula is not in the required weakly graded fragment: {0}")]
    NotWgml(String),
    #[error("graph must be connected")]
    Disconnected,
    #[error("graph has {got} nodes; this compiler supports at most {max}")]
    TooLarge { got: usize, max: usize },
    #[error("address must be nonempty")]
    EmptyAddress,
    #[error("unknown fixture classifier `{0}`")]
    UnknownFixture(String),
}

/// Output classes, each fixing the aggregations and primitives a compiled
/// classifier may use.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CompileTarget {
    GmlLocalSumRelu,
    MlLocalMaxRelu,
    WgmlTopLocalMaxRelu,
    WgmlModalLocalMaxSigmoid,
    LddlLocalMaxSemilinear,
    IsotypeLocalMaxSemilinear,
    UniqAddrLocalSum(AddressMode),
    IsotypeLocalSumSquare,
    IsotypeGlobalSumSemilinear,
}

impl CompileTarget {
    pub const ALL: [CompileTarget; 10] = [
        CompileTarget::GmlLocalSumRelu,
        CompileTarget::MlLocalMaxRelu,
        CompileTarget::WgmlTopLocalMaxRelu,
        CompileTarget::WgmlModalLocalMaxSigmoid,
        CompileTarget::LddlLocalMaxSemilinear,
        CompileTarget::IsotypeLocalMaxSemilinear,
        CompileTarget::UniqAddrLocalSum(AddressMode::Sigmoid),
        CompileTarget::UniqAddrLocalSum(AddressMode::Semilinear),
        CompileTarget::IsotypeLocalSumSquare,
        CompileTarget::IsotypeGlobalSumSemilinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompileTarget::GmlLocalSumRelu => "gml_localsum_relu",
            CompileTarget::MlLocalMaxRelu => "ml_localmax_relu",
            CompileTarget::WgmlTopLocalMaxRelu => "wgml_top_localmax_relu",
            CompileTarget::WgmlModalLocalMaxSigmoid => "wgml_modal_localmax_sigmoid",
            CompileTarget::LddlLocalMaxSemilinear => "lddl_localmax_semilinear",
            CompileTarget::IsotypeLocalMaxSemilinear => "isotype_localmax_semilinear",
            CompileTarget::UniqAddrLocalSum(AddressMode::Sigmoid) => "uniqaddr_localsum_sigmoid",
            CompileTarget::UniqAddrLocalSum(AddressMode::Semilinear) => "uniqaddr_localsum_semilinear",
            CompileTarget::IsotypeLocalSumSquare => "isotype_localsum_square",
            CompileTarget::IsotypeGlobalSumSemilinear => "isotype_globalsum_semilinear",
        }
    }

    /// Whether the source is a graph rather than a formula.
    pub fn takes_graph(self) -> bool {
        matches!(
            self,
            CompileTarget::IsotypeLocalMaxSemilinear
                | CompileTarget::IsotypeLocalSumSquare
                | CompileTarget::IsotypeGlobalSumSemilinear
        )
    }

    fn allows_aggregation(self, e: &FeatureExpr) -> bool {
        use CompileTarget::*;
        match e {
            FeatureExpr::LocalMax(_) => matches!(
                self,
                MlLocalMaxRelu
                    | WgmlTopLocalMaxRelu
                    | WgmlModalLocalMaxSigmoid
                    | LddlLocalMaxSemilinear
                    | IsotypeLocalMaxSemilinear
            ),
            FeatureExpr::LocalSum(_) => matches!(
                self,
                GmlLocalSumRelu | UniqAddrLocalSum(_) | IsotypeLocalSumSquare | IsotypeGlobalSumSemilinear
            ),
            FeatureExpr::GlobalSum(_) => self == IsotypeGlobalSumSemilinear,
            _ => true,
        }
    }

    fn allows_primitive(self, p: &Primitive) -> bool {
        use CompileTarget::*;
        match p {
            Primitive::Const(_) | Primitive::Affine { .. } | Primitive::Relu => true,
            Primitive::IfPos => matches!(
                self,
                LddlLocalMaxSemilinear
                    | IsotypeLocalMaxSemilinear
                    | UniqAddrLocalSum(AddressMode::Semilinear)
                    | IsotypeLocalSumSquare
                    | IsotypeGlobalSumSemilinear
            ),
            Primitive::Square => self == IsotypeLocalSumSquare,
            Primitive::Sigmoid => {
                matches!(self, WgmlModalLocalMaxSigmoid | UniqAddrLocalSum(AddressMode::Sigmoid))
            }
            Primitive::Heaviside | Primitive::TriWave => false,
        }
    }
}

impl fmt::Display for CompileTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompileTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let k = s.to_ascii_lowercase().replace('-', "_");
        CompileTarget::ALL.into_iter().find(|t| t.name() == k).ok_or_else(|| format!("unknown target `{s}`"))
    }
}

/// Lists every aggregation or primitive in `c` outside what `target` permits.
pub fn audit_primitives(c: &GnnClassifier, target: CompileTarget) -> Vec<String> {
    let mut bad = Vec::new();
    for n in c.expr.post_order() {
        match &*n {
            FeatureExpr::Apply(p, _) if !target.allows_primitive(p) => bad.push(p.name().to_string()),
            FeatureExpr::LocalMax(_) if !target.allows_aggregation(&n) => bad.push("localmax".into()),
            FeatureExpr::LocalSum(_) if !target.allows_aggregation(&n) => bad.push("localsum".into()),
            FeatureExpr::GlobalSum(_) if !target.allows_aggregation(&n) => bad.push("globalsum".into()),
            _ => {}
        }
    }
    bad.sort();
    bad.dedup();
    bad
}

// Shared building blocks.

fn one() -> Feature {
    Feature::constant(1)
}

fn zero() -> Feature {
    Feature::constant(0)
}

/// `1 - x`.
fn not01(x: &Feature) -> Feature {
    x.scale(-1, 1)
}

/// Order-preserving nonzero re-keying: negative keys stay, others shift up by 1.
fn key_nonzero() -> Feature {
    let v = Feature::val();
    Feature::if_pos(&v.scale(-1, 0), &v, &v.plus_const(1))
}

/// `x <- max(x, LocalMax(x))`, `rounds` times.
fn spread_max(x: &Feature, rounds: usize) -> Feature {
    (0..rounds).fold(x.clone(), |y, _| Feature::max(&y, &y.local_max()))
}

/// `x <- min(x, LocalMin(x))`, `rounds` times.
fn spread_min(x: &Feature, rounds: usize) -> Feature {
    (0..rounds).fold(x.clone(), |y, _| Feature::min(&y, &y.local_min()))
}

/// `x <- x + LocalSum(x)`, `rounds` times.
fn spread_sum(x: &Feature, rounds: usize) -> Feature {
    (0..rounds).fold(x.clone(), |y, _| &y + &y.local_sum())
}

/// `a·b = ((a+b)² - (a-b)²) / 4`.
fn prod(a: &Feature, b: &Feature) -> Feature {
    let s = (a + b).square();
    let d = (a - b).square();
    Feature::affine(vec![Rational::new(1, 4), Rational::new(-1, 4)], 0, vec![s, d])
}

/// Sum over walks of length `1..=len` of the endpoint values.
fn walk(x: &Feature, len: usize) -> Feature {
    let mut terms = Vec::with_capacity(len);
    let mut cur = x.clone();
    for _ in 0..len {
        cur = cur.local_sum();
        terms.push(cur.clone());
    }
    Feature::sum(&terms, 0)
}

/// 1 if `x != 0`, else 0.
fn nonzero(x: &Feature) -> Feature {
    Feature::if_pos(&x.abs(), &one(), &zero())
}

/// 1 if `x == 0`, else 0.
fn is_zero(x: &Feature) -> Feature {
    Feature::if_zero(x, &one(), &zero())
}

/// 1 at nodes whose label equals that of node `v` of `g`, else 0.
fn label_match(g: &Graph, v: usize) -> Feature {
    let p = g.prop_count();
    if p == 0 {
        return one();
    }
    let terms: Vec<Feature> =
        (1..=p).map(|i| if g.label(v, i) { Feature::prop(i) } else { not01(&Feature::prop(i)) }).collect();
    Feature::sum(&terms, -(p as i64 - 1)).relu()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_round_trip() {
        for t in CompileTarget::ALL {
            assert_eq!(t.name().parse::<CompileTarget>().unwrap(), t);
        }
        assert!("nope".parse::<CompileTarget>().is_err());
    }
}

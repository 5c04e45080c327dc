use std::fmt;
use std::str::FromStr;

use super::logic::{compile_gml_localsum, DEFAULT_SIGMOID_SCALE};
use super::CompileError;
use crate::feature::{Feature, GnnClassifier, Policy};
use crate::logic::GmlFormula;
use crate::rational::Rational;
use crate::scalar::Mode;

/// Hand-built example classifiers.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FixtureClassifier {
    /// Accepts points with at least two neighbors: max minus min neighbor key.
    Diamond2Top,
    /// Accepts points with an even number of neighbors.
    QEven,
    /// Rejects exactly the triangle with one `p1` node next to an unlabeled point.
    TriangleComplement,
}

impl FixtureClassifier {
    pub const ALL: [FixtureClassifier; 3] =
        [FixtureClassifier::Diamond2Top, FixtureClassifier::QEven, FixtureClassifier::TriangleComplement];

    pub fn name(self) -> &'static str {
        match self {
            FixtureClassifier::Diamond2Top => "diamond2top",
            FixtureClassifier::QEven => "q_even",
            FixtureClassifier::TriangleComplement => "triangle_complement",
        }
    }

    pub fn build(self) -> GnnClassifier {
        let (expr, policy, mode) = match self {
            FixtureClassifier::Diamond2Top => {
                let v = Feature::val();
                ((&v.local_max() - &v.local_min()).abs(), Policy::PosNonpos, Mode::Exact)
            }
            FixtureClassifier::QEven => (Feature::constant(1).local_sum().triwave(), Policy::OneZero, Mode::Exact),
            FixtureClassifier::TriangleComplement => (triangle_complement(), Policy::PosNonpos, Mode::Float),
        };
        GnnClassifier::new(expr, policy, mode).expect("valid fixture").with_meta(self.name())
    }
}

impl fmt::Display for FixtureClassifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureClassifier {
    type Err = CompileError;
    fn from_str(s: &str) -> Result<Self, CompileError> {
        FixtureClassifier::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| CompileError::UnknownFixture(s.into()))
    }
}

pub fn fixture_classifier(name: &str) -> Result<GnnClassifier, CompileError> {
    Ok(name.parse::<FixtureClassifier>()?.build())
}

/// The GML part: two neighbors, one `p1` with only unlabeled neighbors, one
/// unlabeled with a labeled and an unlabeled neighbor.
fn triangle_shape() -> GmlFormula {
    let p = GmlFormula::prop(1);
    let two = || GmlFormula::diamond_eq(2, GmlFormula::Top);
    let plain = p
        .clone()
        .not()
        .and(two())
        .and(GmlFormula::diamond(p.clone()))
        .and(GmlFormula::diamond(p.clone().not()));
    let marked = p.clone().and(two()).and(GmlFormula::box_(p.not()));
    two().and(GmlFormula::diamond(plain)).and(GmlFormula::diamond(marked))
}

/// `x + |y - z|`: `x` is 0 iff the GML part holds, `y` sums encoded keys of
/// labeled neighbors, `z` sums them over walks of length 2.
fn triangle_complement() -> Feature {
    let x = compile_gml_localsum(&triangle_shape().not()).expr;
    let (n, d) = DEFAULT_SIGMOID_SCALE;
    let s = Feature::val().scale(Rational::new(n, d), 0).sigmoid();
    let marked = (&s + &Feature::prop(1)).plus_const(-1).relu();
    let y = marked.local_sum();
    let z = y.local_sum();
    &x + &(&y - &z).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::classify;
    use crate::graph::{builtin_graph, random_keying, Fixture, PointedKeyedGraph};
    use crate::logic::modelcheck_gml;

    #[test]
    fn names_round_trip() {
        for c in FixtureClassifier::ALL {
            assert_eq!(c.name().parse::<FixtureClassifier>().unwrap(), c);
        }
        assert!(fixture_classifier("nope").is_err());
    }

    #[test]
    fn q_even_stars() {
        let c = fixture_classifier("q_even").unwrap();
        for k in 0..=6 {
            let g = builtin_graph(Fixture::Star(k)).unwrap();
            assert_eq!(classify(&c, &g).unwrap().accept, k % 2 == 0, "star({k})");
        }
    }

    #[test]
    fn triangle_shape_holds_on_triangle() {
        let g = builtin_graph(Fixture::TriangleP).unwrap();
        assert!(modelcheck_gml(&g.pointed, &triangle_shape()).unwrap());
        let c = fixture_classifier("triangle_complement").unwrap();
        for s in 0..5 {
            let k = random_keying(g.graph(), s);
            let gk = PointedKeyedGraph::new(g.pointed.clone(), Some(k)).unwrap();
            assert!(!classify(&c, &gk).unwrap().accept);
        }
    }
}

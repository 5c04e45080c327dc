use std::collections::HashMap;

use super::{not01, one, zero, CompileError};
use crate::feature::{Feature, GnnClassifier, Policy};
use crate::logic::{
    normalize_lddl, program_sequences, wgml_membership, Atom, GmlFormula, LddlFormula, LddlProgram,
    WgmlMembership,
};
use crate::rational::Rational;
use crate::scalar::Mode;

/// Keys are divided by this before the sigmoid so that keys in `[-1000, 1000]`
/// land where the sigmoid is still steep.
pub const DEFAULT_SIGMOID_SCALE: (i64, i64) = (1, 1000);

fn classifier(expr: Feature, policy: Policy, mode: Mode, meta: String) -> GnnClassifier {
    GnnClassifier::new(expr, policy, mode).expect("compiler output is valid for its mode").with_meta(meta)
}

/// Sum-aggregation clauses with `clip01` truncation; every sub-feature is 0/1.
struct SumCompiler<'a> {
    memo: HashMap<&'a GmlFormula, Feature>,
}

impl<'a> SumCompiler<'a> {
    fn go(&mut self, f: &'a GmlFormula) -> Feature {
        if let Some(x) = self.memo.get(f) {
            return x.clone();
        }
        let x = match f {
            GmlFormula::Top => one(),
            GmlFormula::Prop(i) => Feature::prop(*i),
            GmlFormula::Not(a) => not01(&self.go(a)),
            GmlFormula::And(a, b) => (&self.go(a) + &self.go(b)).plus_const(-1).clip01(),
            GmlFormula::Or(a, b) => (&self.go(a) + &self.go(b)).clip01(),
            GmlFormula::DiamondGeq(k, a) => self.go(a).local_sum().plus_const(1 - *k as i64).clip01(),
        };
        self.memo.insert(f, x.clone());
        x
    }
}

/// Max-aggregation clauses for the grade-1 fragment; every sub-feature is 0/1.
struct MaxCompiler<'a> {
    memo: HashMap<&'a GmlFormula, Feature>,
}

impl<'a> MaxCompiler<'a> {
    fn go(&mut self, f: &'a GmlFormula) -> Feature {
        if let Some(x) = self.memo.get(f) {
            return x.clone();
        }
        let x = match f {
            GmlFormula::Top => one(),
            GmlFormula::Prop(i) => Feature::prop(*i),
            GmlFormula::Not(a) => not01(&self.go(a)),
            GmlFormula::And(a, b) => (&self.go(a) + &self.go(b)).plus_const(-1).clip01(),
            GmlFormula::Or(a, b) => (&self.go(a) + &self.go(b)).clip01(),
            GmlFormula::DiamondGeq(1, a) => self.go(a).local_max(),
            GmlFormula::DiamondGeq(..) => unreachable!("checked by caller"),
        };
        self.memo.insert(f, x.clone());
        x
    }
}

pub fn compile_gml_localsum(phi: &GmlFormula) -> GnnClassifier {
    let expr = SumCompiler { memo: HashMap::new() }.go(phi);
    classifier(expr, Policy::OneZero, Mode::Exact, format!("gml_localsum_relu: {phi}"))
}

pub fn compile_ml_localmax(phi: &GmlFormula) -> Result<GnnClassifier, CompileError> {
    if !phi.is_ml() {
        return Err(CompileError::NotModal(phi.to_string()));
    }
    let expr = MaxCompiler { memo: HashMap::new() }.go(phi);
    Ok(classifier(expr, Policy::OneZero, Mode::Exact, format!("ml_localmax_relu: {phi}")))
}

/// Positive/nonpositive clauses over max aggregation. Grade-1 subformulas go
/// through the 0/1 compiler; `◇≥2` uses key windows.
struct WeakCompiler<'a> {
    ml: MaxCompiler<'a>,
    /// Bounded injective key encoding; `None` selects the exact `◇≥2⊤` form.
    sig_key: Option<Feature>,
}

impl<'a> WeakCompiler<'a> {
    fn go(&mut self, f: &'a GmlFormula) -> Feature {
        if f.is_ml() {
            return self.ml.go(f);
        }
        match f {
            GmlFormula::And(a, b) => Feature::min(&self.go(a), &self.go(b)),
            GmlFormula::Or(a, b) => &self.go(a).relu() + &self.go(b).relu(),
            GmlFormula::DiamondGeq(1, a) => self.go(a).local_max(),
            GmlFormula::DiamondGeq(2, a) => match &self.sig_key {
                None => {
                    debug_assert_eq!(**a, GmlFormula::Top);
                    let v = Feature::val();
                    &v.local_max() + &v.scale(-1, 0).local_max()
                }
                Some(s) => {
                    let chi = self.ml.go(a);
                    let hi = (s + &chi).plus_const(-1).relu().local_max();
                    let lo = (&chi - s).relu().plus_const(-1).local_max();
                    &hi + &lo
                }
            },
            _ => unreachable!("checked by membership"),
        }
    }
}

pub fn compile_wgml_top(phi: &GmlFormula) -> Result<GnnClassifier, CompileError> {
    match wgml_membership(phi) {
        WgmlMembership::InWgmlTop => {}
        WgmlMembership::InWgmlModal => return Err(CompileError::NotWgml(phi.to_string())),
        WgmlMembership::NotWgml { witness } => return Err(CompileError::NotWgml(witness)),
    }
    let expr = WeakCompiler { ml: MaxCompiler { memo: HashMap::new() }, sig_key: None }.go(phi);
    Ok(classifier(expr, Policy::PosNonpos, Mode::Exact, format!("wgml_top_localmax_relu: {phi}")))
}

/// Float-mode compiler for both weakly graded fragments with keys encoded as
/// `sigmoid(val / 1000)`.
pub fn compile_wgml_modal(phi: &GmlFormula) -> Result<GnnClassifier, CompileError> {
    let (n, d) = DEFAULT_SIGMOID_SCALE;
    compile_wgml_modal_scaled(phi, Rational::new(n, d))
}

/// Like [`compile_wgml_modal`] with keys encoded as `sigmoid(scale·val)`.
pub fn compile_wgml_modal_scaled(phi: &GmlFormula, scale: Rational) -> Result<GnnClassifier, CompileError> {
    if let WgmlMembership::NotWgml { witness } = wgml_membership(phi) {
        return Err(CompileError::NotWgml(witness));
    }
    let key = Feature::val().scale(scale.clone(), 0).sigmoid();
    let expr = WeakCompiler { ml: MaxCompiler { memo: HashMap::new() }, sig_key: Some(key) }.go(phi);
    Ok(classifier(expr, Policy::PosNonpos, Mode::Float, format!("wgml_modal_localmax_sigmoid[scale={scale}]: {phi}")))
}

/// Domain indicator and the min/max key reached, for one program.
struct ProgFeatures {
    dom: Feature,
    min: Feature,
    max: Feature,
}

struct LddlCompiler {
    memo: HashMap<LddlFormula, Feature>,
}

impl LddlCompiler {
    fn formula(&mut self, f: &LddlFormula) -> Feature {
        if let Some(x) = self.memo.get(f) {
            return x.clone();
        }
        let x = match f {
            LddlFormula::Top => one(),
            LddlFormula::Prop(i) => Feature::prop(*i),
            LddlFormula::Not(a) => not01(&self.formula(a)),
            LddlFormula::And(a, b) => (&self.formula(a) + &self.formula(b)).plus_const(-1).relu(),
            LddlFormula::Or(a, b) => Feature::max(&self.formula(a), &self.formula(b)),
            LddlFormula::Diamond(p, a) => {
                debug_assert_eq!(**a, LddlFormula::Top);
                self.program(p).dom
            }
            LddlFormula::Unique(p, a) => {
                debug_assert_eq!(**a, LddlFormula::Top);
                let pf = self.program(p);
                let single = Feature::if_zero(&(&pf.max - &pf.min), &one(), &zero());
                Feature::if_zero(&pf.dom, &zero(), &single)
            }
            LddlFormula::Box(..) => unreachable!("removed by normalization"),
        };
        self.memo.insert(f.clone(), x.clone());
        x
    }

    fn program(&mut self, p: &LddlProgram) -> ProgFeatures {
        let seqs = program_sequences(p).expect("normalized program");
        let mut parts = seqs.iter().map(|s| self.sequence(s));
        let first = parts.next().expect("nonempty union");
        parts.fold(first, |a, b| {
            let min = Feature::if_zero(
                &a.dom,
                &b.min,
                &Feature::if_zero(&b.dom, &a.min, &Feature::min(&a.min, &b.min)),
            );
            let max = Feature::if_zero(
                &a.dom,
                &b.max,
                &Feature::if_zero(&b.dom, &a.max, &Feature::max(&a.max, &b.max)),
            );
            ProgFeatures { dom: Feature::max(&a.dom, &b.dom), min, max }
        })
    }

    fn sequence(&mut self, atoms: &[Atom]) -> ProgFeatures {
        let mut acc = ProgFeatures { dom: one(), min: Feature::val(), max: Feature::val() };
        for a in atoms.iter().rev() {
            acc = match a {
                Atom::Test(phi) => {
                    let t = self.formula(phi);
                    ProgFeatures {
                        dom: Feature::if_zero(&t, &zero(), &acc.dom),
                        min: Feature::if_zero(&t, &zero(), &acc.min),
                        max: Feature::if_zero(&t, &zero(), &acc.max),
                    }
                }
                Atom::Step => {
                    // Neighbors outside the domain get a value that cannot win.
                    let hi = acc.min.local_max().local_max();
                    let lo = acc.max.local_min().local_min();
                    ProgFeatures {
                        dom: acc.dom.local_max(),
                        min: Feature::if_zero(&acc.dom, &hi, &acc.min).local_min(),
                        max: Feature::if_zero(&acc.dom, &lo, &acc.max).local_max(),
                    }
                }
            };
        }
        acc
    }
}

/// Compiles after normalization. Uniqueness is decided by comparing the
/// least and greatest key reached, so inputs must carry injective keys.
pub fn compile_lddl_semilinear(phi: &LddlFormula) -> GnnClassifier {
    let norm = normalize_lddl(phi);
    let expr = LddlCompiler { memo: HashMap::new() }.formula(&norm);
    classifier(expr, Policy::PosNonpos, Mode::Exact, format!("lddl_localmax_semilinear: {phi}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::classify;
    use crate::graph::{builtin_graph, random_keying, Fixture, PointedGraph, PointedKeyedGraph};
    use crate::logic::{modelcheck_gml, parse_gml, parse_lddl, parse_ml};
    use crate::scalar::Scalar;

    fn keyed(f: Fixture, seed: u64) -> PointedKeyedGraph {
        let pg = builtin_graph(f).unwrap().pointed;
        let k = random_keying(&pg.graph, seed);
        PointedKeyedGraph::new(pg, Some(k)).unwrap()
    }

    fn accepts(c: &GnnClassifier, g: &PointedKeyedGraph) -> bool {
        classify(c, g).unwrap().accept
    }

    #[test]
    fn gml_examples() {
        let c = compile_gml_localsum(&parse_gml("<>{>=2}top").unwrap());
        assert!(accepts(&c, &keyed(Fixture::Star(3), 0)));
        assert!(!accepts(&c, &keyed(Fixture::Star(1), 0)));
        let top = compile_gml_localsum(&GmlFormula::Top);
        assert_eq!(top.expr.to_string(), "(const 1)");
        let phi = parse_gml("<>{>=2}(p1 & <>{>=3}~p1)").unwrap();
        assert_eq!(compile_gml_localsum(&phi).expr.aggregation_depth(), phi.modal_depth());
    }

    #[test]
    fn ml_examples() {
        assert!(compile_ml_localmax(&parse_gml("<>{>=2}top").unwrap()).is_err());
        let c = compile_ml_localmax(&parse_ml("~top").unwrap()).unwrap();
        assert!(!accepts(&c, &keyed(Fixture::Star(2), 1)));
        let boxp = compile_ml_localmax(&parse_ml("[]p1").unwrap()).unwrap();
        let mut pg: PointedGraph = builtin_graph(Fixture::Star(2)).unwrap().pointed.clone();
        pg.graph = pg.graph.with_prop_count(1);
        pg.graph.set_label(1, 1, true).unwrap();
        let one_leaf = PointedKeyedGraph::new(pg.clone(), None).unwrap();
        assert!(!accepts(&boxp, &one_leaf));
        pg.graph.set_label(2, 1, true).unwrap();
        let both = PointedKeyedGraph::new(pg.clone(), None).unwrap();
        assert!(accepts(&boxp, &both));
        assert!(modelcheck_gml(&pg, &parse_ml("[]p1").unwrap()).unwrap());
    }

    #[test]
    fn wgml_examples() {
        let c = compile_wgml_top(&parse_gml("<>{>=2}top").unwrap()).unwrap();
        for s in 0..5 {
            let g = keyed(Fixture::Star(1), s);
            let d = classify(&c, &g).unwrap();
            assert!(!d.accept);
            assert_eq!(d.output, Scalar::Exact(Rational::zero()));
        }
        assert!(compile_wgml_top(&parse_gml("~<>{>=2}top").unwrap()).is_err());
        assert!(compile_wgml_top(&parse_gml("<>{>=2}p1").unwrap()).is_err());
        assert!(compile_wgml_modal(&parse_gml("<>{>=3}p1").unwrap()).is_err());
    }

    #[test]
    fn wgml_modal_unscaled_matches_hand_value() {
        let phi = parse_gml("<>{>=2}p1").unwrap();
        let c = compile_wgml_modal_scaled(&phi, Rational::one()).unwrap();
        let mut pg = builtin_graph(Fixture::Star(2)).unwrap().pointed;
        pg.graph = pg.graph.with_prop_count(1);
        pg.graph.set_label(1, 1, true).unwrap();
        pg.graph.set_label(2, 1, true).unwrap();
        let keys = crate::graph::Keying::new(vec![Rational::from(0), Rational::from(1), Rational::from(2)]);
        let g = PointedKeyedGraph::new(pg.clone(), Some(keys.clone())).unwrap();
        let d = classify(&c, &g).unwrap();
        let s = |x: f64| 1.0 / (1.0 + (-x).exp());
        assert!(d.accept);
        assert!((d.output.to_f64() - (s(2.0) - s(1.0))).abs() < 1e-12);

        pg.graph.set_label(2, 1, false).unwrap();
        let g = PointedKeyedGraph::new(pg, Some(keys)).unwrap();
        assert!(!classify(&c, &g).unwrap().accept);

        let mut single = keyed(Fixture::SingleNode, 0);
        single.pointed.graph = single.pointed.graph.with_prop_count(1);
        let d = classify(&c, &single).unwrap();
        assert!(!d.accept);
        assert_eq!(d.output.to_f64(), 0.0);
    }

    #[test]
    fn lddl_examples() {
        let u = compile_lddl_semilinear(&parse_lddl("<>{=1}top").unwrap());
        for s in 0..10 {
            assert!(accepts(&u, &keyed(Fixture::Star(1), s)));
            assert!(!accepts(&u, &keyed(Fixture::Star(2), s)));
        }
        let stay = compile_lddl_semilinear(&parse_lddl("<stay>top").unwrap());
        assert!(accepts(&stay, &keyed(Fixture::SingleNode, 0)));

        let phi = parse_lddl("<step;step>=1 p1").unwrap();
        let c = compile_lddl_semilinear(&phi);
        let mut pg = builtin_graph(Fixture::Path(3)).unwrap().pointed;
        pg.graph = pg.graph.with_prop_count(1);
        pg.graph.set_label(2, 1, true).unwrap();
        assert!(crate::logic::modelcheck_lddl(&pg, &phi).unwrap());
        for s in 0..10 {
            let k = random_keying(&pg.graph, s);
            assert!(accepts(&c, &PointedKeyedGraph::new(pg.clone(), Some(k)).unwrap()));
        }
    }
}

//! Feature expressions: the term-level form of a GNN node classifier.
//!
//! Expressions are shared DAGs: cloning a [`Feature`] is cheap and reusing a
//! sub-feature in several places evaluates it once.

mod classifier;
mod eval;
mod kir;
mod layer;
mod sample;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::rational::Rational;
use crate::scalar::{build_macro, Macro, Primitive, ScalarFn};

pub use classifier::{
    check_policy_conformance, check_policy_conformance_on, classify, ClassifierError, ConformanceReport, Decision,
    GnnClassifier, Policy, PolicyViolation, FLOAT_THRESHOLD,
};
pub use eval::{eval_feature, EvalError, Evaluation, Plan};
pub use kir::{parse_feature, parse_model, write_feature, write_model, KirError};
pub use layer::{layerize, Aggregator, LayerError, Layered, Stage, StateInput};
pub use sample::random_feature;

/// One node of a feature expression.
#[derive(Debug)]
pub enum FeatureExpr {
    /// Label bit of proposition `i` (1-based).
    Prop(usize),
    /// The node's key or value.
    Val,
    Apply(Primitive, Vec<Feature>),
    LocalMax(Feature),
    LocalSum(Feature),
    GlobalSum(Feature),
}

/// A shared handle on a feature expression.
#[derive(Clone, Debug)]
pub struct Feature(Arc<FeatureExpr>);

impl std::ops::Deref for Feature {
    type Target = FeatureExpr;
    fn deref(&self) -> &FeatureExpr {
        &self.0
    }
}

impl Feature {
    pub fn new(e: FeatureExpr) -> Self {
        Feature(Arc::new(e))
    }

    pub fn prop(i: usize) -> Self {
        Feature::new(FeatureExpr::Prop(i))
    }

    pub fn val() -> Self {
        Feature::new(FeatureExpr::Val)
    }

    pub fn constant(q: impl Into<Rational>) -> Self {
        Feature::new(FeatureExpr::Apply(Primitive::Const(q.into()), vec![]))
    }

    pub fn apply(p: Primitive, args: Vec<Feature>) -> Self {
        assert_eq!(p.arity(), args.len(), "arity of {}", p.name());
        Feature::new(FeatureExpr::Apply(p, args))
    }

    pub fn affine(coefs: Vec<Rational>, bias: impl Into<Rational>, args: Vec<Feature>) -> Self {
        Feature::apply(Primitive::Affine { coefs, bias: bias.into() }, args)
    }

    /// Applies a scalar function tree, inlining it over the argument features.
    pub fn apply_fn(f: &ScalarFn, args: &[Feature]) -> Self {
        match f {
            ScalarFn::Arg(i) => args[*i].clone(),
            ScalarFn::Op(p, xs) => Feature::apply(p.clone(), xs.iter().map(|x| Feature::apply_fn(x, args)).collect()),
        }
    }

    fn macro_of(m: Macro, args: &[Feature]) -> Self {
        let inputs = (0..args.len()).map(ScalarFn::arg).collect();
        Feature::apply_fn(&build_macro(m, inputs).expect("macro arity"), args)
    }

    /// `c·self + b`.
    pub fn scale(&self, c: impl Into<Rational>, b: impl Into<Rational>) -> Self {
        Feature::affine(vec![c.into()], b, vec![self.clone()])
    }

    pub fn plus_const(&self, b: impl Into<Rational>) -> Self {
        self.scale(1, b)
    }

    /// Sum of features plus a constant.
    pub fn sum(fs: &[Feature], bias: impl Into<Rational>) -> Self {
        if fs.is_empty() {
            return Feature::constant(bias);
        }
        Feature::affine(vec![Rational::one(); fs.len()], bias, fs.to_vec())
    }

    pub fn relu(&self) -> Self {
        Feature::apply(Primitive::Relu, vec![self.clone()])
    }

    pub fn heaviside(&self) -> Self {
        Feature::apply(Primitive::Heaviside, vec![self.clone()])
    }

    pub fn square(&self) -> Self {
        Feature::apply(Primitive::Square, vec![self.clone()])
    }

    pub fn triwave(&self) -> Self {
        Feature::apply(Primitive::TriWave, vec![self.clone()])
    }

    pub fn sigmoid(&self) -> Self {
        Feature::apply(Primitive::Sigmoid, vec![self.clone()])
    }

    pub fn if_pos(c: &Feature, a: &Feature, b: &Feature) -> Self {
        Feature::apply(Primitive::IfPos, vec![c.clone(), a.clone(), b.clone()])
    }

    /// `a` if `x = 0`, else `b`.
    pub fn if_zero(x: &Feature, a: &Feature, b: &Feature) -> Self {
        Feature::macro_of(Macro::IfZero, &[x.clone(), a.clone(), b.clone()])
    }

    pub fn min(a: &Feature, b: &Feature) -> Self {
        Feature::macro_of(Macro::Min, &[a.clone(), b.clone()])
    }

    pub fn max(a: &Feature, b: &Feature) -> Self {
        Feature::macro_of(Macro::Max, &[a.clone(), b.clone()])
    }

    pub fn abs(&self) -> Self {
        Feature::macro_of(Macro::Abs, std::slice::from_ref(self))
    }

    pub fn clip01(&self) -> Self {
        Feature::macro_of(Macro::Clip01, std::slice::from_ref(self))
    }

    pub fn local_max(&self) -> Self {
        Feature::new(FeatureExpr::LocalMax(self.clone()))
    }

    /// `-LocalMax(-self)`; 0 at nodes without neighbors.
    pub fn local_min(&self) -> Self {
        self.scale(-1, 0).local_max().scale(-1, 0)
    }

    pub fn local_sum(&self) -> Self {
        Feature::new(FeatureExpr::LocalSum(self.clone()))
    }

    pub fn global_sum(&self) -> Self {
        Feature::new(FeatureExpr::GlobalSum(self.clone()))
    }

    pub fn ptr_eq(a: &Feature, b: &Feature) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }

    pub(crate) fn key(&self) -> *const FeatureExpr {
        Arc::as_ptr(&self.0)
    }

    pub fn children(&self) -> &[Feature] {
        match &**self {
            FeatureExpr::Prop(_) | FeatureExpr::Val => &[],
            FeatureExpr::Apply(_, xs) => xs,
            FeatureExpr::LocalMax(x) | FeatureExpr::LocalSum(x) | FeatureExpr::GlobalSum(x) => std::slice::from_ref(x),
        }
    }

    /// Distinct DAG nodes in post-order (children before parents).
    pub fn post_order(&self) -> Vec<Feature> {
        let mut seen: HashMap<*const FeatureExpr, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut stack: Vec<(Feature, bool)> = vec![(self.clone(), false)];
        while let Some((f, expanded)) = stack.pop() {
            if expanded {
                out.push(f);
                continue;
            }
            if seen.insert(f.key(), ()).is_some() {
                continue;
            }
            stack.push((f.clone(), true));
            for c in f.children().iter().rev() {
                if !seen.contains_key(&c.key()) {
                    stack.push((c.clone(), false));
                }
            }
        }
        out
    }

    /// Number of distinct DAG nodes.
    pub fn dag_size(&self) -> usize {
        self.post_order().len()
    }

    /// Calls `f` once per distinct primitive occurrence.
    pub fn visit_primitives(&self, mut f: impl FnMut(&Primitive)) {
        for n in self.post_order() {
            if let FeatureExpr::Apply(p, _) = &*n {
                f(p);
            }
        }
    }

    pub fn is_exact_capable(&self) -> bool {
        let mut ok = true;
        self.visit_primitives(|p| ok &= p.is_exact_capable());
        ok
    }

    pub fn uses_val(&self) -> bool {
        self.post_order().iter().any(|n| matches!(**n, FeatureExpr::Val))
    }

    pub fn max_prop(&self) -> usize {
        self.post_order()
            .iter()
            .filter_map(|n| match **n {
                FeatureExpr::Prop(i) => Some(i),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn aggregation_depth(&self) -> usize {
        let mut depth: HashMap<*const FeatureExpr, usize> = HashMap::new();
        for n in self.post_order() {
            let below = n.children().iter().map(|c| depth[&c.key()]).max().unwrap_or(0);
            let d = match &*n {
                FeatureExpr::LocalMax(_) | FeatureExpr::LocalSum(_) | FeatureExpr::GlobalSum(_) => below + 1,
                _ => below,
            };
            depth.insert(n.key(), d);
        }
        depth[&self.key()]
    }
}

/// Maximal nesting of aggregations.
pub fn aggregation_depth(e: &Feature) -> usize {
    e.aggregation_depth()
}

impl Add for &Feature {
    type Output = Feature;
    fn add(self, o: &Feature) -> Feature {
        Feature::sum(&[self.clone(), o.clone()], 0)
    }
}

impl Add for Feature {
    type Output = Feature;
    fn add(self, o: Feature) -> Feature {
        &self + &o
    }
}

impl Sub for &Feature {
    type Output = Feature;
    fn sub(self, o: &Feature) -> Feature {
        Feature::affine(vec![Rational::one(), -Rational::one()], 0, vec![self.clone(), o.clone()])
    }
}

impl Sub for Feature {
    type Output = Feature;
    fn sub(self, o: Feature) -> Feature {
        &self - &o
    }
}

impl Neg for &Feature {
    type Output = Feature;
    fn neg(self) -> Feature {
        self.scale(-1, 0)
    }
}

impl Neg for Feature {
    type Output = Feature;
    fn neg(self) -> Feature {
        -&self
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_feature(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_examples() {
        assert_eq!(Feature::prop(1).aggregation_depth(), 0);
        assert_eq!(Feature::val().local_sum().local_max().aggregation_depth(), 2);
        let e = &Feature::val().local_max() + &Feature::val().local_sum().local_sum();
        assert_eq!(aggregation_depth(&e), 2);
    }

    #[test]
    fn sharing_is_preserved() {
        let x = Feature::val().local_max();
        let y = Feature::min(&x, &x.square());
        // val, localmax, square, and the min expansion
        assert!(y.dag_size() < 10);
        assert!(Feature::ptr_eq(&x, &x.clone()));
        assert!(!y.is_exact_capable() || y.uses_val());
        assert!(!x.sigmoid().is_exact_capable());
    }
}

use std::collections::HashMap;

use thiserror::Error;

use super::{Feature, FeatureExpr};
use crate::graph::{Graph, Keying, PointedKeyedGraph};
use crate::rational::Rational;
use crate::scalar::{Mode, Num, Primitive, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expression uses val but the graph carries no keying")]
    MissingKeying,
    #[error("prop {index} out of range for {props} props")]
    PropOutOfRange { index: usize, props: usize },
    #[error("sigmoid cannot be evaluated in exact mode")]
    SigmoidInExact,
}

/// Value at the point plus the full per-node vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub point: Scalar,
    pub values: Vec<Scalar>,
}

#[derive(Debug, Clone)]
enum Op {
    Prop(usize),
    Val,
    Apply(Primitive, Vec<usize>),
    LocalMax(usize),
    LocalSum(usize),
    GlobalSum(usize),
}

/// A feature DAG flattened into topological order, ready to run on many graphs.
#[derive(Debug, Clone)]
pub struct Plan {
    ops: Vec<Op>,
    mode: Mode,
    uses_val: bool,
    max_prop: usize,
}

impl Plan {
    pub fn new(e: &Feature, mode: Mode) -> Result<Self, EvalError> {
        let order = e.post_order();
        let mut index: HashMap<*const FeatureExpr, usize> = HashMap::with_capacity(order.len());
        let mut ops = Vec::with_capacity(order.len());
        let (mut uses_val, mut max_prop) = (false, 0);
        for n in &order {
            let op = match &**n {
                FeatureExpr::Prop(i) => {
                    max_prop = max_prop.max(*i);
                    Op::Prop(*i)
                }
                FeatureExpr::Val => {
                    uses_val = true;
                    Op::Val
                }
                FeatureExpr::Apply(p, xs) => {
                    if mode == Mode::Exact && !p.is_exact_capable() {
                        return Err(EvalError::SigmoidInExact);
                    }
                    Op::Apply(p.clone(), xs.iter().map(|x| index[&x.key()]).collect())
                }
                FeatureExpr::LocalMax(x) => Op::LocalMax(index[&x.key()]),
                FeatureExpr::LocalSum(x) => Op::LocalSum(index[&x.key()]),
                FeatureExpr::GlobalSum(x) => Op::GlobalSum(index[&x.key()]),
            };
            index.insert(n.key(), ops.len());
            ops.push(op);
        }
        Ok(Plan { ops, mode, uses_val, max_prop })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn check(&self, g: &Graph, keying: Option<&Keying>) -> Result<(), EvalError> {
        if self.max_prop > g.prop_count() || self.ops.iter().any(|o| matches!(o, Op::Prop(0))) {
            return Err(EvalError::PropOutOfRange { index: self.max_prop, props: g.prop_count() });
        }
        if self.uses_val && keying.is_none() {
            return Err(EvalError::MissingKeying);
        }
        Ok(())
    }

    fn run<T: Num>(&self, g: &Graph, keying: Option<&Keying>) -> Vec<T> {
        let n = g.node_count();
        let mut vals: Vec<Vec<T>> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v: Vec<T> = match op {
                Op::Prop(i) => (0..n).map(|v| if g.label(v, *i) { T::one() } else { T::zero() }).collect(),
                Op::Val => keying.expect("checked").values.iter().map(T::from_rational).collect(),
                Op::Apply(p, xs) => (0..n)
                    .map(|v| {
                        let args: Vec<&T> = xs.iter().map(|&x| &vals[x][v]).collect();
                        p.apply(&args)
                    })
                    .collect(),
                Op::LocalMax(x) => (0..n)
                    .map(|v| {
                        let mut it = g.neighbors(v).iter();
                        match it.next() {
                            None => T::zero(),
                            Some(&w) => it.fold(vals[*x][w].clone(), |m, &u| T::max(&m, &vals[*x][u])),
                        }
                    })
                    .collect(),
                Op::LocalSum(x) => {
                    (0..n).map(|v| g.neighbors(v).iter().fold(T::zero(), |s, &u| s.add(&vals[*x][u]))).collect()
                }
                Op::GlobalSum(x) => {
                    let s = vals[*x].iter().fold(T::zero(), |s, y| s.add(y));
                    vec![s; n]
                }
            };
            vals.push(v);
        }
        vals.pop().unwrap_or_default()
    }

    /// Per-node values in the plan's mode.
    pub fn eval(&self, g: &Graph, keying: Option<&Keying>) -> Result<Vec<Scalar>, EvalError> {
        self.check(g, keying)?;
        Ok(match self.mode {
            Mode::Exact => self.run::<Rational>(g, keying).into_iter().map(Scalar::Exact).collect(),
            Mode::Float => self.run::<f64>(g, keying).into_iter().map(Scalar::Float).collect(),
        })
    }

    pub fn eval_exact(&self, g: &Graph, keying: Option<&Keying>) -> Result<Vec<Rational>, EvalError> {
        if self.mode != Mode::Exact {
            return Err(EvalError::SigmoidInExact);
        }
        self.check(g, keying)?;
        Ok(self.run(g, keying))
    }

    pub fn eval_float(&self, g: &Graph, keying: Option<&Keying>) -> Result<Vec<f64>, EvalError> {
        self.check(g, keying)?;
        Ok(self.run(g, keying))
    }
}

/// Evaluates `e` on `g`, returning the point value and all node values.
pub fn eval_feature(e: &Feature, g: &PointedKeyedGraph, mode: Mode) -> Result<Evaluation, EvalError> {
    let plan = Plan::new(e, mode)?;
    let values = plan.eval(g.graph(), g.keying.as_ref())?;
    Ok(Evaluation { point: values[g.point()].clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, Fixture, PointedGraph};

    fn keyed(pg: PointedGraph, keys: &[i64]) -> PointedKeyedGraph {
        let k = Keying::new(keys.iter().map(|&x| Rational::from_int(x)).collect());
        PointedKeyedGraph::new(pg, Some(k)).unwrap()
    }

    #[test]
    fn local_max_of_labeled_neighbor() {
        let mut g = Graph::new(2, 1);
        g.add_edge(0, 1).unwrap();
        g.set_label(1, 1, true).unwrap();
        let pg = PointedKeyedGraph::new(PointedGraph::new(g, 0).unwrap(), None).unwrap();
        let r = eval_feature(&Feature::prop(1).local_max(), &pg, Mode::Exact).unwrap();
        assert_eq!(r.point, Scalar::Exact(Rational::one()));
    }

    #[test]
    fn empty_max_is_zero() {
        let pg = keyed(PointedGraph::new(Graph::new(1, 0), 0).unwrap(), &[5]);
        let r = eval_feature(&Feature::val().local_max(), &pg, Mode::Exact).unwrap();
        assert_eq!(r.point, Scalar::Exact(Rational::zero()));
    }

    #[test]
    fn spread_of_star_keys() {
        let star = builtin_graph(Fixture::Star(2)).unwrap().pointed;
        let pg = keyed(star, &[0, 1, 3]);
        let v = Feature::val();
        let e = (&v.local_max() - &v.local_min()).abs();
        let r = eval_feature(&e, &pg, Mode::Exact).unwrap();
        assert_eq!(r.point, Scalar::Exact(Rational::from_int(2)));
    }

    #[test]
    fn errors() {
        let pg = builtin_graph(Fixture::SingleNode).unwrap();
        assert_eq!(eval_feature(&Feature::val(), &pg, Mode::Exact), Err(EvalError::MissingKeying));
        assert!(matches!(eval_feature(&Feature::prop(1), &pg, Mode::Exact), Err(EvalError::PropOutOfRange { .. })));
        assert_eq!(
            eval_feature(&Feature::constant(1).sigmoid(), &pg, Mode::Exact),
            Err(EvalError::SigmoidInExact)
        );
        let r = eval_feature(&Feature::constant(0).sigmoid(), &pg, Mode::Float).unwrap();
        assert_eq!(r.point, Scalar::Float(0.5));
    }

    #[test]
    fn global_sum_counts_nodes() {
        let pg = builtin_graph(Fixture::Cycle(5)).unwrap();
        let r = eval_feature(&Feature::constant(1).global_sum(), &pg, Mode::Exact).unwrap();
        assert_eq!(r.point, Scalar::Exact(Rational::from_int(5)));
    }
}

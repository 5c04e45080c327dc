use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::eval::EvalError;
use super::{Feature, FeatureExpr};
use crate::graph::{Graph, Keying};
use crate::rational::Rational;
use crate::scalar::{Mode, Num, Scalar, ScalarFn};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Aggregator {
    LocalMax,
    LocalSum,
    GlobalSum,
}

/// Atomic inputs forming the initial state.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StateInput {
    Prop(usize),
    Val,
}

/// One layer: each message is a combination of the previous state, then
/// aggregated. The new state is the old state followed by the aggregates.
#[derive(Clone, Debug)]
pub struct Stage {
    pub messages: Vec<(Aggregator, ScalarFn)>,
}

/// Staged form of a feature expression.
#[derive(Clone, Debug)]
pub struct Layered {
    pub inputs: Vec<StateInput>,
    pub stages: Vec<Stage>,
    /// Combination over the final state.
    pub readout: ScalarFn,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerError {
    #[error("expression mixes max and sum aggregation")]
    MixedAggregation,
}

fn is_agg(e: &FeatureExpr) -> Option<(Aggregator, &Feature)> {
    match e {
        FeatureExpr::LocalMax(x) => Some((Aggregator::LocalMax, x)),
        FeatureExpr::LocalSum(x) => Some((Aggregator::LocalSum, x)),
        FeatureExpr::GlobalSum(x) => Some((Aggregator::GlobalSum, x)),
        _ => None,
    }
}

/// Combination of `e` over the state slots in `slots`, sharing repeated
/// sub-terms.
fn to_scalar_fn(
    e: &Feature,
    slots: &HashMap<*const FeatureExpr, usize>,
    memo: &mut HashMap<*const FeatureExpr, Arc<ScalarFn>>,
) -> Arc<ScalarFn> {
    if let Some(&i) = slots.get(&e.key()) {
        return Arc::new(ScalarFn::Arg(i));
    }
    if let Some(f) = memo.get(&e.key()) {
        return f.clone();
    }
    let f = match &**e {
        FeatureExpr::Apply(p, xs) => {
            Arc::new(ScalarFn::Op(p.clone(), xs.iter().map(|x| to_scalar_fn(x, slots, memo)).collect()))
        }
        _ => unreachable!("atoms and aggregates are state slots"),
    };
    memo.insert(e.key(), f.clone());
    f
}

/// Converts `e` into stages, one per aggregation level.
pub fn layerize(e: &Feature) -> Result<Layered, LayerError> {
    let order = e.post_order();
    let mut level: HashMap<*const FeatureExpr, usize> = HashMap::new();
    let (mut has_max, mut has_sum) = (false, false);
    let mut inputs = Vec::new();
    let mut slots = HashMap::new();
    let mut by_level: Vec<Vec<Feature>> = Vec::new();
    for n in &order {
        let below = n.children().iter().map(|c| level[&c.key()]).max().unwrap_or(0);
        let l = match is_agg(n) {
            Some((a, _)) => {
                if a == Aggregator::LocalMax {
                    has_max = true;
                } else {
                    has_sum = true;
                }
                if by_level.len() <= below {
                    by_level.resize(below + 1, Vec::new());
                }
                by_level[below].push(n.clone());
                below + 1
            }
            None => below,
        };
        match &**n {
            FeatureExpr::Prop(i) => {
                slots.insert(n.key(), inputs.len());
                inputs.push(StateInput::Prop(*i));
            }
            FeatureExpr::Val => {
                slots.insert(n.key(), inputs.len());
                inputs.push(StateInput::Val);
            }
            _ => {}
        }
        level.insert(n.key(), l);
    }
    if has_max && has_sum {
        return Err(LayerError::MixedAggregation);
    }
    let mut stages = Vec::new();
    let mut width = inputs.len();
    for aggs in &by_level {
        let mut memo = HashMap::new();
        let messages = aggs
            .iter()
            .map(|a| {
                let (kind, x) = is_agg(a).expect("aggregate");
                (kind, (*to_scalar_fn(x, &slots, &mut memo)).clone())
            })
            .collect();
        for a in aggs {
            slots.insert(a.key(), width);
            width += 1;
        }
        stages.push(Stage { messages });
    }
    let readout = (*to_scalar_fn(e, &slots, &mut HashMap::new())).clone();
    Ok(Layered { inputs, stages, readout })
}

impl Layered {
    fn run<T: Num>(&self, g: &Graph, keying: Option<&Keying>) -> Vec<T> {
        let n = g.node_count();
        let mut state: Vec<Vec<T>> = (0..n)
            .map(|v| {
                self.inputs
                    .iter()
                    .map(|i| match i {
                        StateInput::Prop(p) => {
                            if g.label(v, *p) {
                                T::one()
                            } else {
                                T::zero()
                            }
                        }
                        StateInput::Val => T::from_rational(&keying.expect("checked").values[v]),
                    })
                    .collect()
            })
            .collect();
        for stage in &self.stages {
            let mut extra: Vec<Vec<T>> = vec![Vec::new(); n];
            for (agg, f) in &stage.messages {
                let msg: Vec<T> = state.iter().map(|x| f.eval_num(x)).collect();
                let total = msg.iter().fold(T::zero(), |s, y| s.add(y));
                for v in 0..n {
                    let nb = g.neighbors(v);
                    let a = match agg {
                        Aggregator::LocalMax => match nb.split_first() {
                            None => T::zero(),
                            Some((&w, rest)) => rest.iter().fold(msg[w].clone(), |m, &u| T::max(&m, &msg[u])),
                        },
                        Aggregator::LocalSum => nb.iter().fold(T::zero(), |s, &u| s.add(&msg[u])),
                        Aggregator::GlobalSum => total.clone(),
                    };
                    extra[v].push(a);
                }
            }
            for (s, x) in state.iter_mut().zip(extra) {
                s.extend(x);
            }
        }
        state.iter().map(|x| self.readout.eval_num(x)).collect()
    }

    /// Staged evaluation at every node.
    pub fn eval(&self, g: &Graph, keying: Option<&Keying>, mode: Mode) -> Result<Vec<Scalar>, EvalError> {
        for i in &self.inputs {
            match i {
                StateInput::Prop(p) if *p == 0 || *p > g.prop_count() => {
                    return Err(EvalError::PropOutOfRange { index: *p, props: g.prop_count() })
                }
                StateInput::Val if keying.is_none() => return Err(EvalError::MissingKeying),
                _ => {}
            }
        }
        let exact_ok = self.readout.is_exact_capable() && self.stages.iter().all(|s| s.messages.iter().all(|m| m.1.is_exact_capable()));
        Ok(match mode {
            Mode::Exact if !exact_ok => return Err(EvalError::SigmoidInExact),
            Mode::Exact => self.run::<Rational>(g, keying).into_iter().map(Scalar::Exact).collect(),
            Mode::Float => self.run::<f64>(g, keying).into_iter().map(Scalar::Float).collect(),
        })
    }
}

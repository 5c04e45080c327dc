//! Recognizers for the isomorphism type of a fixed small pointed graph.
//!
//! All three extract the keys of the point's component (or of the whole graph)
//! in descending order, then check every bijection from ranks to the nodes of
//! the target graph for matching labels and adjacency.

use itertools::Itertools;

use super::{
    is_zero, key_nonzero, label_match, nonzero, not01, one, prod, spread_max, spread_min, spread_sum, walk, zero,
    CompileError,
};
use crate::feature::{Feature, GnnClassifier, Policy};
use crate::graph::{write_graph, Graph, PointedGraph, PointedKeyedGraph};
use crate::rational::Rational;
use crate::scalar::{build_macro, Macro, Mode, ScalarFn};

pub const MAX_LOCALMAX_NODES: usize = 4;
pub const MAX_LOCALSUM_NODES: usize = 3;
pub const MAX_GLOBALSUM_NODES: usize = 4;

fn check_target(g: &PointedGraph, max: usize, connected: bool) -> Result<usize, CompileError> {
    let n = g.graph.node_count();
    if n > max {
        return Err(CompileError::TooLarge { got: n, max });
    }
    if connected && !g.graph.is_connected() {
        return Err(CompileError::Disconnected);
    }
    Ok(n)
}

fn finish(expr: Feature, name: &str, g: &PointedGraph) -> GnnClassifier {
    let desc = write_graph(&PointedKeyedGraph::new(g.clone(), None).expect("unkeyed")).replace('\n', " ");
    GnnClassifier::new(expr, Policy::PosNonpos, Mode::Exact)
        .expect("exact-capable")
        .with_meta(format!("{name}: {}", desc.trim()))
}

/// `ReLU(Σ_l [l ~ j]·adj_l + [l !~ j]·(1 - adj_l) - (N - 1))` where `adj_l`
/// says the node has a neighbor playing the role of `l`.
fn adjacency_check(g: &Graph, j: usize, adj: &[Feature]) -> Feature {
    let n = g.node_count();
    let terms: Vec<Feature> =
        (0..n).map(|l| if g.has_edge(j, l) { adj[l].clone() } else { not01(&adj[l]) }).collect();
    Feature::sum(&terms, -(n as i64 - 1)).relu()
}

/// Sum over bijections `ranks -> nodes of g` of a 0/1 acceptance feature.
/// `rank[r]` marks the node holding the `r`-th largest key, `near[r]` says a
/// neighbor holds it, and `gather` collects a 0/1 feature over the component.
fn permutation_sum(
    g: &PointedGraph,
    rank: &[Feature],
    near: &[Feature],
    gather: impl Fn(&Feature) -> Feature,
) -> Feature {
    let n = g.graph.node_count();
    let labels: Vec<Feature> = (0..n).map(|j| label_match(&g.graph, j)).collect();
    let mut total = Vec::new();
    for perm in (0..n).permutations(n) {
        // perm[r] = node of g assigned to rank r
        let mut role = vec![0; n];
        for (r, &j) in perm.iter().enumerate() {
            role[j] = r;
        }
        let k: Vec<Feature> = (0..n).map(|j| rank[role[j]].clone()).collect();
        let adj: Vec<Feature> = (0..n).map(|j| near[role[j]].clone()).collect();
        let mut parts = Vec::with_capacity(n + 1);
        for j in 0..n {
            let fj = Feature::sum(&[k[j].clone(), labels[j].clone(), adjacency_check(&g.graph, j, &adj)], -2).relu();
            parts.push(gather(&fj));
        }
        parts.push(k[g.point].clone());
        total.push(Feature::sum(&parts, -(n as i64)).relu());
    }
    Feature::sum(&total, 0)
}

/// Isolated point with the target's label.
fn single_node(g: &PointedGraph, degree: Feature) -> Feature {
    (&label_match(&g.graph, g.point) - &degree).relu()
}

/// Max-aggregation recognizer for a connected target with at most 4 nodes.
pub fn compile_isotype_localmax(g: &PointedGraph) -> Result<GnnClassifier, CompileError> {
    let n = check_target(g, MAX_LOCALMAX_NODES, true)?;
    let name = "isotype_localmax_semilinear";
    if n == 1 {
        return Ok(finish(single_node(g, one().local_max()), name, g));
    }
    let key = key_nonzero();
    let window = 2 * n;
    let floor = spread_min(&key, window).plus_const(-1);

    // vals[i]: keys not yet extracted after i steps, extracted ones sink to `floor`
    let mut vals = vec![key.clone()];
    let mut tops = Vec::with_capacity(n);
    for i in 0..n {
        let top = spread_max(&vals[i], window);
        vals.push(Feature::if_pos(&(&top - &key), &key, &floor));
        tops.push(top);
    }

    let mut flags = Vec::with_capacity(n);
    for i in 0..n {
        let dropped = Feature::if_pos(&(&vals[i] - &vals[i + 1]), &one(), &zero());
        flags.push(spread_max(&dropped, n));
    }
    let active = spread_max(&Feature::if_pos(&(&key - &vals[n]), &zero(), &one()), n);
    flags.push(not01(&active));
    let size_ok = Feature::sum(&flags, -(n as i64)).relu();

    let rank: Vec<Feature> = tops.iter().map(|t| Feature::if_pos(&(t - &key).abs(), &zero(), &one())).collect();
    let near: Vec<Feature> = rank.iter().map(Feature::local_max).collect();
    let body = permutation_sum(g, &rank, &near, |f| spread_max(f, n));
    Ok(finish(Feature::if_pos(&size_ok, &body, &zero()), name, g))
}

/// Keeps the maximum surviving value in every window; `w_len` is the walk length.
struct SumExtraction {
    /// Survivors after the removal rounds.
    survivors: Feature,
    sum: Feature,
    weight: Feature,
}

fn extract_max(start: &Feature, rounds: usize, w_len: usize) -> SumExtraction {
    let mut a = start.clone();
    for _ in 0..rounds {
        let s = walk(&a, w_len);
        let w = walk(&nonzero(&a), w_len);
        a = Feature::if_pos(&(&s - &prod(&a, &w)), &zero(), &a);
    }
    let sum = walk(&a, w_len);
    let weight = walk(&nonzero(&a), w_len);
    SumExtraction { survivors: a, sum, weight }
}

/// Sum aggregation with products, for a connected target with at most 3 nodes.
pub fn compile_isotype_localsum_square(g: &PointedGraph) -> Result<GnnClassifier, CompileError> {
    let n = check_target(g, MAX_LOCALSUM_NODES, true)?;
    let name = "isotype_localsum_square";
    if n == 1 {
        return Ok(finish(single_node(g, one().local_sum()), name, g));
    }
    let key = key_nonzero();
    let w_len = 2 * n;
    let mut flags = Vec::new();
    let mut rank = Vec::with_capacity(n);
    let mut next = key.clone();
    for _ in 0..n {
        let ex = extract_max(&next, n, w_len);
        let a = &ex.survivors;
        let wq = prod(&ex.weight, &walk(&a.square(), w_len));
        flags.push(Feature::if_pos(&ex.weight, &zero(), &one()));
        flags.push(Feature::if_pos(&(&wq - &ex.sum.square()), &one(), &zero()));
        let above = &prod(a, &ex.weight) - &ex.sum;
        flags.push(Feature::if_pos(&Feature::min(&a.abs(), &above), &one(), &zero()));
        let kw = prod(&key, &ex.weight);
        rank.push(Feature::if_pos(&ex.weight, &is_zero(&(&kw - &ex.sum)), &zero()));
        next = Feature::if_pos(&(&ex.sum - &kw), &key, &zero());
    }
    flags.push(nonzero(&next));
    flags.push(one().local_sum().plus_const(-(n as i64)).relu());
    let spread: Vec<Feature> = flags.iter().map(|f| spread_sum(f, 3 * n)).collect();
    let size_ok = Feature::if_pos(&Feature::sum(&spread, 0), &zero(), &one());

    let near: Vec<Feature> = rank.iter().map(Feature::local_sum).collect();
    let body = permutation_sum(g, &rank, &near, |f| Feature::min(&spread_sum(f, n), &one()));
    Ok(finish(Feature::if_pos(&size_ok, &body, &zero()), name, g))
}

/// Whole-graph recognizer with global sums; the target may be disconnected.
pub fn compile_isotype_globalsum(g: &PointedGraph) -> Result<GnnClassifier, CompileError> {
    let n = check_target(g, MAX_GLOBALSUM_NODES, false)?;
    let size = one().global_sum().plus_const(-(n as i64)).abs();
    let size_ok = not01(&size).relu();

    // mean of the survivors, dividing by counts 1..=n only
    let mean = |s: &Feature, w: &Feature| {
        let terms: Vec<Feature> = (1..=n)
            .map(|l| {
                let hit = not01(&w.plus_const(-(l as i64)).abs());
                Feature::if_pos(&hit, &s.scale(Rational::new(1, l as i64), 0), &zero())
            })
            .collect();
        Feature::sum(&terms, 0)
    };
    let key = key_nonzero();
    let mut rank = Vec::with_capacity(n);
    let mut a_next = key.clone();
    for _ in 0..n {
        let mut a = a_next.clone();
        for _ in 0..n {
            let avg = mean(&a.global_sum(), &nonzero(&a).global_sum());
            a = Feature::if_pos(&(&avg - &a), &zero(), &a);
        }
        let m = mean(&a.global_sum(), &nonzero(&a).global_sum());
        rank.push(is_zero(&(&m - &key)));
        a_next = Feature::if_pos(&(&m - &key), &key, &zero());
    }
    let near: Vec<Feature> = rank.iter().map(Feature::local_sum).collect();
    let body = permutation_sum(g, &rank, &near, Feature::global_sum);
    Ok(finish(Feature::if_pos(&size_ok, &body, &zero()), "isotype_globalsum_semilinear", g))
}

/// Scalar function of `(Σ[y≠0], Σy, Σy²)` over a multiset of at most `k`
/// values: 1 if the nonzero values are not all equal, else 0.
pub fn cs_detector_fn(k: usize) -> ScalarFn {
    let (a, b, c) = (ScalarFn::arg(0), ScalarFn::arg(1), ScalarFn::arg(2));
    let mut h = ScalarFn::constant(0);
    for i in 1..=k as i64 {
        let near = build_macro(Macro::Abs, vec![a.clone().scaled(1, -i)]).unwrap().scaled(-1, 1);
        let gap = c.clone().scaled(i, 0).minus(b.clone().square());
        h = h.plus(ScalarFn::if_pos(near, gap, ScalarFn::constant(0)));
    }
    ScalarFn::if_pos(h, ScalarFn::constant(1), ScalarFn::constant(0))
}

/// Applies [`cs_detector_fn`] to the sums of `values`.
pub fn cs_detector(values: &[Rational]) -> Rational {
    let count = values.iter().filter(|v| !v.is_zero()).count();
    let sum = values.iter().fold(Rational::zero(), |s, v| &s + v);
    let sq = values.iter().fold(Rational::zero(), |s, v| &s + &(v * v));
    cs_detector_fn(values.len().max(1))
        .eval_exact(&[Rational::from(count as i64), sum, sq])
        .expect("arity 3")
}

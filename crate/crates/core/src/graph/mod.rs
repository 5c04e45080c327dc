//! Labeled undirected graphs, pointed and keyed variants, the `.pg` text
//! format, fixtures, enumeration and isomorphism search.

mod enumerate;
mod fixtures;
mod format;
mod iso;
pub(crate) mod ops;

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;

pub use enumerate::{
    enumerate_graphs, enumerate_graphs_of_size, enumerate_pointed_graphs, enumerate_pointed_graphs_of_size,
    EnumerateError, MAX_ENUM_NODES, MAX_ENUM_PROPS,
};
pub use fixtures::{builtin_graph, Fixture, FixtureError};
pub use format::{parse_graph, write_graph, ParseGraphError};
pub use iso::{is_isomorphic, is_isomorphic_graphs};
pub use ops::{component_of, disjoint_union, restrict_neighborhood, unravel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("proposition {0} out of range")]
    PropOutOfRange(usize),
    #[error("duplicate key value {0}")]
    DuplicateKey(Rational),
    #[error("keying has {got} values for {expected} nodes")]
    KeyingSize { expected: usize, got: usize },
}

/// A finite, simple, undirected, node-labeled graph on nodes `0..n`.
///
/// Propositions are numbered from 1; `label(v, 1)` is `p1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    prop_count: usize,
    adj: Vec<Vec<usize>>,
    labels: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(node_count: usize, prop_count: usize) -> Self {
        Graph { prop_count, adj: vec![Vec::new(); node_count], labels: vec![vec![false; prop_count]; node_count] }
    }

    pub fn from_edges(node_count: usize, prop_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(node_count, prop_count);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn prop_count(&self) -> usize {
        self.prop_count
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.node_count();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::NodeOutOfRange(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Label bit of proposition `p` (1-based) at node `v`.
    pub fn label(&self, v: usize, p: usize) -> bool {
        p >= 1 && p <= self.prop_count && self.labels[v][p - 1]
    }

    pub fn label_vec(&self, v: usize) -> &[bool] {
        &self.labels[v]
    }

    pub fn set_label(&mut self, v: usize, p: usize, on: bool) -> Result<(), GraphError> {
        if v >= self.node_count() {
            return Err(GraphError::NodeOutOfRange(v));
        }
        if p == 0 || p > self.prop_count {
            return Err(GraphError::PropOutOfRange(p));
        }
        self.labels[v][p - 1] = on;
        Ok(())
    }

    pub fn set_label_vec(&mut self, v: usize, bits: Vec<bool>) -> Result<(), GraphError> {
        if v >= self.node_count() {
            return Err(GraphError::NodeOutOfRange(v));
        }
        if bits.len() != self.prop_count {
            return Err(GraphError::PropOutOfRange(bits.len()));
        }
        self.labels[v] = bits;
        Ok(())
    }

    /// Same graph with `props` propositions; new bits are 0, dropped bits are lost.
    pub fn with_prop_count(&self, props: usize) -> Graph {
        let mut g = self.clone();
        g.prop_count = props;
        for l in &mut g.labels {
            l.resize(props, false);
        }
        g
    }

    /// Checks irreflexivity, symmetry, sorted adjacency and label widths.
    pub fn validate(&self) -> bool {
        let n = self.node_count();
        self.labels.len() == n
            && self.labels.iter().all(|l| l.len() == self.prop_count)
            && self.adj.iter().enumerate().all(|(u, ns)| {
                ns.windows(2).all(|w| w[0] < w[1])
                    && ns.iter().all(|&v| v < n && v != u && self.adj[v].binary_search(&u).is_ok())
            })
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || ops::bfs_order(self, 0).len() == self.node_count()
    }
}

/// A graph with a distinguished node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointedGraph {
    pub graph: Graph,
    pub point: usize,
}

impl PointedGraph {
    pub fn new(graph: Graph, point: usize) -> Result<Self, GraphError> {
        if point >= graph.node_count() {
            return Err(GraphError::NodeOutOfRange(point));
        }
        Ok(PointedGraph { graph, point })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn unkeyed(self) -> PointedKeyedGraph {
        PointedKeyedGraph { pointed: self, keying: None }
    }

    pub fn keyed(self, keying: Keying) -> Result<PointedKeyedGraph, GraphError> {
        PointedKeyedGraph::new(self, Some(keying))
    }
}

/// Node values. Injective keyings are keys; non-injective ones are plain values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Keying {
    pub values: Vec<Rational>,
}

impl Keying {
    pub fn new(values: Vec<Rational>) -> Self {
        Keying { values }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::new();
        self.values.iter().all(|v| seen.insert(v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values pulled back along a map `f`: node `x` gets the value of `f(x)`.
    pub fn pull_back(&self, f: &[usize]) -> Keying {
        Keying { values: f.iter().map(|&y| self.values[y].clone()).collect() }
    }
}

impl fmt::Display for Keying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Largest absolute key drawn by [`random_keying`], in thousandths.
pub const KEY_RANGE_MILLI: i64 = 1_000_000;

/// Deterministic injective keying: node `v` gets the `v`-th distinct draw of
/// an integer in `[-10^6, 10^6]` scaled by `1/1000`, from a ChaCha stream
/// seeded by `seed`.
pub fn random_keying(g: &Graph, seed: u64) -> Keying {
    random_keying_n(g.node_count(), seed)
}

pub fn random_keying_n(n: usize, seed: u64) -> Keying {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut values = Vec::with_capacity(n);
    while values.len() < n {
        let k: i64 = rng.random_range(-KEY_RANGE_MILLI..=KEY_RANGE_MILLI);
        if seen.insert(k) {
            values.push(Rational::new(k, 1000));
        }
    }
    Keying { values }
}

/// A pointed graph with an optional valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointedKeyedGraph {
    pub pointed: PointedGraph,
    pub keying: Option<Keying>,
}

impl PointedKeyedGraph {
    pub fn new(pointed: PointedGraph, keying: Option<Keying>) -> Result<Self, GraphError> {
        if let Some(k) = &keying {
            if k.len() != pointed.node_count() {
                return Err(GraphError::KeyingSize { expected: pointed.node_count(), got: k.len() });
            }
        }
        Ok(PointedKeyedGraph { pointed, keying })
    }

    pub fn graph(&self) -> &Graph {
        &self.pointed.graph
    }

    pub fn point(&self) -> usize {
        self.pointed.point
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_canonical() {
        let mut g = Graph::new(3, 1);
        g.add_edge(2, 0).unwrap();
        g.add_edge(1, 0).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2)]);
        assert_eq!(g.add_edge(0, 2), Err(GraphError::DuplicateEdge(0, 2)));
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        assert_eq!(g.add_edge(1, 3), Err(GraphError::NodeOutOfRange(3)));
        assert!(g.validate());
        assert!(g.is_connected());
    }

    #[test]
    fn keyings_are_deterministic_and_injective() {
        let g = builtin_graph(Fixture::Cycle(3)).unwrap().pointed.graph;
        assert_eq!(random_keying(&g, 7), random_keying(&g, 7));
        assert_ne!(random_keying(&g, 1), random_keying(&g, 2));
        for seed in 0..200 {
            let k = random_keying_n(8, seed);
            assert!(k.is_injective());
            assert!(k.values.iter().all(|v| v.abs() <= Rational::from(1000)));
        }
    }
}

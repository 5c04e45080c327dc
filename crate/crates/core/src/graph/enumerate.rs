//! Exhaustive enumeration of small labeled graphs.
//!
//! Order: node count ascending, then edge mask (bit `i` is the `i`-th pair
//! in lexicographic order), then labeling (bit `v·P + p - 1` is `p` at `v`),
//! then point.

use thiserror::Error;

use super::{Graph, PointedGraph};

pub const MAX_ENUM_NODES: usize = 6;
pub const MAX_ENUM_PROPS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("enumeration bound exceeded: {nodes} nodes / {props} props (max {MAX_ENUM_NODES} / {MAX_ENUM_PROPS})")]
pub struct EnumerateError {
    pub nodes: usize,
    pub props: usize,
}

fn check(nodes: usize, props: usize) -> Result<(), EnumerateError> {
    if nodes > MAX_ENUM_NODES || props > MAX_ENUM_PROPS {
        Err(EnumerateError { nodes, props })
    } else {
        Ok(())
    }
}

/// All graphs with exactly `n` nodes (not pointed).
pub fn enumerate_graphs_of_size(
    n: usize,
    props: usize,
    connected_only: bool,
) -> Result<impl Iterator<Item = Graph>, EnumerateError> {
    check(n, props)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let masks = if n == 0 { 0u64 } else { 1u64 << pairs.len() };
    let labelings = 1u64 << (n * props);
    Ok((0..masks)
        .filter_map(move |mask| {
            let mut g = Graph::new(n, props);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(u, v).unwrap();
                }
            }
            (!connected_only || g.is_connected()).then_some(g)
        })
        .flat_map(move |g| {
            (0..labelings).map(move |lab| {
                let mut h = g.clone();
                for v in 0..n {
                    let bits = (0..props).map(|p| lab >> (v * props + p) & 1 == 1).collect();
                    h.set_label_vec(v, bits).unwrap();
                }
                h
            })
        }))
}

/// All graphs with 1..=`max_nodes` nodes.
pub fn enumerate_graphs(
    max_nodes: usize,
    props: usize,
    connected_only: bool,
) -> Result<impl Iterator<Item = Graph>, EnumerateError> {
    check(max_nodes, props)?;
    Ok((1..=max_nodes).flat_map(move |n| enumerate_graphs_of_size(n, props, connected_only).unwrap()))
}

fn pointed(graphs: impl Iterator<Item = Graph>) -> impl Iterator<Item = PointedGraph> {
    graphs.flat_map(|g| {
        let n = g.node_count();
        (0..n).map(move |point| PointedGraph { graph: g.clone(), point })
    })
}

/// Every pointed labeled graph with 1..=`max_nodes` nodes, once per
/// (edge set, labeling, point). With `connected_only`, only graphs whose
/// point component is the whole graph.
pub fn enumerate_pointed_graphs(
    max_nodes: usize,
    props: usize,
    connected_only: bool,
) -> Result<impl Iterator<Item = PointedGraph>, EnumerateError> {
    Ok(pointed(enumerate_graphs(max_nodes, props, connected_only)?))
}

/// Pointed graphs with exactly `n` nodes.
pub fn enumerate_pointed_graphs_of_size(
    n: usize,
    props: usize,
    connected_only: bool,
) -> Result<impl Iterator<Item = PointedGraph>, EnumerateError> {
    Ok(pointed(enumerate_graphs_of_size(n, props, connected_only)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(enumerate_pointed_graphs_of_size(1, 0, true).unwrap().count(), 1);
        assert_eq!(enumerate_pointed_graphs_of_size(1, 0, false).unwrap().count(), 1);
        assert_eq!(enumerate_pointed_graphs_of_size(2, 0, false).unwrap().count(), 4);
        assert_eq!(enumerate_pointed_graphs_of_size(3, 1, false).unwrap().count(), 192);
        assert_eq!(enumerate_pointed_graphs(1, 0, false).unwrap().count(), 1);
        assert_eq!(enumerate_pointed_graphs(2, 0, false).unwrap().count(), 5);
        assert_eq!(enumerate_pointed_graphs(3, 1, false).unwrap().count(), 2 + 16 + 192);
        // 38 connected labeled graphs on 4 nodes
        assert_eq!(enumerate_graphs_of_size(4, 0, true).unwrap().count(), 38);
        assert_eq!(enumerate_pointed_graphs_of_size(4, 2, false).unwrap().count(), 65536);
        assert!(enumerate_pointed_graphs(7, 0, false).is_err());
        assert!(enumerate_pointed_graphs(3, 3, false).is_err());
    }

    #[test]
    fn enumerated_graphs_are_valid_and_distinct() {
        let all: Vec<PointedGraph> = enumerate_pointed_graphs(3, 1, false).unwrap().collect();
        assert!(all.iter().all(|g| g.graph.validate()));
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }
}

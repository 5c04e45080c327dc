use std::collections::VecDeque;

use super::{Graph, PointedGraph};

/// BFS from `start` visiting neighbors in ascending order; returns
/// `(node, distance)` in discovery order.
pub(crate) fn bfs_with_dist(g: &Graph, start: usize, radius: Option<usize>) -> Vec<(usize, usize)> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        order.push((u, dist[u]));
        if radius.is_some_and(|r| dist[u] >= r) {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    order
}

pub(crate) fn bfs_order(g: &Graph, start: usize) -> Vec<usize> {
    bfs_with_dist(g, start, None).into_iter().map(|(v, _)| v).collect()
}

/// Induced subgraph on `nodes` (in the given order, which becomes the new numbering).
pub(crate) fn induced(g: &Graph, nodes: &[usize]) -> Graph {
    let mut index = vec![usize::MAX; g.node_count()];
    for (i, &v) in nodes.iter().enumerate() {
        index[v] = i;
    }
    let mut h = Graph::new(nodes.len(), g.prop_count());
    for (i, &v) in nodes.iter().enumerate() {
        h.set_label_vec(i, g.label_vec(v).to_vec()).unwrap();
        for &w in g.neighbors(v) {
            let j = index[w];
            if j != usize::MAX && i < j {
                h.add_edge(i, j).unwrap();
            }
        }
    }
    h
}

/// Ball of radius `r` around the point, renumbered in BFS order (point = 0).
pub fn restrict_neighborhood(g: &PointedGraph, r: usize) -> PointedGraph {
    let nodes: Vec<usize> = bfs_with_dist(&g.graph, g.point, Some(r)).into_iter().map(|(v, _)| v).collect();
    PointedGraph { graph: induced(&g.graph, &nodes), point: 0 }
}

/// Connected component of the point, renumbered in BFS order, with the map
/// from new to old ids.
pub fn component_of(g: &PointedGraph) -> (PointedGraph, Vec<usize>) {
    let nodes = bfs_order(&g.graph, g.point);
    (PointedGraph { graph: induced(&g.graph, &nodes), point: 0 }, nodes)
}

/// Disjoint union: nodes of `h` are shifted by `g.node_count()`.
/// Both graphs must use the same proposition count.
pub fn disjoint_union(g: &Graph, h: &Graph) -> Graph {
    assert_eq!(g.prop_count(), h.prop_count(), "proposition counts differ");
    let n = g.node_count();
    let mut u = Graph::new(n + h.node_count(), g.prop_count());
    for v in 0..n {
        u.set_label_vec(v, g.label_vec(v).to_vec()).unwrap();
    }
    for v in 0..h.node_count() {
        u.set_label_vec(n + v, h.label_vec(v).to_vec()).unwrap();
    }
    for (a, b) in g.edges() {
        u.add_edge(a, b).unwrap();
    }
    for (a, b) in h.edges() {
        u.add_edge(n + a, n + b).unwrap();
    }
    u
}

/// Depth-`depth` unravelling: one node per walk of length at most `depth`
/// starting at the point (walks may backtrack), labeled like the walk's
/// last node. Node 0 is the empty walk; children are numbered level by level.
pub fn unravel(g: &PointedGraph, depth: usize) -> PointedGraph {
    // (endpoint, tree id) per walk on the current frontier
    let mut frontier = vec![g.point];
    let mut ends = vec![g.point];
    let mut edges = Vec::new();
    let mut ids = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        let mut next_ids = Vec::new();
        for (&end, &id) in frontier.iter().zip(&ids) {
            for &w in g.graph.neighbors(end) {
                let child = ends.len();
                ends.push(w);
                edges.push((id, child));
                next.push(w);
                next_ids.push(child);
            }
        }
        frontier = next;
        ids = next_ids;
    }
    let mut t = Graph::new(ends.len(), g.graph.prop_count());
    for (i, &v) in ends.iter().enumerate() {
        t.set_label_vec(i, g.graph.label_vec(v).to_vec()).unwrap();
    }
    for (a, b) in edges {
        t.add_edge(a, b).unwrap();
    }
    PointedGraph { graph: t, point: 0 }
}

use super::ops::bfs_order;
use super::{Graph, PointedGraph};

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn compatible(&self, v: usize, w: usize, placed: &[usize]) -> bool {
        if self.used[w] || self.g.degree(v) != self.h.degree(w) || self.g.label_vec(v) != self.h.label_vec(w) {
            return false;
        }
        placed.iter().all(|&x| self.g.has_edge(v, x) == self.h.has_edge(w, self.map[x]))
    }

    fn place(&mut self, depth: usize, root: Option<usize>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        let candidates: Vec<usize> = match (depth, root, self.parent[depth]) {
            (0, Some(r), _) => vec![r],
            (_, _, Some(p)) => self.h.neighbors(self.map[p]).to_vec(),
            _ => (0..self.h.node_count()).collect(),
        };
        for w in candidates {
            if !self.compatible(v, w, &self.order[..depth]) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            if self.place(depth + 1, root) {
                return true;
            }
            self.used[w] = false;
        }
        false
    }
}

fn invariants_match(g: &Graph, h: &Graph) -> bool {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() || g.prop_count() != h.prop_count() {
        return false;
    }
    let sig = |x: &Graph| {
        let mut s: Vec<(usize, Vec<bool>)> =
            (0..x.node_count()).map(|v| (x.degree(v), x.label_vec(v).to_vec())).collect();
        s.sort();
        s
    };
    sig(g) == sig(h)
}

fn search(g: &Graph, h: &Graph, roots: Option<(usize, usize)>) -> Option<Vec<usize>> {
    if !invariants_match(g, h) {
        return None;
    }
    let n = g.node_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let starts = roots.map(|(r, _)| r).into_iter().chain(0..n);
    for s in starts {
        if !seen[s] {
            for v in bfs_order(g, s) {
                seen[v] = true;
                order.push(v);
            }
        }
    }
    let pos: Vec<usize> = {
        let mut p = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            p[v] = i;
        }
        p
    };
    let parent = order
        .iter()
        .map(|&v| g.neighbors(v).iter().copied().filter(|&u| pos[u] < pos[v]).min_by_key(|&u| pos[u]))
        .collect();
    let mut s = Search { g, h, order, parent, map: vec![usize::MAX; n], used: vec![false; n] };
    s.place(0, roots.map(|(_, r)| r)).then_some(s.map)
}

/// Backtracking isomorphism search between pointed graphs. Returns a
/// bijection `f` (indexed by nodes of `g`) preserving labels, edges in both
/// directions, and the point; deterministic.
pub fn is_isomorphic(g: &PointedGraph, h: &PointedGraph) -> Option<Vec<usize>> {
    search(&g.graph, &h.graph, Some((g.point, h.point)))
}

/// Isomorphism search ignoring points.
pub fn is_isomorphic_graphs(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    search(g, h, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, enumerate_pointed_graphs, Fixture};

    fn verify(g: &PointedGraph, h: &PointedGraph, f: &[usize]) -> bool {
        let n = g.graph.node_count();
        let mut hit = vec![false; n];
        for &w in f {
            if w >= n || hit[w] {
                return false;
            }
            hit[w] = true;
        }
        f[g.point] == h.point
            && (0..n).all(|v| g.graph.label_vec(v) == h.graph.label_vec(f[v]))
            && (0..n).all(|u| (0..n).all(|v| g.graph.has_edge(u, v) == h.graph.has_edge(f[u], f[v])))
    }

    #[test]
    fn examples() {
        let c3 = builtin_graph(Fixture::Cycle(3)).unwrap().pointed;
        let c4 = builtin_graph(Fixture::Cycle(4)).unwrap().pointed;
        assert_eq!(is_isomorphic(&c3, &c3), Some(vec![0, 1, 2]));
        assert!(is_isomorphic(&c3, &c4).is_none());
        let mut c3b = c3.clone();
        c3b.point = 1;
        let f = is_isomorphic(&c3, &c3b).unwrap();
        assert!(verify(&c3, &c3b, &f));
    }

    #[test]
    fn symmetric_and_verified_on_small_graphs() {
        let all: Vec<PointedGraph> = enumerate_pointed_graphs(3, 1, false).unwrap().collect();
        for g in &all {
            for h in &all {
                let a = is_isomorphic(g, h);
                let b = is_isomorphic(h, g);
                assert_eq!(a.is_some(), b.is_some());
                if let Some(f) = a {
                    assert!(verify(g, h, &f));
                }
            }
        }
    }
}

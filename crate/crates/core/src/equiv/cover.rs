use thiserror::Error;

use crate::graph::{Graph, PointedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("node list is not a simple cycle of length at least 3")]
    NotACycle,
}

fn same_label(g: &Graph, x: usize, h: &Graph, y: usize) -> bool {
    let p = g.prop_count().max(h.prop_count());
    (1..=p).all(|i| (i <= g.prop_count() && g.label(x, i)) == (i <= h.prop_count() && h.label(y, i)))
}

/// Label, forth and back conditions for a total map `f: g -> h` sending the
/// point to the point.
pub fn verify_functional_bisimulation(g: &PointedGraph, h: &PointedGraph, f: &[usize]) -> bool {
    let (gg, hh) = (&g.graph, &h.graph);
    f.len() == gg.node_count()
        && f.iter().all(|&y| y < hh.node_count())
        && f[g.point] == h.point
        && (0..gg.node_count()).all(|x| {
            same_label(gg, x, hh, f[x])
                && gg.neighbors(x).iter().all(|&x2| hh.has_edge(f[x], f[x2]))
                && hh.neighbors(f[x]).iter().all(|&y2| gg.neighbors(x).iter().any(|&x2| f[x2] == y2))
        })
}

/// A homomorphism that is a bijection from each neighborhood onto the
/// neighborhood of the image, preserving labels and the point.
pub fn verify_covering(g: &PointedGraph, h: &PointedGraph, f: &[usize]) -> bool {
    let (gg, hh) = (&g.graph, &h.graph);
    if f.len() != gg.node_count() || f.iter().any(|&y| y >= hh.node_count()) || f[g.point] != h.point {
        return false;
    }
    (0..gg.node_count()).all(|x| {
        let mut imgs: Vec<usize> = gg.neighbors(x).iter().map(|&x2| f[x2]).collect();
        imgs.sort_unstable();
        same_label(gg, x, hh, f[x]) && imgs == hh.neighbors(f[x])
    })
}

/// Nodes of `g` with the point first, then BFS, then any leftovers.
fn search_order(g: &PointedGraph) -> Vec<usize> {
    let mut order = crate::graph::ops::bfs_order(&g.graph, g.point);
    let mut seen = vec![false; g.node_count()];
    for &v in &order {
        seen[v] = true;
    }
    order.extend((0..g.node_count()).filter(|&v| !seen[v]));
    order
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    f: Vec<Option<usize>>,
    covering: bool,
}

impl Search<'_> {
    fn consistent(&self, x: usize, y: usize) -> bool {
        if !same_label(self.g, x, self.h, y) {
            return false;
        }
        if self.covering && self.g.degree(x) != self.h.degree(y) {
            return false;
        }
        for &x2 in self.g.neighbors(x) {
            if let Some(y2) = self.f[x2] {
                if !self.h.has_edge(y, y2) {
                    return false;
                }
                if self.covering {
                    // images of x2's neighbors must stay distinct
                    if self.g.neighbors(x2).iter().any(|&w| w != x && self.f[w] == Some(y)) {
                        return false;
                    }
                }
            }
        }
        if self.covering {
            // images of x's placed neighbors must stay distinct
            let mut imgs: Vec<usize> = self.g.neighbors(x).iter().filter_map(|&w| self.f[w]).collect();
            let k = imgs.len();
            imgs.sort_unstable();
            imgs.dedup();
            if imgs.len() != k {
                return false;
            }
        }
        true
    }

    fn candidates(&self, x: usize) -> Vec<usize> {
        match self.g.neighbors(x).iter().find_map(|&w| self.f[w]) {
            Some(y) => self.h.neighbors(y).to_vec(),
            None => (0..self.h.node_count()).collect(),
        }
    }

    fn run(&mut self, i: usize, done: &dyn Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
        if i == self.order.len() {
            let f: Vec<usize> = self.f.iter().map(|y| y.expect("total")).collect();
            return done(&f).then_some(f);
        }
        let x = self.order[i];
        let fixed = self.f[x];
        let cands = match fixed {
            Some(y) => vec![y],
            None => self.candidates(x),
        };
        for y in cands {
            if !self.consistent(x, y) {
                continue;
            }
            self.f[x] = Some(y);
            if let Some(r) = self.run(i + 1, done) {
                return Some(r);
            }
        }
        self.f[x] = fixed;
        None
    }
}

fn search(g: &PointedGraph, h: &PointedGraph, covering: bool, done: &dyn Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
    let mut order = search_order(g);
    order.remove(0);
    let mut s = Search { g: &g.graph, h: &h.graph, order, f: vec![None; g.node_count()], covering };
    if !s.consistent(g.point, h.point) {
        return None;
    }
    s.f[g.point] = Some(h.point);
    s.run(0, done)
}

/// Backtracking search for a functional bisimulation `g -> h`.
pub fn find_functional_bisimulation(g: &PointedGraph, h: &PointedGraph) -> Option<Vec<usize>> {
    search(g, h, false, &|f| verify_functional_bisimulation(g, h, f))
}

/// Backtracking search for a covering map `g -> h`.
pub fn find_covering(g: &PointedGraph, h: &PointedGraph) -> Option<Vec<usize>> {
    search(g, h, true, &|f| verify_covering(g, h, f))
}

/// Two copies of `g` with the first cycle edge crossed between the copies.
/// Node `(v, c)` is `v + c·n`; the map sends it to `v`.
pub fn double_cycle_cover(g: &PointedGraph, cycle: &[usize]) -> Result<(PointedGraph, Vec<usize>), CoverError> {
    let n = g.node_count();
    let k = cycle.len();
    let mut seen = vec![false; n];
    if k < 3 || cycle.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(CoverError::NotACycle);
    }
    if (0..k).any(|i| !g.graph.has_edge(cycle[i], cycle[(i + 1) % k])) {
        return Err(CoverError::NotACycle);
    }
    let (a, b) = (cycle[0].min(cycle[1]), cycle[0].max(cycle[1]));
    let mut h = Graph::new(2 * n, g.graph.prop_count());
    for c in 0..2 {
        for v in 0..n {
            h.set_label_vec(v + c * n, g.graph.label_vec(v).to_vec()).expect("width");
        }
    }
    for (u, v) in g.graph.edges() {
        if (u, v) == (a, b) {
            h.add_edge(u, v + n).expect("fresh");
            h.add_edge(u + n, v).expect("fresh");
        } else {
            h.add_edge(u, v).expect("fresh");
            h.add_edge(u + n, v + n).expect("fresh");
        }
    }
    let map = (0..2 * n).map(|x| x % n).collect();
    Ok((PointedGraph::new(h, g.point).expect("point"), map))
}

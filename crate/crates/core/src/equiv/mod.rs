//! Color refinement, bisimulation and covering maps.

mod cover;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::graph::{disjoint_union, Graph, PointedGraph};

pub use cover::{
    double_cycle_cover, find_covering, find_functional_bisimulation, verify_covering, verify_functional_bisimulation,
    CoverError,
};

/// Canonical per-node colors, numbered `0..k` by first appearance.
pub type Coloring = Vec<usize>;

/// A witness that two pointed graphs are equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EquivalenceWitness {
    /// Pairs `(x, y)` with `x` in the first graph and `y` in the second.
    BisimRelation(Vec<(usize, usize)>),
    FunctionalBisim(Vec<usize>),
    Covering(Vec<usize>),
}

/// Renumbers colors by first appearance.
pub fn canonicalize(c: &[usize]) -> Coloring {
    let mut ids = HashMap::new();
    c.iter()
        .map(|x| {
            let n = ids.len();
            *ids.entry(*x).or_insert(n)
        })
        .collect()
}

/// Colors from label vectors.
pub fn label_coloring(g: &Graph) -> Coloring {
    let mut ids: HashMap<&[bool], usize> = HashMap::new();
    (0..g.node_count())
        .map(|v| {
            let n = ids.len();
            *ids.entry(g.label_vec(v)).or_insert(n)
        })
        .collect()
}

fn refine_round(g: &Graph, c: &[usize], as_set: bool) -> Coloring {
    let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    (0..g.node_count())
        .map(|v| {
            let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&u| c[u]).collect();
            nb.sort_unstable();
            if as_set {
                nb.dedup();
            }
            let n = ids.len();
            *ids.entry((c[v], nb)).or_insert(n)
        })
        .collect()
}

/// `d` rounds of refinement starting from `init`.
pub fn color_refine(g: &Graph, init: &[usize], d: usize) -> Coloring {
    let mut c = canonicalize(init);
    for _ in 0..d {
        c = refine_round(g, &c, false);
    }
    c
}

/// Colorings of rounds `0..=r` where `r` is the first round whose partition
/// equals the next one, or `max_rounds`.
fn refine_until_stable(g: &Graph, max_rounds: usize, as_set: bool) -> (Vec<Coloring>, usize) {
    let mut rounds = vec![label_coloring(g)];
    loop {
        let r = rounds.len() - 1;
        if r >= max_rounds {
            return (rounds, r);
        }
        let next = refine_round(g, &rounds[r], as_set);
        if next == rounds[r] {
            return (rounds, r);
        }
        rounds.push(next);
    }
}

/// Colors of the point per round up to stabilization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrSignature {
    pub colors: Vec<usize>,
    /// First round whose partition no longer changes.
    pub stable_round: usize,
}

pub fn cr_signature(g: &PointedGraph, max_rounds: usize) -> CrSignature {
    let (rounds, stable_round) = refine_until_stable(&g.graph, max_rounds, false);
    CrSignature { colors: rounds.iter().map(|c| c[g.point]).collect(), stable_round }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Rounds {
    Exactly(usize),
    Full,
}

fn union_of(g: &PointedGraph, h: &PointedGraph) -> (Graph, usize, usize) {
    let p = g.graph.prop_count().max(h.graph.prop_count());
    let u = disjoint_union(&g.graph.with_prop_count(p), &h.graph.with_prop_count(p));
    (u, g.point, g.node_count() + h.point)
}

/// Whether the points get the same color in every compared round of joint
/// refinement on the disjoint union.
pub fn cr_equivalent(g: &PointedGraph, h: &PointedGraph, r: Rounds) -> bool {
    let (u, a, b) = union_of(g, h);
    match r {
        Rounds::Exactly(r) => {
            let mut c = label_coloring(&u);
            for _ in 0..r {
                if c[a] != c[b] {
                    return false;
                }
                c = refine_round(&u, &c, false);
            }
            c[a] == c[b]
        }
        Rounds::Full => {
            let (rounds, _) = refine_until_stable(&u, usize::MAX, false);
            rounds.iter().all(|c| c[a] == c[b])
        }
    }
}

/// Greatest bisimulation between `g` and `h`, if it relates the points.
pub fn bisimilar(g: &PointedGraph, h: &PointedGraph) -> Option<EquivalenceWitness> {
    let (u, a, b) = union_of(g, h);
    let (rounds, r) = refine_until_stable(&u, usize::MAX, true);
    let c = &rounds[r];
    if c[a] != c[b] {
        return None;
    }
    let n = g.node_count();
    let pairs = (0..n).flat_map(|x| (0..h.node_count()).filter(move |&y| c[x] == c[n + y]).map(move |y| (x, y)));
    Some(EquivalenceWitness::BisimRelation(pairs.collect()))
}

/// Checks label agreement plus the forth and back conditions.
pub fn verify_bisimulation(g: &Graph, h: &Graph, rel: &[(usize, usize)]) -> bool {
    let z: BTreeSet<(usize, usize)> = rel.iter().copied().collect();
    z.iter().all(|&(x, y)| {
        x < g.node_count()
            && y < h.node_count()
            && (1..=g.prop_count().max(h.prop_count()))
                .all(|p| (p <= g.prop_count() && g.label(x, p)) == (p <= h.prop_count() && h.label(y, p)))
            && g.neighbors(x).iter().all(|&x2| h.neighbors(y).iter().any(|&y2| z.contains(&(x2, y2))))
            && h.neighbors(y).iter().all(|&y2| g.neighbors(x).iter().any(|&x2| z.contains(&(x2, y2))))
    })
}

/// Staged relations `Z_0 ⊇ Z_1 ⊇ ... ⊇ Z_r`; true iff `Z_r` relates the points.
pub fn r_bisimilar(g: &PointedGraph, h: &PointedGraph, r: usize) -> bool {
    let (gg, hh) = (&g.graph, &h.graph);
    let p = gg.prop_count().max(hh.prop_count());
    let (gl, hl) = (gg.with_prop_count(p), hh.with_prop_count(p));
    let (n, m) = (gg.node_count(), hh.node_count());
    let mut z: Vec<Vec<bool>> = (0..n).map(|x| (0..m).map(|y| gl.label_vec(x) == hl.label_vec(y)).collect()).collect();
    for _ in 0..r {
        let next = (0..n)
            .map(|x| {
                (0..m)
                    .map(|y| {
                        z[x][y]
                            && gg.neighbors(x).iter().all(|&x2| hh.neighbors(y).iter().any(|&y2| z[x2][y2]))
                            && hh.neighbors(y).iter().all(|&y2| gg.neighbors(x).iter().any(|&x2| z[x2][y2]))
                    })
                    .collect()
            })
            .collect();
        z = next;
    }
    z[g.point][h.point]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, Fixture};

    fn fx(f: Fixture) -> PointedGraph {
        builtin_graph(f).unwrap().pointed
    }

    fn classes(c: &[usize]) -> usize {
        c.iter().collect::<BTreeSet<_>>().len()
    }

    #[test]
    fn refine_examples() {
        let c6 = fx(Fixture::Cycle(6)).graph;
        for d in 0..4 {
            assert_eq!(classes(&color_refine(&c6, &label_coloring(&c6), d)), 1);
        }
        let s2 = fx(Fixture::Star(2)).graph;
        assert_eq!(color_refine(&s2, &label_coloring(&s2), 1), vec![0, 1, 1]);
        assert_eq!(color_refine(&s2, &[5, 3, 5], 0), vec![0, 1, 0]);
    }

    #[test]
    fn signatures() {
        let s = cr_signature(&fx(Fixture::SingleNode), 10);
        assert_eq!(s.stable_round, 0);
        let end = fx(Fixture::Path(3));
        let mid = PointedGraph::new(end.graph.clone(), 1).unwrap();
        assert!(cr_equivalent(&end, &mid, Rounds::Exactly(0)));
        assert!(!cr_equivalent(&end, &mid, Rounds::Exactly(1)));
        assert!(cr_equivalent(&fx(Fixture::Cycle(3)), &fx(Fixture::Cycle(6)), Rounds::Full));
        assert!(!cr_equivalent(&fx(Fixture::Star(1)), &fx(Fixture::Star(2)), Rounds::Exactly(1)));
    }

    #[test]
    fn bisim_examples() {
        let w = bisimilar(&fx(Fixture::Star(1)), &fx(Fixture::Star(2))).unwrap();
        let EquivalenceWitness::BisimRelation(rel) = w else { panic!() };
        assert!(verify_bisimulation(&fx(Fixture::Star(1)).graph, &fx(Fixture::Star(2)).graph, &rel));
        let e = fx(Fixture::Edge);
        assert!(bisimilar(&e, &PointedGraph::new(e.graph.clone(), 1).unwrap()).is_some());
        let p3mid = PointedGraph::new(fx(Fixture::Path(3)).graph, 1).unwrap();
        // every node of both graphs has a neighbor, so unlabeled they are bisimilar
        assert!(bisimilar(&fx(Fixture::Cycle(3)), &p3mid).is_some());
        assert!(bisimilar(&fx(Fixture::SingleNode), &fx(Fixture::Edge)).is_none());
        assert!(r_bisimilar(&fx(Fixture::SingleNode), &fx(Fixture::Edge), 0));
        assert!(!r_bisimilar(&fx(Fixture::SingleNode), &fx(Fixture::Edge), 1));
        let mut lab = fx(Fixture::Path(3)).graph.with_prop_count(1);
        lab.set_label(0, 1, true).unwrap();
        let lab = PointedGraph::new(lab, 1).unwrap();
        let c3 = PointedGraph::new(fx(Fixture::Cycle(3)).graph.with_prop_count(1), 0).unwrap();
        assert!(r_bisimilar(&c3, &lab, 0));
        assert!(!r_bisimilar(&c3, &lab, 1));
        assert!(bisimilar(&c3, &lab).is_none());
    }
}

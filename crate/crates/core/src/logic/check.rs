//! Direct semantics.

use std::collections::BTreeSet;

use super::{GmlFormula, LddlFormula, LddlProgram, LogicError};
use crate::graph::{Graph, PointedGraph};

fn check_props(g: &Graph, max_prop: usize) -> Result<(), LogicError> {
    if max_prop > g.prop_count() {
        return Err(LogicError::PropOutOfRange { index: max_prop, props: g.prop_count() });
    }
    Ok(())
}

/// Truth value of `f` at every node. Props must be in range.
pub fn sat_gml(g: &Graph, f: &GmlFormula) -> Vec<bool> {
    let n = g.node_count();
    match f {
        GmlFormula::Top => vec![true; n],
        GmlFormula::Prop(i) => (0..n).map(|v| g.label(v, *i)).collect(),
        GmlFormula::Not(a) => sat_gml(g, a).into_iter().map(|x| !x).collect(),
        GmlFormula::And(a, b) => sat_gml(g, a).into_iter().zip(sat_gml(g, b)).map(|(x, y)| x && y).collect(),
        GmlFormula::Or(a, b) => sat_gml(g, a).into_iter().zip(sat_gml(g, b)).map(|(x, y)| x || y).collect(),
        GmlFormula::DiamondGeq(k, a) => {
            let s = sat_gml(g, a);
            (0..n).map(|v| g.neighbors(v).iter().filter(|&&u| s[u]).count() >= *k).collect()
        }
    }
}

pub fn modelcheck_gml(g: &PointedGraph, f: &GmlFormula) -> Result<bool, LogicError> {
    check_props(&g.graph, f.max_prop())?;
    Ok(sat_gml(&g.graph, f)[g.point])
}

/// Relation as an adjacency matrix.
fn relation(g: &Graph, p: &LddlProgram) -> Vec<Vec<bool>> {
    let n = g.node_count();
    match p {
        LddlProgram::Step => (0..n).map(|u| (0..n).map(|v| g.has_edge(u, v)).collect()).collect(),
        LddlProgram::Test(f) => {
            let s = sat_lddl(g, f);
            (0..n).map(|u| (0..n).map(|v| u == v && s[u]).collect()).collect()
        }
        LddlProgram::Seq(a, b) => {
            let (ra, rb) = (relation(g, a), relation(g, b));
            (0..n).map(|u| (0..n).map(|w| (0..n).any(|v| ra[u][v] && rb[v][w])).collect()).collect()
        }
        LddlProgram::Union(a, b) => {
            let (ra, rb) = (relation(g, a), relation(g, b));
            (0..n).map(|u| (0..n).map(|v| ra[u][v] || rb[u][v]).collect()).collect()
        }
    }
}

/// All pairs `(u, v)` such that `v` is a `p`-successor of `u`.
pub fn program_relation(g: &Graph, p: &LddlProgram) -> BTreeSet<(usize, usize)> {
    let r = relation(g, p);
    let mut out = BTreeSet::new();
    for (u, row) in r.iter().enumerate() {
        for (v, &x) in row.iter().enumerate() {
            if x {
                out.insert((u, v));
            }
        }
    }
    out
}

pub fn sat_lddl(g: &Graph, f: &LddlFormula) -> Vec<bool> {
    let n = g.node_count();
    let succ_count = |p: &LddlProgram, a: &LddlFormula| -> Vec<usize> {
        let (r, s) = (relation(g, p), sat_lddl(g, a));
        (0..n).map(|u| (0..n).filter(|&v| r[u][v] && s[v]).count()).collect()
    };
    match f {
        LddlFormula::Top => vec![true; n],
        LddlFormula::Prop(i) => (0..n).map(|v| g.label(v, *i)).collect(),
        LddlFormula::Not(a) => sat_lddl(g, a).into_iter().map(|x| !x).collect(),
        LddlFormula::And(a, b) => sat_lddl(g, a).into_iter().zip(sat_lddl(g, b)).map(|(x, y)| x && y).collect(),
        LddlFormula::Or(a, b) => sat_lddl(g, a).into_iter().zip(sat_lddl(g, b)).map(|(x, y)| x || y).collect(),
        LddlFormula::Diamond(p, a) => succ_count(p, a).into_iter().map(|c| c >= 1).collect(),
        LddlFormula::Unique(p, a) => succ_count(p, a).into_iter().map(|c| c == 1).collect(),
        LddlFormula::Box(p, a) => {
            let (r, s) = (relation(g, p), sat_lddl(g, a));
            (0..n).map(|u| (0..n).all(|v| !r[u][v] || s[v])).collect()
        }
    }
}

pub fn modelcheck_lddl(g: &PointedGraph, f: &LddlFormula) -> Result<bool, LogicError> {
    check_props(&g.graph, f.max_prop())?;
    Ok(sat_lddl(&g.graph, f)[g.point])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, Fixture};
    use crate::logic::{parse_gml, parse_lddl};

    fn fx(f: Fixture) -> PointedGraph {
        builtin_graph(f).unwrap().pointed
    }

    #[test]
    fn gml_examples() {
        let mut g = Graph::new(2, 1);
        g.add_edge(0, 1).unwrap();
        g.set_label(1, 1, true).unwrap();
        let pg = PointedGraph::new(g, 0).unwrap();
        assert!(modelcheck_gml(&pg, &parse_gml("<>p1").unwrap()).unwrap());
        let two = parse_gml("<>{>=2}top").unwrap();
        assert!(!modelcheck_gml(&fx(Fixture::Star(1)), &two).unwrap());
        assert!(modelcheck_gml(&fx(Fixture::Star(2)), &two).unwrap());
        assert!(modelcheck_gml(&fx(Fixture::Star(0)), &parse_gml("p1").unwrap()).is_err());
    }

    #[test]
    fn relations() {
        let e = fx(Fixture::Edge).graph;
        assert_eq!(program_relation(&e, &LddlProgram::Step), [(0, 1), (1, 0)].into_iter().collect());
        assert_eq!(program_relation(&e, &LddlProgram::stay()), [(0, 0), (1, 1)].into_iter().collect());
        let p3 = fx(Fixture::Path(3)).graph;
        let two = LddlProgram::Step.seq(LddlProgram::Step);
        let expect: BTreeSet<_> = [(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)].into_iter().collect();
        assert_eq!(program_relation(&p3, &two), expect);
    }

    #[test]
    fn lddl_examples() {
        let mut p3 = fx(Fixture::Path(3)).graph.with_prop_count(1);
        p3.set_label(2, 1, true).unwrap();
        let pg = PointedGraph::new(p3, 0).unwrap();
        assert!(modelcheck_lddl(&pg, &parse_lddl("<step;step>=1 p1").unwrap()).unwrap());
        assert!(modelcheck_lddl(&fx(Fixture::Cycle(4)), &parse_lddl("<stay>top").unwrap()).unwrap());
        let uniq = parse_lddl("<step>=1 top").unwrap();
        assert!(!modelcheck_lddl(&fx(Fixture::Star(2)), &uniq).unwrap());
        assert!(modelcheck_lddl(&fx(Fixture::Star(1)), &uniq).unwrap());
    }

    #[test]
    fn unique_is_not_monotone() {
        let uniq = parse_lddl("<step>=1 top").unwrap();
        let mut g = Graph::new(3, 0);
        g.add_edge(0, 1).unwrap();
        assert!(modelcheck_lddl(&PointedGraph::new(g.clone(), 0).unwrap(), &uniq).unwrap());
        g.add_edge(0, 2).unwrap();
        assert!(!modelcheck_lddl(&PointedGraph::new(g, 0).unwrap(), &uniq).unwrap());
    }
}

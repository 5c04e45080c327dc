//! Classifiers separating two addresses: each address is a list of GML
//! formulas read along walks from the point.

use std::fmt;
use std::str::FromStr;

use super::logic::{compile_gml_localsum, DEFAULT_SIGMOID_SCALE};
use super::{zero, CompileError};
use crate::feature::{Feature, GnnClassifier, Policy};
use crate::graph::PointedGraph;
use crate::logic::{parse_gml, sat_gml, GmlFormula};
use crate::rational::Rational;
use crate::scalar::Mode;

/// How the addressed node's key travels back to the point.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum AddressMode {
    /// Keys encoded as `sigmoid(val / 1000)`, evaluated in floating point.
    Sigmoid,
    /// Raw keys with `IfPos` gating, evaluated exactly.
    Semilinear,
}

impl fmt::Display for AddressMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AddressMode::Sigmoid => "sigmoid",
            AddressMode::Semilinear => "semilinear",
        })
    }
}

impl FromStr for AddressMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sigmoid" => Ok(AddressMode::Sigmoid),
            "semilinear" => Ok(AddressMode::Semilinear),
            _ => Err(format!("unknown address mode `{s}`")),
        }
    }
}

/// Number of walks `v0 = point, v1, ..., vn` with `vi ⊨ addr[i-1]`, per
/// endpoint. Returns the endpoint when there is exactly one such walk.
pub fn address_endpoint(g: &PointedGraph, addr: &[GmlFormula]) -> Option<usize> {
    let n = g.graph.node_count();
    let mut count = vec![0u64; n];
    count[g.point] = 1;
    for phi in addr {
        let sat = sat_gml(&g.graph, phi);
        let mut next = vec![0u64; n];
        for u in 0..n {
            if count[u] == 0 {
                continue;
            }
            for &w in g.graph.neighbors(u) {
                if sat[w] {
                    next[w] += count[u];
                }
            }
        }
        count = next;
    }
    let total: u64 = count.iter().sum();
    (total == 1).then(|| count.iter().position(|&c| c == 1).unwrap())
}

/// Semantic oracle: both addresses have a single walk and they end at
/// different nodes.
pub fn unique_address_query(g: &PointedGraph, addr1: &[GmlFormula], addr2: &[GmlFormula]) -> bool {
    match (address_endpoint(g, addr1), address_endpoint(g, addr2)) {
        (Some(a), Some(b)) => a != b,
        _ => false,
    }
}

/// Parses `f1, f2, ... / g1, g2, ...` into two addresses.
pub fn parse_address_pair(text: &str) -> Result<(Vec<GmlFormula>, Vec<GmlFormula>), String> {
    let (a, b) = text.split_once('/').ok_or("expected two addresses separated by `/`")?;
    let list = |s: &str| {
        s.split(',').map(|f| parse_gml(f.trim()).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()
    };
    Ok((list(a)?, list(b)?))
}

/// GML formula true at a node with exactly one walk matching `addr`.
fn single_walk(addr: &[GmlFormula]) -> GmlFormula {
    // (some walk, exactly one walk) for each suffix
    let mut some = GmlFormula::Top;
    let mut one = GmlFormula::Top;
    for phi in addr.iter().rev() {
        let any = phi.clone().and(some.clone());
        let exact = phi.clone().and(one);
        one = GmlFormula::diamond(exact).and(GmlFormula::diamond_geq(2, any.clone()).not());
        some = GmlFormula::diamond(any);
    }
    one
}

fn address_key(addr: &[GmlFormula], mode: AddressMode) -> Feature {
    let holds: Vec<Feature> = addr.iter().map(|f| compile_gml_localsum(f).expr).collect();
    let last = holds.last().unwrap();
    let mut key = match mode {
        AddressMode::Sigmoid => {
            let (n, d) = DEFAULT_SIGMOID_SCALE;
            let s = Feature::val().scale(Rational::new(n, d), 0).sigmoid();
            (&s + last).plus_const(-1).relu()
        }
        AddressMode::Semilinear => Feature::if_pos(last, &Feature::val(), &zero()),
    };
    for h in holds[..holds.len() - 1].iter().rev() {
        let incoming = key.local_sum();
        key = match mode {
            AddressMode::Sigmoid => Feature::min(&incoming, h),
            AddressMode::Semilinear => Feature::if_pos(h, &incoming, &zero()),
        };
    }
    key.local_sum()
}

/// Accepts exactly when both addresses pick out a single walk from the point
/// and the two walks end at different nodes. Keys must be injective.
pub fn compile_unique_address(
    addr1: &[GmlFormula],
    addr2: &[GmlFormula],
    mode: AddressMode,
) -> Result<GnnClassifier, CompileError> {
    if addr1.is_empty() || addr2.is_empty() {
        return Err(CompileError::EmptyAddress);
    }
    let guard = compile_gml_localsum(&single_walk(addr1).and(single_walk(addr2))).expr;
    let diff = (&address_key(addr1, mode) - &address_key(addr2, mode)).abs().clip01();
    let expr = Feature::sum(&[diff, guard], -1);
    let fmt_addr = |a: &[GmlFormula]| a.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ");
    let float = mode == AddressMode::Sigmoid;
    Ok(GnnClassifier::new(expr, Policy::PosNonpos, if float { Mode::Float } else { Mode::Exact })
        .expect("valid for mode")
        .with_meta(format!("uniqaddr_localsum_{mode}: [{}] / [{}]", fmt_addr(addr1), fmt_addr(addr2))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::classify;
    use crate::graph::{builtin_graph, enumerate_pointed_graphs, random_keying, Fixture, PointedKeyedGraph};
    use crate::logic::modelcheck_gml;

    fn labeled_cycle(n: usize, p: &[usize]) -> PointedGraph {
        let mut g = builtin_graph(Fixture::Cycle(n)).unwrap().pointed;
        g.graph = g.graph.with_prop_count(1);
        for &v in p {
            g.graph.set_label(v, 1, true).unwrap();
        }
        g
    }

    fn addr(xs: &[&str]) -> Vec<GmlFormula> {
        xs.iter().map(|x| parse_gml(x).unwrap()).collect()
    }

    #[test]
    fn cycle_examples() {
        let (a, b) = parse_address_pair("p1 / top, p1").unwrap();
        assert_eq!(b, addr(&["top", "p1"]));
        let c6 = labeled_cycle(6, &[1, 4]);
        let c3 = labeled_cycle(3, &[1]);
        assert!(unique_address_query(&c6, &a, &b));
        assert!(!unique_address_query(&c3, &a, &b));
        for mode in [AddressMode::Sigmoid, AddressMode::Semilinear] {
            let c = compile_unique_address(&a, &b, mode).unwrap();
            for s in 0..5 {
                let k6 = PointedKeyedGraph::new(c6.clone(), Some(random_keying(&c6.graph, s))).unwrap();
                let k3 = PointedKeyedGraph::new(c3.clone(), Some(random_keying(&c3.graph, s))).unwrap();
                assert!(classify(&c, &k6).unwrap().accept);
                assert!(!classify(&c, &k3).unwrap().accept);
            }
        }
        assert!(compile_unique_address(&[], &b, AddressMode::Sigmoid).is_err());
    }

    #[test]
    fn guard_formula_counts_walks() {
        let a = addr(&["top", "~p1"]);
        let guard = single_walk(&a);
        for g in enumerate_pointed_graphs(4, 1, false).unwrap() {
            assert_eq!(modelcheck_gml(&g, &guard).unwrap(), address_endpoint(&g, &a).is_some());
        }
    }

    #[test]
    fn identical_addresses_reject() {
        let a = addr(&["p1"]);
        for mode in [AddressMode::Sigmoid, AddressMode::Semilinear] {
            let c = compile_unique_address(&a, &a, mode).unwrap();
            for g in enumerate_pointed_graphs(3, 1, true).unwrap() {
                let k = PointedKeyedGraph::new(g.clone(), Some(random_keying(&g.graph, 7))).unwrap();
                assert!(!classify(&c, &k).unwrap().accept);
            }
        }
    }
}

//! Named graph fixtures.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Graph, PointedGraph, PointedKeyedGraph};

/// Largest size parameter accepted by [`builtin_graph`].
pub const MAX_FIXTURE_SIZE: usize = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fixture {
    Cycle(usize),
    /// Path on `n` nodes, pointed at an end.
    Path(usize),
    /// Center plus `k` leaves, pointed at the center.
    Star(usize),
    /// Triangle with only node 1 labeled `p1`, pointed at node 0.
    TriangleP,
    SingleNode,
    Complete(usize),
    /// Two nodes joined by an edge (same as `path(2)`).
    Edge,
    /// Two isolated nodes.
    TwoIsolated,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("cycle needs at least 3 nodes")]
    CycleTooShort,
    #[error("size {0} outside 1..={MAX_FIXTURE_SIZE}")]
    Size(usize),
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::Cycle(n) => write!(f, "cycle({n})"),
            Fixture::Path(n) => write!(f, "path({n})"),
            Fixture::Star(k) => write!(f, "star({k})"),
            Fixture::TriangleP => f.write_str("triangle_p"),
            Fixture::SingleNode => f.write_str("single_node"),
            Fixture::Complete(n) => write!(f, "complete({n})"),
            Fixture::Edge => f.write_str("edge"),
            Fixture::TwoIsolated => f.write_str("two_isolated"),
        }
    }
}

impl FromStr for Fixture {
    type Err = FixtureError;

    /// Accepts `cycle(5)`, `cycle5`, `star(2)`, `triangle_p`, ...
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || FixtureError::Unknown(s.to_string());
        let split = s.find(|c: char| c == '(' || c.is_ascii_digit());
        let (name, arg) = match split {
            Some(i) => {
                let rest = s[i..].trim_start_matches('(').trim_end_matches(')');
                (&s[..i], Some(rest.parse::<usize>().map_err(|_| unknown())?))
            }
            None => (s, None),
        };
        Ok(match (name, arg) {
            ("cycle", Some(n)) => Fixture::Cycle(n),
            ("path", Some(n)) => Fixture::Path(n),
            ("star", Some(k)) => Fixture::Star(k),
            ("complete", Some(n)) => Fixture::Complete(n),
            ("triangle_p", None) => Fixture::TriangleP,
            ("single_node", None) => Fixture::SingleNode,
            ("edge", None) => Fixture::Edge,
            ("two_isolated", None) => Fixture::TwoIsolated,
            _ => return Err(unknown()),
        })
    }
}

fn sized(n: usize, min: usize) -> Result<usize, FixtureError> {
    if n < min || n > MAX_FIXTURE_SIZE {
        Err(FixtureError::Size(n))
    } else {
        Ok(n)
    }
}

/// Builds a fixture, unkeyed and pointed at node 0.
pub fn builtin_graph(f: Fixture) -> Result<PointedKeyedGraph, FixtureError> {
    let g = match f {
        Fixture::Cycle(n) => {
            if n < 3 {
                return Err(FixtureError::CycleTooShort);
            }
            let n = sized(n, 3)?;
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, 0, &edges).unwrap()
        }
        Fixture::Path(n) => {
            let n = sized(n, 1)?;
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, 0, &edges).unwrap()
        }
        Fixture::Star(k) => {
            let k = if k == 0 { 0 } else { sized(k, 1)? };
            let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
            Graph::from_edges(k + 1, 0, &edges).unwrap()
        }
        Fixture::TriangleP => {
            let mut g = Graph::from_edges(3, 1, &[(0, 1), (1, 2), (0, 2)]).unwrap();
            g.set_label(1, 1, true).unwrap();
            g
        }
        Fixture::SingleNode => Graph::new(1, 0),
        Fixture::Complete(n) => {
            let n = sized(n, 1)?;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
            Graph::from_edges(n, 0, &edges).unwrap()
        }
        Fixture::Edge => Graph::from_edges(2, 0, &[(0, 1)]).unwrap(),
        Fixture::TwoIsolated => Graph::new(2, 0),
    };
    Ok(PointedGraph { graph: g, point: 0 }.unkeyed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let c3 = builtin_graph(Fixture::Cycle(3)).unwrap();
        assert_eq!((c3.graph().node_count(), c3.graph().edge_count()), (3, 3));
        let t = builtin_graph(Fixture::TriangleP).unwrap();
        assert!(t.graph().label(1, 1) && !t.graph().label(0, 1) && !t.graph().label(2, 1));
        assert_eq!(t.point(), 0);
        let s = builtin_graph(Fixture::Star(2)).unwrap();
        assert_eq!(s.graph().degree(0), 2);
        assert_eq!(builtin_graph(Fixture::Star(0)).unwrap().graph().node_count(), 1);
        assert_eq!(builtin_graph(Fixture::Cycle(2)), Err(FixtureError::CycleTooShort));
        assert!(builtin_graph(Fixture::Path(0)).is_err());
    }

    #[test]
    fn names_parse() {
        for f in [Fixture::Cycle(5), Fixture::Star(0), Fixture::TriangleP, Fixture::Path(3), Fixture::TwoIsolated] {
            assert_eq!(f.to_string().parse::<Fixture>().unwrap(), f);
        }
        assert_eq!("cycle4".parse::<Fixture>().unwrap(), Fixture::Cycle(4));
        assert!("hexagon".parse::<Fixture>().is_err());
    }
}

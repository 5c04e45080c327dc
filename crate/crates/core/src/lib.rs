//! Executable logic-to-GNN constructions over small keyed graphs.
//!
//! The crate evaluates GNN feature expressions over pointed, optionally keyed
//! graphs, compiles modal, graded and dynamic logics into classifiers, and
//! checks every construction against brute-force oracles on enumerated graphs.

pub mod compile;
pub mod equiv;
pub mod feature;
pub mod graph;
pub mod logic;
pub mod rational;
pub mod scalar;
pub mod workbench;

pub use rational::Rational;
pub use scalar::{Mode, Scalar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/scalar.md")]
    mod scalar {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/logics.md")]
    mod logics {}
    #[doc = include_str!("../../../book/src/compilers.md")]
    mod compilers {}
    #[doc = include_str!("../../../book/src/equivalence.md")]
    mod equivalence {}
    #[doc = include_str!("../../../book/src/workbench.md")]
    mod workbench {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

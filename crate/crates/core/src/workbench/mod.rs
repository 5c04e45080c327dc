//! Falsification harness, oracle suites and separation reports.

mod invariance;
mod oracle;
mod separation;

pub use invariance::{test_key_invariance, test_key_invariance_on, InvarianceReport, InvarianceVerdict};
pub use oracle::{corpus_classifiers, oracle_agreement, CorpusItem, CorpusSpec, Mismatch, MismatchKind, OracleError, OracleReport};
pub use separation::{separation_report, Assertion, SeparationReport, SEPARATION_REPORTS};

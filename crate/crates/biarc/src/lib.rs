//! Certifying toolkit for bi-arc digraphs.
//!
//! A digraph has a *min ordering* (equivalently, a conservative semilattice
//! polymorphism) exactly when no strong component of its pair digraph
//! contains a circuit. This crate builds the pair digraph, searches for
//! circuit obstructions, constructs verified min orderings and their
//! geometric bi-arc representations, generalizes to k-min orderings, derives
//! conservative polymorphisms, and ships independent brute-force oracles for
//! cross-checking every verdict at desk scale.
//!
//! Every positive answer is re-verified before it is returned; a failed
//! verification surfaces as [`Error::Internal`], never as a silent wrong
//! answer.

pub mod digraph;
pub mod gen;
#[cfg(test)]
pub(crate) mod testutil;
pub mod json;
pub mod obstruction;
pub mod oracle;
pub mod ordering;
pub mod pair;
pub mod poly;
pub mod represent;
pub mod walk;

pub use digraph::{CkLabeling, Digraph};
pub use gen::{gen_random_digraph, GenFlags};
pub use obstruction::{find_component_circuit, find_invertible_pair, verify_circuit, Circuit};
pub use ordering::{
    build_k_min_ordering, build_min_ordering, extremal_pairs, find_source, find_transitive_source,
    verify_k_min_ordering, verify_min_ordering, KMinAttempt, KMinFailure, KMinRecognition,
    RecognitionResult,
};
pub use pair::{
    build_pair_digraph, classify_balance, compute_levels, dual_component, restrict_to_hk,
    strong_components, PairDigraph, SccInfo,
};
pub use poly::{
    build_cc_polymorphism, min_to_set_polymorphism, verify_cc_polymorphism,
    verify_set_polymorphism, BinaryTable, SetTable,
};
pub use represent::{
    build_arc_representation, build_k_arc_representation, order_from_representation,
    verify_arc_representation, ArcRepresentation, CircArc,
};
pub use walk::{avoids, common_preimage, is_congruent, is_constricted, ConstrictionSide, PreimageTemplate, Step, Walk};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A brute-force oracle refused to run because the instance exceeds its
    /// size guard. The message carries the bound.
    #[error("oracle refused: {0}")]
    OracleRefused(String),
    /// An internal consistency check failed. This indicates a bug, never a
    /// property of the input.
    #[error("internal error: {0}")]
    Internal(String),
}

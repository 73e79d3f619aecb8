//! Associative reasoning over large clause knowledge bases.
//!
//! The crate combines a symbolic core with distributional semantics:
//!
//! - [`kb`] parses triple dumps and clause files into an indexed,
//!   range-restricted first-order knowledge base.
//! - [`embed`] loads word-vector files and answers cosine similarity and
//!   nearest-neighbour queries.
//! - [`select`] picks context-relevant axioms by symbol triggering plus an
//!   embedding-similarity filter.
//! - [`reasoner`] is a hypertableau-style forward reasoner whose open
//!   branches are (partial) interpretations.
//! - [`wander`] iterates select → reason → cluster → refocus into
//!   mind-wandering chains and scores them against sentences.
//! - [`creativity`] ranks remote-association answer candidates by mean-vector
//!   similarity and a variance-adjusted score.

pub mod creativity;
pub mod embed;
pub mod kb;
pub mod reasoner;
pub mod select;
pub mod wander;

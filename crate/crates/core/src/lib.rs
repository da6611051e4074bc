//! Language evolution trees from time-labelled corpora.
//!
//! The pipeline is: tokenize each corpus and count word frequencies
//! ([`corpus`]), pick the high-frequency words shared by every corpus
//! ([`vocab`]), train a skip-gram embedding per corpus ([`embedding`]),
//! concatenate the shared words' vectors into one vector per corpus and
//! compare corpora by `1 - cosine` ([`geometry`]), then cluster the
//! resulting distance matrix into a dendrogram ([`cluster`]).
//!
//! [`synth`] produces seeded corpora with a known drift over time so the
//! whole chain can be checked end to end without external texts.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, manifests and
//! the command line live in the `langtree` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cluster;
pub mod corpus;
pub mod embedding;
pub mod geometry;
pub mod seed;
pub mod synth;
pub mod vocab;

pub use cluster::{
    agglomerate, cophenetic, cut, temporal_consistency, ConsistencyPair, ConsistencyReport,
    Dendrogram, Linkage, Merge, NodeRef,
};
pub use corpus::{
    count_frequencies, decode, tokenize, Encoding, FrequencyTable, TokenStream, TokenizerConfig,
};
pub use embedding::{sgns_gradient, train_embedding, EmbeddingModel, Label, TrainConfig};
pub use geometry::{
    combine, cosine_similarity, distance_matrix, matrix_delta, CombinedVector, DistanceMatrix,
    MatrixDelta,
};
pub use synth::{generate, DriftModel, DriftSpec, SynthCorpus};
pub use vocab::{select_shared_vocab, SelectionRule, SharedVocabulary};

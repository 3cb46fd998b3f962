//! Core algorithms for disambiguating homonym author names with co-authorship
//! networks.
//!
//! The crate is `no_std` (it only needs `alloc`) and contains no IO. Parsing of
//! bibliographic dumps, file formats and the command-line pipeline live in the
//! `namesake` crate.
//!
//! The moving parts, in pipeline order:
//!
//! - [`mention`]: author mentions with their optional 4-digit disambiguation
//!   suffix, and publication records.
//! - [`gold`]: gold standard extraction from suffixed names, homonym blocks and
//!   seeded block sampling.
//! - [`graph`]: the bipartite author/publication network with bounded
//!   shortest-path queries that skip the block's own name.
//! - [`cluster`]: pairwise threshold comparison with union-find merging.
//! - [`community`]: the weighted publication similarity graph, modularity and
//!   Louvain refinement of over-merged blocks.
//! - [`bcubed`]: BCubed precision, recall and F at item, block and corpus level.
//! - [`synth`]: a seeded generator of planted-author corpora for desk-scale
//!   experiments.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bcubed;
pub mod cluster;
pub mod community;
mod error;
pub mod gold;
pub mod graph;
pub mod mention;
pub mod synth;

pub use bcubed::{block_scores, corpus_scores, item_scores, BcubedScores, EvalConfig, FMode};
pub use cluster::{cluster_block, count_comparisons, Clustering, DisjointSet};
pub use community::{
    build_similarity_graph, louvain, modularity, refine_clustering, LouvainConfig, Partition,
    WeightedPubGraph,
};
pub use error::{Error, Result};
pub use gold::{build_blocks, build_gold_standard, sample_blocks, Block, BlockSet, GoldStandard};
pub use graph::{BipartiteGraph, PubDistance};
pub use mention::{parse_mention, AuthorMention, RawRecord, RecordKind};

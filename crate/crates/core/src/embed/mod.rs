//! Embedding pruned cut-off trees into `G(n, p)` and completing them into
//! explicit acquisition protocols.

mod embedding;
mod matching;
mod pipeline;

pub use embedding::{
    embed_forest, EmbedFailure, Embedding, ExposureOracle, ForestEmbedding, Stage,
};
pub use matching::{max_bipartite_matching, Matching};
pub use pipeline::{
    multi_root_pipeline, multi_root_pipeline_on, pipeline_tree, witness_pipeline,
    witness_pipeline_on, witness_pipeline_with_graph, Outcome, PipelineReport,
};

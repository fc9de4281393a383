//! The total acquisition game on graphs.
//!
//! Each vertex starts with one unit of weight; a vertex may ship its entire
//! weight to a neighbour holding at least as much. `a_t(G)` is the fewest
//! vertices that can be left holding weight once no move remains.
//!
//! The crate provides the game engine ([`acquisition`], [`exact`],
//! [`greedy`]), certified lower bounds ([`bounds`]), the recursive cut-off
//! trees used to build `a_t = 1` witnesses ([`cutoff`]), the embedding of
//! those trees into `G(n, p)` ([`embed`]) and the Monte Carlo harness
//! ([`experiments`]).

pub mod acquisition;
pub mod bounds;
pub mod cutoff;
pub mod embed;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod graph;
pub mod greedy;
pub mod random;
pub mod sample;

pub use acquisition::{
    apply_move, legal_moves, verify_protocol, Move, Protocol, ResidualReport, WeightState,
};
pub use error::{Error, Result};
pub use graph::{Graph, Vertex};
pub use random::{mix_seed, RandomSource};
pub use sample::{sample_gnp, sample_random_tree, Probability};

//! Cut-off trees: the integer sequences that size them, their construction,
//! pruning, verification and the root-acquisition protocol.

mod params;
mod sequence;
mod tree;
mod warmup;

pub use params::{default_sigma, ParamSet};
pub use sequence::{
    base_cap, calibrate, choose_depth, extend_sequences, i_star, lift_caps, multi_root_table,
    SequenceTable,
};
pub use tree::{
    build_tree, check_absorbable, check_cutoff, check_cutoff_sizes, extract_protocol,
    prune_bereft, CutoffTree, Node, Role,
};
pub use warmup::warmup_tree;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutoffError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// `c_j - i*(rho_j) - sigma < 1` at step `j` (1-based).
    #[error("sequence degenerate at step {0}")]
    SequenceDegenerate(usize),
    #[error("calibration diverged: c_{j} reached {value}")]
    CalibrationDiverged { j: usize, value: u64 },
    #[error("depth 1 cannot reach the target size")]
    CalibrationImpossible,
    #[error("cannot host exact subtree of weight {weight} under cap {cap} at level {level}")]
    ConstructionFailure { weight: u64, cap: u64, level: u32 },
    #[error("tree protocol broke at node {node}: {msg}")]
    ProtocolBug { node: usize, msg: String },
    #[error("bad tree record on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

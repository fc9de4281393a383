//! The total-acquisition game: weight states, moves, protocol replay.
//!
//! Every vertex starts with weight 1. A move `v -> u` along an edge ships all
//! of `v`'s weight to `u`, and is legal only while `w(u) >= w(v) >= 1`.
//! A vertex that has been emptied can never receive again, so the set of
//! live vertices only shrinks.

use std::fmt;
use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightState {
    weights: Vec<u64>,
}

impl WeightState {
    /// The starting position: weight 1 everywhere.
    pub fn all_ones(n: usize) -> Self {
        Self {
            weights: vec![1; n],
        }
    }

    pub fn from_weights(weights: Vec<u64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, v: Vertex) -> u64 {
        self.weights[v]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn positive_vertices(&self) -> Vec<Vertex> {
        (0..self.len()).filter(|&v| self.weights[v] > 0).collect()
    }

    pub fn positive_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0).count()
    }

    /// Applies a move that the caller has already checked.
    pub(crate) fn transfer(&mut self, m: Move) {
        let w = std::mem::take(&mut self.weights[m.from]);
        self.weights[m.to] += w;
    }
}

/// A total acquisition move `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: Vertex,
    pub to: Vertex,
}

impl Move {
    pub fn new(from: Vertex, to: Vertex) -> Self {
        Self { from, to }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// Why a move could not be played.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("vertex out of range")]
    OutOfRange,
    #[error("{0} is not an edge")]
    NotAnEdge(Move),
    #[error("sender of {0} has weight 0")]
    ZeroSender(Move),
    #[error("receiver of {mv} is too light ({receiver} < {sender})")]
    ReceiverTooLight { mv: Move, sender: u64, receiver: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcquisitionError {
    #[error("weight vector has {got} entries, graph has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
    #[error("move {index} is illegal: {reason}")]
    VerificationFailure { index: usize, reason: MoveError },
}

/// An ordered list of moves, replayed from the all-ones state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Protocol {
    pub moves: Vec<Move>,
}

impl Protocol {
    pub fn new(moves: Vec<Move>) -> Self {
        Self { moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// One `"u v"` line per move (`u` sends to `v`).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.moves {
            writeln!(s, "{} {}", m.from, m.to).unwrap();
        }
        s
    }

    pub fn read_text<R: BufRead>(reader: R) -> crate::error::Result<Self> {
        let mut moves = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let bad = || crate::error::Error::Parse {
                line: i + 1,
                msg: format!("expected \"u v\", got {t:?}"),
            };
            let mut it = t.split_whitespace();
            let from = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let to = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            moves.push(Move { from, to });
        }
        Ok(Self { moves })
    }
}

/// Result of replaying a protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualReport {
    /// Vertices still holding weight, ascending.
    pub residual: Vec<Vertex>,
    pub residual_size: usize,
    /// No legal move remains in the final state.
    pub maximal: bool,
    pub final_state: WeightState,
}

fn check_size(g: &Graph, s: &WeightState) -> Result<(), AcquisitionError> {
    if s.len() != g.n() {
        return Err(AcquisitionError::SizeMismatch {
            expected: g.n(),
            got: s.len(),
        });
    }
    Ok(())
}

pub fn check_move(g: &Graph, s: &WeightState, m: Move) -> Result<(), MoveError> {
    if m.from >= g.n() || m.to >= g.n() {
        return Err(MoveError::OutOfRange);
    }
    if !g.has_edge(m.from, m.to) {
        return Err(MoveError::NotAnEdge(m));
    }
    let (sender, receiver) = (s.weight(m.from), s.weight(m.to));
    if sender == 0 {
        return Err(MoveError::ZeroSender(m));
    }
    if receiver < sender {
        return Err(MoveError::ReceiverTooLight {
            mv: m,
            sender,
            receiver,
        });
    }
    Ok(())
}

/// All legal moves, sorted by `(from, to)`.
pub fn legal_moves(g: &Graph, s: &WeightState) -> Result<Vec<Move>, AcquisitionError> {
    check_size(g, s)?;
    Ok(legal_moves_unchecked(g, s.weights()))
}

pub(crate) fn legal_moves_unchecked(g: &Graph, w: &[u64]) -> Vec<Move> {
    let mut out = Vec::new();
    for from in 0..g.n() {
        if w[from] == 0 {
            continue;
        }
        for &to in g.neighbors(from) {
            if w[to] >= w[from] {
                out.push(Move { from, to });
            }
        }
    }
    out
}

pub(crate) fn has_legal_move(g: &Graph, w: &[u64]) -> bool {
    g.edges().any(|(u, v)| {
        let (a, b) = (w[u], w[v]);
        a > 0 && b > 0
    })
}

/// True when no legal move remains. Any edge between two live vertices
/// admits a move from the lighter to the heavier endpoint.
pub fn is_maximal(g: &Graph, s: &WeightState) -> bool {
    !has_legal_move(g, s.weights())
}

pub fn apply_move(g: &Graph, s: &WeightState, m: Move) -> Result<WeightState, MoveError> {
    if s.len() != g.n() {
        return Err(MoveError::OutOfRange);
    }
    check_move(g, s, m)?;
    let mut next = s.clone();
    next.transfer(m);
    Ok(next)
}

/// Replays `p` from the all-ones state, stopping at the first illegal move.
pub fn verify_protocol(g: &Graph, p: &Protocol) -> Result<ResidualReport, AcquisitionError> {
    let mut s = WeightState::all_ones(g.n());
    for (index, &m) in p.moves.iter().enumerate() {
        check_move(g, &s, m)
            .map_err(|reason| AcquisitionError::VerificationFailure { index, reason })?;
        s.transfer(m);
    }
    let residual = s.positive_vertices();
    Ok(ResidualReport {
        residual_size: residual.len(),
        residual,
        maximal: is_maximal(g, &s),
        final_state: s,
    })
}

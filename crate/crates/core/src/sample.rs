//! Random graph and random tree samplers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::random::RandomSource;

/// An edge probability, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::InvalidArgument(format!("probability {p} not in [0, 1]")))
        }
    }

    /// Clamps into `[0, 1]`; NaN maps to 0.
    pub fn saturating(p: f64) -> Self {
        if p.is_nan() {
            Self(0.0)
        } else {
            Self(p.clamp(0.0, 1.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

/// Samples `G(n, p)`.
///
/// Pairs are visited in lexicographic order `(0,1), (0,2), ..., (n-2,n-1)`.
/// For `0 < p < 1` the sampler jumps between successive included pairs with
/// geometric skips `floor(ln U / ln(1 - p))`, one uniform draw per included
/// edge plus one final draw. This has the same distribution as one coin flip
/// per pair and is a fixed function of the seed.
pub fn sample_gnp(n: usize, p: Probability, rng: &mut RandomSource) -> Graph {
    let p = p.get();
    if n < 2 || p == 0.0 {
        return Graph::empty(n);
    }
    if p == 1.0 {
        return Graph::complete(n);
    }
    let log_q = (-p).ln_1p();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    let (mut u, mut v) = (0usize, 0usize);
    'outer: loop {
        let r: f64 = 1.0 - rng.gen::<f64>();
        let skip = (r.ln() / log_q).floor();
        if skip >= (n * n) as f64 {
            break;
        }
        let mut step = skip as usize + 1;
        // Advance the cursor `step` pairs forward, carrying across rows.
        while v + step >= n {
            step -= n - 1 - v;
            u += 1;
            if u + 1 >= n {
                break 'outer;
            }
            v = u;
        }
        v += step;
        adj[u].push(v);
        adj[v].push(u);
    }
    // Lists for u < v are filled in increasing order already; the reverse
    // direction entries arrive in increasing u order as well.
    Graph::from_sorted_adjacency(adj)
}

/// Decodes a Prüfer sequence over labels `0..n` where `n = seq.len() + 2`,
/// always removing the smallest-labelled leaf.
pub fn prufer_decode(seq: &[usize]) -> Result<Graph> {
    let n = seq.len() + 2;
    if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
        return Err(Error::InvalidArgument(format!(
            "Prüfer entry {bad} out of range for n = {n}"
        )));
    }
    let mut remaining = vec![1usize; n];
    for &x in seq {
        remaining[x] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&v| remaining[v] == 1)
        .map(Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        edges.push((leaf, x));
        remaining[x] -= 1;
        if remaining[x] == 1 {
            leaves.push(Reverse(x));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    Graph::from_edges(n, &edges)
}

/// Uniform labelled tree on `n >= 2` vertices via a uniform Prüfer sequence.
pub fn sample_random_tree(n: usize, rng: &mut RandomSource) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "random tree needs n >= 2, got {n}"
        )));
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    prufer_decode(&seq)
}

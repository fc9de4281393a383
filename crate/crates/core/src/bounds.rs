//! Certified lower bounds on `a_t` and structural diagnostics.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Largest total a vertex can reach by absorbing senders whose weights are
/// capped by `caps`, starting from weight 1.
///
/// A sender can only move onto a receiver at least as heavy, so with current
/// total `t` a sender contributes at most `min(cap, t)`. Taking the caps in
/// ascending order maximizes the final total (see the exchange test below).
pub fn absorb_total(caps: &mut [u64]) -> u64 {
    caps.sort_unstable();
    caps.iter().fold(1u64, |t, &c| t + c.min(t))
}

/// Per-vertex upper bounds on the largest weight a vertex can ever hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityVector {
    pub phi: Vec<u64>,
}

fn pow2_capped(d: usize, cap: u64) -> u64 {
    if d >= 63 {
        cap
    } else {
        (1u64 << d).min(cap)
    }
}

/// Fixed-point capacity bound.
///
/// Works on directed edges: `psi(u -> v)` bounds the weight `u` can carry at
/// the moment it sends to `v`. Before that moment `v` is alive, so `v` has not
/// sent anything to `u`, and each other neighbour `x` sent to `u` at most once
/// with at most `psi(x -> u)`. Hence
/// `psi(u -> v) <= absorb_total({psi(x -> u) : x != v})`, and
/// `phi(v) = absorb_total({psi(u -> v)})`, everything capped by `n` and
/// `2^deg`. Iterated from `min(n, 2^deg)` down to the greatest fixed point.
pub fn capacity_vector(g: &Graph) -> CapacityVector {
    let n = g.n();
    let cap = n as u64;
    // Directed edge u -> adj[u][k] lives at offset[u] + k.
    let mut offset = vec![0usize; n + 1];
    for u in 0..n {
        offset[u + 1] = offset[u] + g.degree(u);
    }
    let slot = |u: Vertex, v: Vertex| offset[u] + g.neighbors(u).binary_search(&v).unwrap();
    let mut psi: Vec<u64> = (0..n)
        .flat_map(|u| std::iter::repeat_n(pow2_capped(g.degree(u), cap), g.degree(u)))
        .collect();

    let mut queued = vec![true; psi.len()];
    let mut work: VecDeque<(Vertex, usize)> = (0..n)
        .flat_map(|u| (0..g.degree(u)).map(move |k| (u, k)))
        .collect();
    let mut buf = Vec::new();
    while let Some((u, k)) = work.pop_front() {
        let e = offset[u] + k;
        queued[e] = false;
        let v = g.neighbors(u)[k];
        buf.clear();
        buf.extend(
            g.neighbors(u)
                .iter()
                .filter(|&&x| x != v)
                .map(|&x| psi[slot(x, u)]),
        );
        let bound = absorb_total(&mut buf).min(cap);
        if bound < psi[e] {
            psi[e] = bound;
            // Edges v -> y (y != u) read psi(u -> v).
            for (j, &y) in g.neighbors(v).iter().enumerate() {
                let f = offset[v] + j;
                if y != u && !queued[f] {
                    queued[f] = true;
                    work.push_back((v, j));
                }
            }
        }
    }

    let phi = (0..n)
        .map(|v| {
            buf.clear();
            buf.extend(g.neighbors(v).iter().map(|&u| psi[slot(u, v)]));
            absorb_total(&mut buf)
                .min(cap)
                .min(pow2_capped(g.degree(v), cap))
                .max(1)
        })
        .collect();
    CapacityVector { phi }
}

/// Sum over connected components `C` of the smallest `k` such that the `k`
/// largest capacities in `C`, each capped at `|C|`, add up to `|C|`.
///
/// Weight never leaves a component, so the residual vertices of `C` hold
/// exactly `|C|` units between them, each at most its capacity. Hence this
/// never exceeds `a_t(g)`. On a connected graph it is the plain
/// top-`k`-sum-reaches-`n` bound.
pub fn certified_lower_bound(g: &Graph) -> usize {
    let phi = capacity_vector(g).phi;
    g.components()
        .iter()
        .map(|comp| {
            let size = comp.len() as u64;
            let local: Vec<u64> = comp.iter().map(|&v| phi[v].min(size)).collect();
            bound_from_capacities(&local, size)
        })
        .sum()
}

/// Smallest `k` such that the `k` largest entries of `phi` sum to at least `n`.
pub fn bound_from_capacities(phi: &[u64], n: u64) -> usize {
    let mut sorted = phi.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut total = 0u64;
    for (k, &c) in sorted.iter().enumerate() {
        if total >= n {
            return k;
        }
        total += c;
    }
    sorted.len()
}

/// An induced path `v - w - x - y` with `deg(v) = 1` and `deg(w) = deg(x) = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LongLeaf {
    pub v: Vertex,
    pub w: Vertex,
    pub x: Vertex,
    pub y: Vertex,
}

fn other_neighbor(t: &Graph, at: Vertex, not: Vertex) -> Vertex {
    let nb = t.neighbors(at);
    if nb[0] == not {
        nb[1]
    } else {
        nb[0]
    }
}

/// All long leaves of a tree, ordered by the leaf `v`.
pub fn long_leaves(t: &Graph) -> Result<Vec<LongLeaf>> {
    if !t.is_tree() {
        return Err(Error::InvalidArgument("long leaves need a tree".into()));
    }
    Ok(long_leaves_unchecked(t))
}

pub(crate) fn long_leaves_unchecked(t: &Graph) -> Vec<LongLeaf> {
    let mut out = Vec::new();
    for v in 0..t.n() {
        if t.degree(v) != 1 {
            continue;
        }
        let w = t.neighbors(v)[0];
        if t.degree(w) != 2 {
            continue;
        }
        let x = other_neighbor(t, w, v);
        if t.degree(x) != 2 {
            continue;
        }
        let y = other_neighbor(t, x, w);
        out.push(LongLeaf { v, w, x, y });
    }
    out
}

/// Long-leaf count of a tree. `certified` is false below six vertices, where
/// the triples `{v, w, x}` of different long leaves can overlap (on `P4` the
/// count is 2 but `a_t = 1`); the count is then advisory only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LongLeafBound {
    pub count: usize,
    pub certified: bool,
}

pub fn long_leaf_lower_bound(t: &Graph) -> Result<LongLeafBound> {
    let count = long_leaves(t)?.len();
    Ok(LongLeafBound {
        count,
        certified: t.n() >= 6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    /// No vertex of degree `>= 4 ln n`.
    pub degree_ok: bool,
    /// No path on `gamma` vertices of degree `>= (c + eps') ln n`.
    pub path_ok: bool,
    pub gamma: usize,
    pub degree_threshold: usize,
}

pub fn structural_gamma(c: f64, eps_prime: f64) -> usize {
    (2.0 * (4.0 * c + 2.0 * eps_prime) / (eps_prime * eps_prime)).ceil() as usize
}

/// Sparse-regime structure checks. Diagnostics only, not a certified bound.
pub fn check_structural(g: &Graph, c: f64, eps_prime: f64) -> Result<StructuralReport> {
    if !(c > 0.0 && c < 1.0 / std::f64::consts::LN_2) {
        return Err(Error::InvalidArgument(format!("c = {c} not in (0, 1/ln 2)")));
    }
    if !(eps_prime > 0.0) {
        return Err(Error::InvalidArgument(format!("eps' = {eps_prime} must be positive")));
    }
    let gamma = structural_gamma(c, eps_prime);
    let ln_n = (g.n().max(1) as f64).ln();
    let degree_threshold = ((c + eps_prime) * ln_n).ceil() as usize;
    Ok(StructuralReport {
        degree_ok: (g.max_degree() as f64) < 4.0 * ln_n,
        path_ok: !g.has_high_degree_path(degree_threshold.max(1), gamma),
        gamma,
        degree_threshold,
    })
}

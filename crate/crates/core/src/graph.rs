//! Undirected simple graphs on vertices `0..n`, plus the structural
//! predicates the rest of the crate leans on.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// An undirected simple graph stored as sorted adjacency lists.
///
/// Adjacency is always symmetric, loop-free and duplicate-free; every
/// constructor enforces this, and the value is immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list in any order.
    ///
    /// Self-loops, out-of-range endpoints and repeated edges are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge ({u}, {})",
                    w[0]
                )));
            }
        }
        Ok(Self {
            adj,
            m: edges.len(),
        })
    }

    /// Assembles a graph from per-vertex lists that the caller promises are
    /// already sorted, symmetric and simple (used by the samplers).
    pub(crate) fn from_sorted_adjacency(adj: Vec<Vec<Vertex>>) -> Self {
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Self { adj, m }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Self::from_sorted_adjacency(adj)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are simple")
    }

    /// Star `K_{1,leaves}` with the center at vertex 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are simple")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Maximum degree; 0 for edgeless (or empty) graphs.
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Reachability from vertex 0 covers every vertex. True for `n <= 1`.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n <= 1 {
            return true;
        }
        self.component_sizes_from(&vec![true; n])
            .first()
            .is_some_and(|&(root, size)| root == 0 && size == n)
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.m + 1 == self.n() && self.is_connected()
    }

    /// Connected components of the subgraph induced on `keep`, as
    /// `(smallest vertex, size)` pairs ordered by smallest vertex.
    fn component_sizes_from(&self, keep: &[bool]) -> Vec<(Vertex, usize)> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if !keep[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &self.adj[u] {
                    if keep[v] && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            out.push((s, size));
        }
        out
    }

    /// Vertex sets of the connected components, each ascending, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut label = vec![usize::MAX; self.n()];
        let mut out: Vec<Vec<Vertex>> = Vec::new();
        for s in 0..self.n() {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            label[s] = id;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Number of connected components of the subgraph induced on `keep`.
    pub fn induced_component_count(&self, keep: &[bool]) -> usize {
        self.component_sizes_from(keep).len()
    }

    /// Whether the subgraph induced on `{v : degree(v) >= degree_threshold}`
    /// contains a simple path on `path_len` vertices.
    ///
    /// Exact: depth-first search with backtracking, restricted to components
    /// large enough to host such a path. Exponential in the worst case, which
    /// is fine for the small path lengths this is used with.
    pub fn has_high_degree_path(&self, degree_threshold: usize, path_len: usize) -> bool {
        assert!(path_len >= 1, "path_len must be at least 1");
        let n = self.n();
        let keep: Vec<bool> = (0..n).map(|v| self.degree(v) >= degree_threshold).collect();

        // Label vertices by component so searches skip hopeless components.
        let mut comp = vec![usize::MAX; n];
        let mut comp_size = Vec::new();
        for (root, size) in self.component_sizes_from(&keep) {
            let id = comp_size.len();
            comp_size.push(size);
            let mut stack = vec![root];
            comp[root] = id;
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if keep[v] && comp[v] == usize::MAX {
                        comp[v] = id;
                        stack.push(v);
                    }
                }
            }
        }

        let mut on_path = vec![false; n];
        (0..n).any(|s| {
            keep[s]
                && comp_size[comp[s]] >= path_len
                && self.extend_path(s, 1, path_len, &keep, &mut on_path)
        })
    }

    fn extend_path(
        &self,
        u: Vertex,
        len: usize,
        target: usize,
        keep: &[bool],
        on_path: &mut [bool],
    ) -> bool {
        if len == target {
            return true;
        }
        on_path[u] = true;
        let found = self.adj[u]
            .iter()
            .any(|&v| keep[v] && !on_path[v] && self.extend_path(v, len + 1, target, keep, on_path));
        on_path[u] = false;
        found
    }

    /// Checks the representation invariants (symmetry, no loops, no
    /// duplicates, degree sum). Used by tests on sampler output.
    pub fn check_invariants(&self) -> bool {
        let mut degree_sum = 0;
        for (u, list) in self.adj.iter().enumerate() {
            degree_sum += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in list {
                if v == u || v >= self.n() || self.adj[v].binary_search(&u).is_err() {
                    return false;
                }
            }
        }
        degree_sum == 2 * self.m
    }

    /// Edge-list text: `"n m"` then one `"u v"` line per edge with `u < v`,
    /// sorted lexicographically.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {}", self.n(), self.m).unwrap();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    /// Parses the edge-list format. Edges may appear in any order and with
    /// either endpoint first; blank lines are ignored.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let (lineno, header) = lines
            .next()
            .ok_or(Error::Parse {
                line: 1,
                msg: "missing header".into(),
            })?;
        let header = header?;
        let (n, m) = parse_pair(&header, lineno + 1)?;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            edges.push(parse_pair(&line?, i + 1)?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, &edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let err = |msg: &str| Error::Parse {
        line: lineno,
        msg: format!("{msg}: {line:?}"),
    };
    let mut it = line.split_whitespace();
    let a = it.next().ok_or_else(|| err("expected two integers"))?;
    let b = it.next().ok_or_else(|| err("expected two integers"))?;
    if it.next().is_some() {
        return Err(err("trailing tokens"));
    }
    let a = a.parse().map_err(|_| err("bad integer"))?;
    let b = b.parse().map_err(|_| err("bad integer"))?;
    Ok((a, b))
}

//! Top-down greedy embedding of pruned cut-off trees under an exposure
//! discipline.

use serde::Serialize;

use crate::cutoff::CutoffTree;
use crate::graph::{Graph, Vertex};

/// Read access to a graph that records which vertices have had their
/// neighbourhood (into the untouched pool) looked at.
///
/// A pair `{x, y}` is revealed only when `x` or `y` is exposed, so keeping
/// a vertex set free of exposed vertices keeps every pair inside it unseen.
#[derive(Debug, Clone)]
pub struct ExposureOracle<'g> {
    g: &'g Graph,
    exposed: Vec<bool>,
}

impl<'g> ExposureOracle<'g> {
    pub fn new(g: &'g Graph) -> Self {
        Self {
            g,
            exposed: vec![false; g.n()],
        }
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// Neighbours of `u` inside `pool`, ascending. Exposes `u`.
    pub fn reveal(&mut self, u: Vertex, pool: &[bool]) -> Vec<Vertex> {
        self.exposed[u] = true;
        self.g.neighbors(u).iter().copied().filter(|&v| pool[v]).collect()
    }

    /// Number of neighbours of `u` inside `pool`. Exposes `u`.
    pub fn peek_degree(&mut self, u: Vertex, pool: &[bool]) -> usize {
        self.exposed[u] = true;
        self.g.neighbors(u).iter().filter(|&&v| pool[v]).count()
    }

    pub fn is_exposed(&self, v: Vertex) -> bool {
        self.exposed[v]
    }

    pub fn exposed(&self) -> &[bool] {
        &self.exposed
    }

    /// How many of `vs` are exposed.
    pub fn exposed_among(&self, vs: &[Vertex]) -> usize {
        vs.iter().filter(|&&v| self.exposed[v]).count()
    }

    /// Right-neighbour lists of `left` into `right`, read for the first time.
    pub fn bipartite(&self, left: &[Vertex], right: &[Vertex]) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.g.n()];
        for (i, &b) in right.iter().enumerate() {
            index[b] = i;
        }
        left.iter()
            .map(|&r| {
                self.g
                    .neighbors(r)
                    .iter()
                    .filter_map(|&x| (index[x] != usize::MAX).then_some(index[x]))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// The pruned tree has more vertices than the graph, or the sequences
    /// could not be built.
    Size,
    Root,
    Internal,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Size => "size",
            Stage::Root => "root",
            Stage::Internal => "internal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmbedFailure {
    pub stage: Stage,
    /// Distance from the root of the node whose children could not be placed.
    pub depth: u32,
}

/// Images of one tree's nodes; `None` where the tree failed before reaching
/// the node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub assignment: Vec<Option<Vertex>>,
    pub failure: Option<EmbedFailure>,
    /// Deepest level of parents processed.
    pub depth_cursor: u32,
}

impl Embedding {
    pub fn complete(&self) -> Option<Vec<Vertex>> {
        if self.failure.is_some() {
            return None;
        }
        self.assignment.iter().copied().collect()
    }
}

/// Several copies of one tree embedded side by side.
#[derive(Debug, Clone)]
pub struct ForestEmbedding {
    pub trees: Vec<Embedding>,
    /// `bad_histogram[k]` counts parents with `k` bad children.
    pub bad_histogram: Vec<usize>,
    /// Vertices never touched: neither assigned nor exposed.
    pub pool: Vec<bool>,
}

impl ForestEmbedding {
    pub fn bad_max(&self) -> usize {
        self.bad_histogram.len().saturating_sub(1)
    }
}

/// Nodes grouped by distance from the root, BFS order within a group.
fn by_depth(t: &CutoffTree) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![0]];
    loop {
        let next: Vec<usize> = out
            .last()
            .unwrap()
            .iter()
            .flat_map(|&x| t.nodes[x].children.iter().copied())
            .collect();
        if next.is_empty() {
            return out;
        }
        out.push(next);
    }
}

/// Embeds one copy of `t` per root, top down, all copies' depth-`k` nodes
/// before any depth-`k + 1` node.
///
/// For a parent image `u`: its neighbours in the pool are revealed in id
/// order. The first ones fill the non-bereft child slots; each of these is
/// taken out of the pool and has its pool degree peeked. Candidates are
/// ranked by that degree and the strongest go to the child slots needing the
/// most children of their own; candidates below the largest such need are
/// counted as bad and end up in leaf slots. The next neighbours, never
/// peeked, become the bereft children. A copy fails when its parent has too
/// few pool neighbours or the ranking cannot cover every internal slot.
/// `roots` must already be out of `pool`.
pub fn embed_forest(
    oracle: &mut ExposureOracle<'_>,
    t: &CutoffTree,
    roots: &[Vertex],
    mut pool: Vec<bool>,
) -> ForestEmbedding {
    let levels = by_depth(t);
    let mut trees: Vec<Embedding> = roots
        .iter()
        .map(|&r| {
            let mut assignment = vec![None; t.len()];
            assignment[0] = Some(r);
            Embedding {
                assignment,
                failure: None,
                depth_cursor: 0,
            }
        })
        .collect();
    let mut hist: Vec<usize> = Vec::new();

    for (depth, nodes) in levels.iter().enumerate() {
        for emb in trees.iter_mut() {
            if emb.failure.is_some() {
                continue;
            }
            for &x in nodes {
                let kids = &t.nodes[x].children;
                if kids.is_empty() {
                    continue;
                }
                let u = emb.assignment[x].expect("parents are placed first");
                match place_children(oracle, t, kids, u, &mut pool, &mut emb.assignment) {
                    Ok(bad) => {
                        if hist.len() <= bad {
                            hist.resize(bad + 1, 0);
                        }
                        hist[bad] += 1;
                    }
                    Err(()) => {
                        let stage = if depth == 0 { Stage::Root } else { Stage::Internal };
                        emb.failure = Some(EmbedFailure {
                            stage,
                            depth: depth as u32,
                        });
                        break;
                    }
                }
                emb.depth_cursor = depth as u32;
            }
        }
    }
    ForestEmbedding {
        trees,
        bad_histogram: hist,
        pool,
    }
}

/// Places the children of one parent; returns its bad-child count.
fn place_children(
    oracle: &mut ExposureOracle<'_>,
    t: &CutoffTree,
    kids: &[usize],
    u: Vertex,
    pool: &mut [bool],
    assignment: &mut [Option<Vertex>],
) -> Result<usize, ()> {
    let mut internal: Vec<usize> = Vec::new();
    let mut leaves: Vec<usize> = Vec::new();
    let mut bereft: Vec<usize> = Vec::new();
    for &k in kids {
        let node = &t.nodes[k];
        if node.bereft {
            bereft.push(k);
        } else if node.children.is_empty() {
            leaves.push(k);
        } else {
            internal.push(k);
        }
    }
    let cands = oracle.reveal(u, pool);
    let peeked_len = internal.len() + leaves.len();
    if cands.len() < peeked_len + bereft.len() {
        return Err(());
    }
    for &v in &cands[..peeked_len + bereft.len()] {
        pool[v] = false;
    }
    let mut ranked: Vec<(usize, Vertex)> = cands[..peeked_len]
        .iter()
        .map(|&v| (oracle.peek_degree(v, pool), v))
        .collect();
    // strongest first; ties by vertex id
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    internal.sort_by(|&a, &b| {
        t.nodes[b].children.len().cmp(&t.nodes[a].children.len()).then(a.cmp(&b))
    });
    let need_max = internal.first().map_or(0, |&k| t.nodes[k].children.len());
    let bad = ranked.iter().filter(|&&(d, _)| d < need_max).count();
    for (slot, &(d, v)) in internal.iter().zip(&ranked) {
        if d < t.nodes[*slot].children.len() {
            return Err(());
        }
        assignment[*slot] = Some(v);
    }
    for (slot, &(_, v)) in leaves.iter().zip(&ranked[internal.len()..]) {
        assignment[*slot] = Some(v);
    }
    for (slot, &v) in bereft.iter().zip(&cands[peeked_len..]) {
        assignment[*slot] = Some(v);
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{build_tree, calibrate, prune_bereft, ParamSet};

    fn pruned(n: u64) -> CutoffTree {
        let p = ParamSet::new(n, 5.0, 1, 0.04, 0.14).unwrap();
        prune_bereft(&build_tree(&calibrate(&p).unwrap()).unwrap())
    }

    #[test]
    fn complete_graph_always_embeds() {
        let t = pruned(200);
        let n = 200;
        assert!(t.len() <= n);
        let g = Graph::complete(n);
        let mut oracle = ExposureOracle::new(&g);
        let mut pool = vec![true; n];
        pool[0] = false;
        let f = embed_forest(&mut oracle, &t, &[0], pool);
        let a = f.trees[0].complete().expect("K_n embeds everything");
        let mut seen = vec![false; n];
        for (x, &v) in a.iter().enumerate() {
            assert!(!seen[v], "injective");
            seen[v] = true;
            if let Some(p) = t.nodes[x].parent {
                assert!(g.has_edge(a[p], v));
            }
        }
        for (x, &v) in a.iter().enumerate() {
            if t.nodes[x].bereft {
                assert!(!oracle.is_exposed(v));
            }
        }
    }

    #[test]
    fn empty_graph_fails_at_root() {
        let t = pruned(200);
        let g = Graph::empty(200);
        let mut oracle = ExposureOracle::new(&g);
        let mut pool = vec![true; 200];
        pool[0] = false;
        let f = embed_forest(&mut oracle, &t, &[0], pool);
        assert_eq!(
            f.trees[0].failure,
            Some(EmbedFailure {
                stage: Stage::Root,
                depth: 0
            })
        );
    }
}

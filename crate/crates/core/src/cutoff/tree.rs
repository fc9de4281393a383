//! The recursive tree `T_rho`, its pruned form `T'`, and the checks and
//! protocol that go with them.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::Serialize;

use super::{CutoffError, SequenceTable};
use crate::acquisition::{Move, Protocol};
use crate::graph::{Graph, Vertex};

/// `Tight` marks the remainder children inside an exact subtree, the ones
/// that take the near-equal share of the leftover weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Root,
    Exact,
    Loose,
    Tight,
    Leaf,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Root => "root",
            Role::Exact => "exact",
            Role::Loose => "loose",
            Role::Tight => "tight",
            Role::Leaf => "leaf",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "root" => Role::Root,
            "exact" => Role::Exact,
            "loose" => Role::Loose,
            "tight" => Role::Tight,
            "leaf" => Role::Leaf,
            _ => return None,
        })
    }

    /// Root and loose vertices lose their bottom leaf when pruning.
    fn is_loose(self) -> bool {
        matches!(self, Role::Root | Role::Loose)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Vertices in the subtree rooted here.
    pub weight: u64,
    /// Distance from the bottom level.
    pub level: u32,
    pub role: Role,
    pub bereft: bool,
}

/// A rooted tree with node 0 as the root. Every parent id is smaller than its
/// children's ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutoffTree {
    pub nodes: Vec<Node>,
}

impl CutoffTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bereft_count(&self) -> usize {
        self.nodes.iter().filter(|x| x.bereft).count()
    }

    pub fn depth(&self) -> u32 {
        self.nodes.first().map_or(0, |r| r.level)
    }

    fn push(&mut self, parent: Option<usize>, weight: u64, level: u32, role: Role) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent,
            children: Vec::new(),
            weight,
            level,
            role,
            bereft: false,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    /// Sets every weight to its actual subtree size.
    fn recompute_weights(&mut self) {
        for id in (0..self.len()).rev() {
            let w = 1 + self.nodes[id]
                .children
                .iter()
                .map(|&c| self.nodes[c].weight)
                .sum::<u64>();
            self.nodes[id].weight = w;
        }
    }

    /// Subtree sizes counted from the structure, ignoring stored weights.
    pub fn subtree_sizes(&self) -> Vec<u64> {
        let mut size = vec![1u64; self.len()];
        for id in (1..self.len()).rev() {
            let p = self.nodes[id].parent.expect("non-root has a parent");
            size[p] += size[id];
        }
        size
    }

    /// Adds one leaf under each listed node, appended after the existing ids.
    /// Returns the new tree and the ids of the added leaves.
    pub fn attach_leaves(&self, parents: &[usize]) -> (CutoffTree, Vec<usize>) {
        let mut t = self.clone();
        let ids = parents
            .iter()
            .map(|&p| {
                let level = t.nodes[p].level.saturating_sub(1);
                t.push(Some(p), 1, level, Role::Leaf)
            })
            .collect();
        // Parents precede children, so a reverse sweep fixes all weights.
        t.recompute_weights();
        (t, ids)
    }

    /// The tree as a graph on its node ids.
    pub fn to_graph(&self) -> Graph {
        let edges: Vec<_> = (1..self.len())
            .map(|id| (self.nodes[id].parent.unwrap(), id))
            .collect();
        Graph::from_edges(self.len(), &edges).expect("tree edges are simple")
    }

    /// `"id parent weight level role bereft"` per node, root first with
    /// parent `-1`, bereft as `0`/`1`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (id, x) in self.nodes.iter().enumerate() {
            let parent = x.parent.map_or(-1, |p| p as i64);
            writeln!(
                s,
                "{id} {parent} {} {} {} {}",
                x.weight,
                x.level,
                x.role.as_str(),
                u8::from(x.bereft)
            )
            .unwrap();
        }
        s
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self, CutoffError> {
        let mut t = CutoffTree { nodes: Vec::new() };
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| CutoffError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| CutoffError::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let id: usize = f[0].parse().map_err(|_| bad("bad id"))?;
            if id != t.len() {
                return Err(bad("ids must be 0, 1, 2, ... in order"));
            }
            let parent: i64 = f[1].parse().map_err(|_| bad("bad parent"))?;
            let parent = match parent {
                -1 if id == 0 => None,
                p if p >= 0 && (p as usize) < id => Some(p as usize),
                _ => return Err(bad("parent must precede child; only node 0 is the root")),
            };
            let weight = f[2].parse().map_err(|_| bad("bad weight"))?;
            let level = f[3].parse().map_err(|_| bad("bad level"))?;
            let role = Role::parse(f[4]).ok_or_else(|| bad("bad role"))?;
            let bereft = match f[5] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("bereft must be 0 or 1")),
            };
            let id = t.push(parent, weight, level, role);
            t.nodes[id].bereft = bereft;
        }
        Ok(t)
    }
}

struct Builder<'a> {
    table: &'a SequenceTable,
    tree: CutoffTree,
}

impl Builder<'_> {
    /// Cap for the children of a node at `level >= 2`.
    fn cap(&self, level: u32) -> u64 {
        self.table.c[level as usize - 2]
    }

    fn leaf(&mut self, parent: usize, level: u32) {
        self.tree.push(Some(parent), 1, level, Role::Leaf);
    }

    fn loose(&mut self, parent: Option<usize>, level: u32, role: Role) -> Result<(), CutoffError> {
        let rho = self.table.rho[level as usize - 1] as u64;
        let id = self.tree.push(parent, rho, level, role);
        if level == 1 {
            self.leaf(id, 0);
            return Ok(());
        }
        let cj = self.cap(level);
        let i = self.table.istar[level as usize - 2];
        let sigma = self.table.sigma;
        for e in 0..i {
            self.exact(id, 1 << e, level - 1, Role::Exact)?;
        }
        for _ in 0..sigma {
            self.leaf(id, level - 1);
        }
        for _ in 0..cj - i as u64 - sigma {
            self.loose(Some(id), level - 1, Role::Loose)?;
        }
        Ok(())
    }

    /// Subtree of exactly `w` vertices whose root sits at `level`.
    fn exact(&mut self, parent: usize, w: u64, level: u32, role: Role) -> Result<(), CutoffError> {
        let id = self.tree.push(Some(parent), w, level, role);
        if w == 1 {
            return Ok(());
        }
        if level == 0 {
            return Err(CutoffError::ConstructionFailure {
                weight: w,
                cap: 0,
                level,
            });
        }
        if level == 1 || w <= self.cap(level) {
            for _ in 1..w {
                self.leaf(id, level - 1);
            }
            return Ok(());
        }
        let cap = self.cap(level);
        let sigma = self.table.sigma;
        let fail = CutoffError::ConstructionFailure {
            weight: w,
            cap,
            level,
        };
        // Smallest i whose remainder fits into the c - i - sigma other slots.
        let mut found = None;
        for i in 0..63u32 {
            if cap < i as u64 + sigma + 1 {
                break;
            }
            let k = cap - i as u64 - sigma;
            let head = (1u64 << i) + sigma;
            if w.saturating_sub(head) <= head.saturating_mul(k) {
                found = Some((i, k));
                break;
            }
        }
        let (i, k) = found.ok_or(fail)?;
        for e in 0..i {
            self.exact(id, 1 << e, level - 1, Role::Exact)?;
        }
        for _ in 0..sigma {
            self.leaf(id, level - 1);
        }
        // Near-equal split, smaller shares first; empty shares are dropped.
        let rest = w - (1u64 << i) - sigma;
        let (q, r) = (rest / k, rest % k);
        for s in 0..k {
            let share = if s < k - r { q } else { q + 1 };
            if share > 0 {
                self.exact(id, share, level - 1, Role::Tight)?;
            }
        }
        Ok(())
    }
}

/// Builds `T_rho` for a sequence table, in preorder.
///
/// A loose vertex at level `j + 1` gets `i*(rho_j)` exact children of sizes
/// `1, 2, ..., 2^{i*-1}`, then `sigma` leaves, then `c_j - i* - sigma` loose
/// children of size `rho_j`; a loose vertex at level 1 has one leaf. An exact
/// subtree of size `w` whose children fall under cap `c` is `w - 1` leaves
/// when `w <= c` (and always at level 1), and is otherwise split with the
/// smallest valid `i'` and a floor/ceiling share of the remainder.
pub fn build_tree(table: &SequenceTable) -> Result<CutoffTree, CutoffError> {
    let mut b = Builder {
        table,
        tree: CutoffTree { nodes: Vec::new() },
    };
    b.loose(None, table.m as u32, Role::Root)?;
    debug_assert_eq!(b.tree.len() as u128, table.rho_m());
    Ok(b.tree)
}

/// `T'`: drops every bottom-level leaf whose parent is loose (or the root)
/// and marks that parent bereft. Ids are compacted in order.
pub fn prune_bereft(t: &CutoffTree) -> CutoffTree {
    let drop: Vec<bool> = t
        .nodes
        .iter()
        .map(|x| {
            x.role == Role::Leaf
                && x.level == 0
                && x.parent.is_some_and(|p| t.nodes[p].role.is_loose())
        })
        .collect();
    let mut new_id = vec![usize::MAX; t.len()];
    let mut out = CutoffTree { nodes: Vec::new() };
    for (id, x) in t.nodes.iter().enumerate() {
        if drop[id] {
            continue;
        }
        let parent = x.parent.map(|p| new_id[p]);
        let nid = out.push(parent, x.weight, x.level, x.role);
        out.nodes[nid].bereft = x.bereft || x.children.iter().any(|&c| drop[c]);
        new_id[id] = nid;
    }
    out.recompute_weights();
    out
}

/// At every node, the children's subtree sizes sorted ascending satisfy
/// `w_i <= 1 + w_1 + ... + w_{i-1}`, so the node can absorb them in order.
pub fn check_absorbable(t: &CutoffTree) -> bool {
    let size = t.subtree_sizes();
    t.nodes.iter().all(|x| {
        let mut ws: Vec<u64> = x.children.iter().map(|&c| size[c]).collect();
        ws.sort_unstable();
        let mut held = 1u64;
        ws.iter().all(|&w| {
            let ok = w <= held;
            held += w;
            ok
        })
    })
}

/// Some `i'` has `s_i = 2^{i-1}` for `i <= i'` and `s_i <= 2^{i'}` after.
pub fn check_cutoff_sizes(sizes: &[u64]) -> bool {
    let prefix = sizes
        .iter()
        .enumerate()
        .take_while(|&(i, &s)| i < 63 && s == 1u64 << i)
        .count();
    (0..=prefix).any(|ip| {
        let bound = if ip >= 63 { u64::MAX } else { 1u64 << ip };
        sizes[ip..].iter().all(|&s| s <= bound)
    })
}

/// The strict cut-off property over each node's children in stored order.
pub fn check_cutoff(t: &CutoffTree) -> bool {
    let size = t.subtree_sizes();
    t.nodes.iter().all(|x| {
        let sizes: Vec<u64> = x.children.iter().map(|&c| size[c]).collect();
        check_cutoff_sizes(&sizes)
    })
}

/// Moves that pile the whole tree onto the root's image.
///
/// Bottom-up: each child first gathers its own subtree, then sends to its
/// parent; siblings go in ascending subtree size, ties by id. The sequence is
/// dry-run on the tree before it is returned.
pub fn extract_protocol(t: &CutoffTree, embedding: &[Vertex]) -> Result<Protocol, CutoffError> {
    if embedding.len() != t.len() {
        return Err(CutoffError::ProtocolBug {
            node: 0,
            msg: format!("embedding has {} entries for {} nodes", embedding.len(), t.len()),
        });
    }
    let size = t.subtree_sizes();
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(t.len().saturating_sub(1));
    // Explicit stack: (node, next child position) over sorted child lists.
    let sorted: Vec<Vec<usize>> = t
        .nodes
        .iter()
        .map(|x| {
            let mut c = x.children.clone();
            c.sort_by_key(|&id| (size[id], id));
            c
        })
        .collect();
    if !t.is_empty() {
        let mut stack = vec![(0usize, 0usize)];
        while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
            if *pos < sorted[node].len() {
                let child = sorted[node][*pos];
                *pos += 1;
                stack.push((child, 0));
            } else {
                stack.pop();
                if let Some(&(parent, _)) = stack.last() {
                    order.push((node, parent));
                }
            }
        }
    }
    let mut w = vec![1u64; t.len()];
    for &(from, to) in &order {
        if w[to] < w[from] {
            return Err(CutoffError::ProtocolBug {
                node: from,
                msg: format!("sends {} onto {} holding {}", w[from], to, w[to]),
            });
        }
        w[to] += std::mem::take(&mut w[from]);
    }
    Ok(Protocol::new(
        order
            .into_iter()
            .map(|(a, b)| Move::new(embedding[a], embedding[b]))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquisition::verify_protocol;
    use crate::cutoff::extend_sequences;

    fn table(sigma: u64, c: Vec<u64>) -> SequenceTable {
        let (rho, b) = extend_sequences(&c, sigma).unwrap();
        let istar = rho[..c.len()]
            .iter()
            .map(|&r| crate::cutoff::i_star(r, sigma))
            .collect();
        SequenceTable {
            n: 0,
            sigma,
            m: rho.len(),
            c_star: c.clone(),
            c,
            rho,
            b,
            istar,
            increments: 0,
            pre_final_rho_m: None,
        }
    }

    fn child_weights(t: &CutoffTree, id: usize) -> Vec<u64> {
        t.nodes[id].children.iter().map(|&c| t.nodes[c].weight).collect()
    }

    #[test]
    fn hand_expanded_tree() {
        let t = build_tree(&table(1, vec![4, 5])).unwrap();
        assert_eq!(t.len(), 17);
        assert_eq!(t.nodes[0].weight, 17);
        assert_eq!(child_weights(&t, 0), vec![1, 2, 4, 1, 8]);
        let loose8 = t.nodes[0].children[4];
        assert_eq!(child_weights(&t, loose8), vec![1, 2, 2, 2]);
        let exact4 = t.nodes[0].children[2];
        assert_eq!(child_weights(&t, exact4), vec![1, 1, 1]);
        for x in &t.nodes {
            if x.weight == 2 {
                assert_eq!(x.children.len(), 1);
            }
        }
        assert_eq!(t.subtree_sizes().iter().zip(&t.nodes).filter(|(s, x)| **s != x.weight).count(), 0);
        assert!(check_absorbable(&t));

        let p = prune_bereft(&t);
        assert_eq!(p.len(), 14);
        assert_eq!(p.bereft_count(), 3);
        for x in p.nodes.iter().filter(|x| x.bereft) {
            assert!(x.children.is_empty());
            assert_eq!((x.role, x.level), (Role::Loose, 1));
        }
    }

    #[test]
    fn level_one_tree() {
        let t = build_tree(&table(1, vec![])).unwrap();
        assert_eq!(t.len(), 2);
        let p = prune_bereft(&t);
        assert_eq!(p.len(), 1);
        assert!(p.nodes[0].bereft);
        assert!(p.nodes[0].children.is_empty());
    }

    #[test]
    fn reattaching_restores_absorbability() {
        let t = build_tree(&table(1, vec![4, 5])).unwrap();
        let p = prune_bereft(&t);
        let bereft: Vec<usize> = (0..p.len()).filter(|&i| p.nodes[i].bereft).collect();
        let (full, added) = p.attach_leaves(&bereft);
        assert_eq!(added.len(), 3);
        assert_eq!(full.len(), 17);
        assert!(check_absorbable(&full));
        // Re-feeding only some of them still works.
        let (partial, _) = p.attach_leaves(&bereft[..1]);
        assert!(check_absorbable(&partial));
    }

    #[test]
    fn absorbable_examples() {
        let mk = |sizes: &[u64]| {
            // root with one subtree per size, each a star
            let mut t = CutoffTree { nodes: Vec::new() };
            let r = t.push(None, 0, 2, Role::Root);
            for &s in sizes {
                let c = t.push(Some(r), s, 1, Role::Exact);
                for _ in 1..s {
                    t.push(Some(c), 1, 0, Role::Leaf);
                }
            }
            t.recompute_weights();
            t
        };
        assert!(check_absorbable(&mk(&[1, 2, 4, 8])));
        assert!(!check_absorbable(&mk(&[1, 3])));
        assert!(check_cutoff(&mk(&[1, 2, 4, 8])));
        assert!(check_cutoff(&mk(&[1, 1, 1, 1])));
        assert!(!check_cutoff(&mk(&[1, 2, 4, 8, 100])));
        let single = CutoffTree {
            nodes: vec![Node {
                parent: None,
                children: vec![],
                weight: 1,
                level: 0,
                role: Role::Root,
                bereft: false,
            }],
        };
        assert!(check_cutoff(&single));
        assert!(check_absorbable(&single));
    }

    #[test]
    fn protocol_examples() {
        let t = build_tree(&table(1, vec![])).unwrap();
        let p = extract_protocol(&t, &[0, 1]).unwrap();
        assert_eq!(p.moves, vec![Move::new(1, 0)]);

        let t = build_tree(&table(1, vec![4, 5])).unwrap();
        let id: Vec<usize> = (0..t.len()).collect();
        let p = extract_protocol(&t, &id).unwrap();
        assert_eq!(p.len(), 16);
        let rep = verify_protocol(&t.to_graph(), &p).unwrap();
        assert_eq!(rep.residual, vec![0]);
        assert_eq!(rep.final_state.weight(0), 17);
    }

    #[test]
    fn star_protocol_in_index_order() {
        let mut t = CutoffTree { nodes: Vec::new() };
        let r = t.push(None, 4, 1, Role::Root);
        for _ in 0..3 {
            t.push(Some(r), 1, 0, Role::Leaf);
        }
        let p = extract_protocol(&t, &[10, 11, 12, 13]).unwrap();
        assert_eq!(p.moves, vec![Move::new(11, 10), Move::new(12, 10), Move::new(13, 10)]);
    }

    #[test]
    fn text_round_trip() {
        let t = prune_bereft(&build_tree(&table(1, vec![4, 5])).unwrap());
        let text = t.to_text();
        assert!(text.starts_with("0 -1 14 3 root 0\n"));
        let back = CutoffTree::read_text(text.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        assert!(CutoffTree::read_text("0 -1 1 0 blob 0\n".as_bytes()).is_err());
        assert!(CutoffTree::read_text("1 -1 1 0 root 0\n".as_bytes()).is_err());
    }

    #[test]
    fn exact_split_uses_tight_children() {
        // cap 6, sigma 1: weight 20 at level 2 needs i' with
        // 20 - 2^i - 1 <= (2^i + 1)(5 - i); i = 2 gives 15 <= 15.
        let t = table(1, vec![6, 40]);
        let mut b = Builder {
            table: &t,
            tree: CutoffTree { nodes: Vec::new() },
        };
        let r = b.tree.push(None, 0, 3, Role::Root);
        b.exact(r, 20, 2, Role::Exact).unwrap();
        let tree = b.tree;
        assert_eq!(child_weights(&tree, 1), vec![1, 2, 1, 5, 5, 5]);
        assert_eq!(tree.subtree_sizes()[1], 20);
        let roles: Vec<Role> = tree.nodes[1].children.iter().map(|&c| tree.nodes[c].role).collect();
        assert_eq!(roles[3..], [Role::Tight; 3]);
    }
}

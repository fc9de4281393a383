//! Maximum bipartite matching (Hopcroft-Karp).

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `(left, right)` index pairs, ascending by left.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_left: Vec<usize>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }
}

const NIL: usize = usize::MAX;

/// Maximum matching between `0..adj.len()` on the left and `0..right_len` on
/// the right, where `adj[l]` lists the right neighbours of `l`.
pub fn max_bipartite_matching(adj: &[Vec<usize>], right_len: usize) -> Matching {
    let left_len = adj.len();
    let mut match_l = vec![NIL; left_len];
    let mut match_r = vec![NIL; right_len];
    let mut dist = vec![0usize; left_len];

    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..left_len {
            if match_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = match_r[r];
                if m == NIL {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left_len];
        for l in 0..left_len {
            if match_l[l] == NIL {
                augment(l, adj, &mut match_l, &mut match_r, &mut dist, &mut next);
            }
        }
    }

    let mut pairs = Vec::new();
    let mut unmatched_left = Vec::new();
    for (l, &r) in match_l.iter().enumerate() {
        if r == NIL {
            unmatched_left.push(l);
        } else {
            pairs.push((l, r));
        }
    }
    Matching {
        pairs,
        unmatched_left,
    }
}

/// Iterative layered DFS from `start` along `dist`-increasing edges.
fn augment(
    start: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    let mut path: Vec<(usize, usize)> = Vec::new();
    let mut l = start;
    loop {
        if next[l] == adj[l].len() {
            // dead end: retire l and back up
            dist[l] = usize::MAX;
            match path.pop() {
                Some((pl, _)) => {
                    l = pl;
                    continue;
                }
                None => return false,
            }
        }
        let r = adj[l][next[l]];
        next[l] += 1;
        let m = match_r[r];
        if m == NIL {
            path.push((l, r));
            for &(pl, pr) in &path {
                match_l[pl] = pr;
                match_r[pr] = pl;
            }
            return true;
        }
        if dist[m] != usize::MAX && dist[m] == dist[l] + 1 {
            path.push((l, r));
            l = m;
        }
    }
}

//! Exact `a_t` by depth-first search over reachable weight states.

use std::collections::HashSet;

use thiserror::Error;

use crate::acquisition::{legal_moves_unchecked, Move, Protocol};
use crate::bounds::certified_lower_bound;
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub value: usize,
    /// Replays from all-ones to a maximal state with `value` live vertices.
    pub witness: Protocol,
    /// States expanded (memo misses).
    pub expansions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    /// The search gave up. `upper_bound` is the best residual found so far
    /// (or `n` with an empty witness if no terminal state was reached).
    #[error("search budget of {budget} expansions exhausted; best upper bound {upper_bound}")]
    BudgetExceeded {
        budget: u64,
        upper_bound: usize,
        witness: Protocol,
    },
    #[error("more than {0} reachable states")]
    StateLimit(usize),
}

/// Minimum residual size over all maximal protocols.
///
/// Two prunes keep this usable up to a dozen vertices. Globally, the search
/// stops once it matches [`certified_lower_bound`]. Per state, every
/// connected component of the live subgraph keeps at least one live vertex
/// forever, so a state whose live subgraph already has `best` components
/// cannot improve on `best`.
pub fn exact_at(g: &Graph, budget: u64) -> Result<ExactResult, ExactError> {
    exact_at_visiting(g, budget, |_| {})
}

/// [`exact_at`], calling `visit` on the weight vector of every expanded state.
pub fn exact_at_visiting<F: FnMut(&[u64])>(
    g: &Graph,
    budget: u64,
    visit: F,
) -> Result<ExactResult, ExactError> {
    let n = g.n();
    let floor = certified_lower_bound(g).max(g.induced_component_count(&vec![true; n]));
    let mut search = Search {
        g,
        budget,
        expansions: 0,
        memo: HashSet::new(),
        best: n + 1,
        best_path: Vec::new(),
        path: Vec::new(),
        floor,
        aborted: false,
        visit,
    };
    let mut w = vec![1u64; n];
    search.dfs(&mut w);
    if search.aborted {
        let (upper_bound, witness) = if search.best <= n {
            (search.best, Protocol::new(search.best_path))
        } else {
            (n, Protocol::default())
        };
        return Err(ExactError::BudgetExceeded {
            budget,
            upper_bound,
            witness,
        });
    }
    Ok(ExactResult {
        value: search.best.min(n),
        witness: Protocol::new(search.best_path),
        expansions: search.expansions,
    })
}

struct Search<'g, F> {
    g: &'g Graph,
    budget: u64,
    expansions: u64,
    memo: HashSet<Vec<u64>>,
    best: usize,
    best_path: Vec<Move>,
    path: Vec<Move>,
    floor: usize,
    aborted: bool,
    visit: F,
}

impl<F: FnMut(&[u64])> Search<'_, F> {
    /// Returns true when the whole search should stop.
    fn dfs(&mut self, w: &mut Vec<u64>) -> bool {
        if !self.memo.insert(w.clone()) {
            return false;
        }
        (self.visit)(w);
        self.expansions += 1;
        if self.expansions > self.budget {
            self.aborted = true;
            return true;
        }
        let live: Vec<bool> = w.iter().map(|&x| x > 0).collect();
        if self.g.induced_component_count(&live) >= self.best {
            return false;
        }
        let moves = legal_moves_unchecked(self.g, w);
        if moves.is_empty() {
            let residual = live.iter().filter(|&&b| b).count();
            if residual < self.best {
                self.best = residual;
                self.best_path = self.path.clone();
            }
            return self.best <= self.floor;
        }
        for m in moves {
            let (a, b) = (w[m.from], w[m.to]);
            w[m.from] = 0;
            w[m.to] = a + b;
            self.path.push(m);
            let stop = self.dfs(w);
            self.path.pop();
            w[m.from] = a;
            w[m.to] = b;
            if stop {
                return true;
            }
        }
        false
    }
}

/// Calls `f(weights, maximal)` once for every state reachable from all-ones.
/// Returns the number of states, or an error past `limit` states.
pub fn for_each_reachable_state<F: FnMut(&[u64], bool)>(
    g: &Graph,
    limit: usize,
    mut f: F,
) -> Result<usize, ExactError> {
    let start = vec![1u64; g.n()];
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    let mut stack = vec![start];
    while let Some(w) = stack.pop() {
        let moves = legal_moves_unchecked(g, &w);
        f(&w, moves.is_empty());
        for m in moves {
            let mut next = w.clone();
            next[m.to] += std::mem::take(&mut next[m.from]);
            if !seen.contains(&next) {
                if seen.len() >= limit {
                    return Err(ExactError::StateLimit(limit));
                }
                seen.insert(next.clone());
                stack.push(next);
            }
        }
    }
    Ok(seen.len())
}

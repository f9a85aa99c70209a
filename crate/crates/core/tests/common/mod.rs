//! Brute-force reference implementations shared by the integration tests.
//!
//! None of these call into the library's reachability, response or search
//! code; they only read labels and strategies.

#![allow(dead_code)]

use std::collections::BTreeSet;

use tncg_core::{CostVector, Label, Node, StrategyProfile, TemporalGraph};

/// Dense label matrix, 0 for a missing pair.
pub struct Labels {
    pub n: usize,
    m: Vec<Label>,
}

impl Labels {
    pub fn of(g: &TemporalGraph) -> Self {
        let n = g.n();
        let mut m = vec![0; n * n];
        for u in 0..n {
            for v in 0..n {
                if let Some(l) = g.label(u, v) {
                    m[u * n + v] = l;
                }
            }
        }
        Labels { n, m }
    }

    pub fn from_edges(n: usize, edges: &[(Node, Node, Label)]) -> Self {
        let mut m = vec![0; n * n];
        for &(u, v, l) in edges {
            m[u * n + v] = l;
            m[v * n + u] = l;
        }
        Labels { n, m }
    }

    pub fn get(&self, u: Node, v: Node) -> Label {
        self.m[u * self.n + v]
    }
}

/// Endpoints of every simple temporal path from `u`, found by enumerating
/// the paths one by one.
pub fn reach_by_paths(g: &Labels, u: Node) -> BTreeSet<Node> {
    fn walk(g: &Labels, at: Node, last: Label, on_path: &mut Vec<bool>, out: &mut BTreeSet<Node>) {
        out.insert(at);
        for w in 0..g.n {
            let l = g.get(at, w);
            if l != 0 && l >= last && !on_path[w] {
                on_path[w] = true;
                walk(g, w, l, on_path, out);
                on_path[w] = false;
            }
        }
    }
    let mut on_path = vec![false; g.n];
    on_path[u] = true;
    let mut out = BTreeSet::new();
    walk(g, u, 0, &mut on_path, &mut out);
    out
}

pub fn connected_by_paths(g: &Labels) -> bool {
    (0..g.n).all(|u| reach_by_paths(g, u).len() == g.n)
}

/// Undirected created graph of `profile`, labels taken from `host`.
pub fn created(host: &TemporalGraph, profile: &StrategyProfile) -> Labels {
    let edges: Vec<_> = (0..profile.n())
        .flat_map(|v| profile.strategy(v).iter().map(move |&w| (v, w)))
        .map(|(v, w)| (v, w, host.label(v, w).expect("host edge")))
        .collect();
    Labels::from_edges(host.n(), &edges)
}

pub fn cost_by_paths(host: &TemporalGraph, profile: &StrategyProfile, v: Node) -> CostVector {
    let reached = reach_by_paths(&created(host, profile), v).len();
    CostVector::new(host.n() - reached, profile.strategy(v).len())
}

/// Minimum cost of `v` over all `2^(n-1)` strategies.
pub fn best_cost_by_enumeration(host: &TemporalGraph, profile: &StrategyProfile, v: Node) -> CostVector {
    let others: Vec<Node> = (0..host.n()).filter(|&w| w != v).collect();
    (0u64..1 << others.len())
        .map(|mask| {
            let s: BTreeSet<Node> = others
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &w)| w)
                .collect();
            cost_by_paths(host, &profile.with_strategy(v, s).unwrap(), v)
        })
        .min()
        .unwrap()
}

/// Minimum cost of `v` over single additions, deletions and no change.
pub fn best_greedy_cost_by_enumeration(host: &TemporalGraph, profile: &StrategyProfile, v: Node) -> CostVector {
    let cur = profile.strategy(v).clone();
    let mut best = cost_by_paths(host, profile, v);
    for w in (0..host.n()).filter(|&w| w != v) {
        let mut s = cur.clone();
        if !s.remove(&w) {
            s.insert(w);
        }
        best = best.min(cost_by_paths(host, &profile.with_strategy(v, s).unwrap(), v));
    }
    best
}

pub fn is_ne_by_enumeration(host: &TemporalGraph, profile: &StrategyProfile) -> bool {
    (0..host.n()).all(|v| best_cost_by_enumeration(host, profile, v) == cost_by_paths(host, profile, v))
}

/// Fewest edges of a temporally connected spanning subgraph, by trying all
/// edge subsets in order of size.
pub fn minimum_spanner_by_enumeration(host: &TemporalGraph) -> Option<usize> {
    let n = host.n();
    let edges: Vec<(Node, Node, Label)> = host.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
    fn choose(
        n: usize,
        edges: &[(Node, Node, Label)],
        start: usize,
        left: usize,
        picked: &mut Vec<(Node, Node, Label)>,
    ) -> bool {
        if left == 0 {
            return connected_by_paths(&Labels::from_edges(n, picked));
        }
        for i in start..=edges.len().saturating_sub(left) {
            if edges.len() < left {
                break;
            }
            picked.push(edges[i]);
            if choose(n, edges, i + 1, left - 1, picked) {
                return true;
            }
            picked.pop();
        }
        false
    }
    (n.saturating_sub(1)..=edges.len()).find(|&k| choose(n, &edges, 0, k, &mut Vec::new()))
}

/// Minimum number of sets covering `0..k`, by trying all subfamilies.
pub fn minimum_cover_by_enumeration(k: usize, sets: &[BTreeSet<usize>]) -> Option<usize> {
    let m = sets.len();
    (0u32..1 << m)
        .filter(|mask| {
            let mut hit = vec![false; k];
            for (i, s) in sets.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.iter().for_each(|&e| hit[e] = true);
                }
            }
            hit.iter().all(|&h| h)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
}

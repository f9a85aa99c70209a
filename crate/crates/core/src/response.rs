//! Greedy and exact best responses of a single agent.
//!
//! The greedy response evaluates every single addition and deletion directly.
//!
//! The exact response uses the fact that a simple temporal path leaving `v`
//! uses exactly one edge incident to `v` and then stays in `G - v`. Hence
//! `reach(v)` is `{v}` plus the union, over the incident edges `{v, w}`, of the
//! nodes reachable from `w` in `G - v` by paths starting at time
//! `λ(v, w)` or later. Buying an edge to `s` therefore contributes a fixed
//! node set, and a best response is a minimum set cover over these sets. The
//! cover is searched by increasing size, candidates in ascending order, so the
//! first hit is the lexicographically smallest optimal strategy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::game::{cost_in, undirected_graph, CostVector, StrategyProfile};
use crate::graph::{singleton, sweep, Edge, TemporalGraph};
use crate::{Error, Node, NodeSet, Result};

/// Outcome of a best-response computation for one agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponse {
    pub agent: Node,
    /// The best strategy found; equals the current one when `improved` is false.
    pub strategy: BTreeSet<Node>,
    pub cost: CostVector,
    pub current_cost: CostVector,
    pub improved: bool,
    /// Reach evaluations (greedy) or reach sweeps plus search nodes (exact).
    pub evaluations: u64,
}

fn check_agent(host: &TemporalGraph, profile: &StrategyProfile, v: Node) -> Result<()> {
    if host.n() != profile.n() {
        return Err(Error::SizeMismatch {
            profile: profile.n(),
            host: host.n(),
        });
    }
    if v >= host.n() {
        return Err(Error::NodeOutOfRange { node: v, n: host.n() });
    }
    Ok(())
}

/// Best single addition or deletion for `v`.
///
/// Uses at most `n` reach evaluations: one for the current strategy and one
/// per candidate move. Ties go to the lexicographically smallest strategy.
pub fn greedy_best_response(
    host: &TemporalGraph,
    profile: &StrategyProfile,
    v: Node,
) -> Result<BestResponse> {
    check_agent(host, profile, v)?;
    let current = profile.strategy(v);
    let current_cost = cost_in(&undirected_graph(host, profile)?, profile, v);
    let mut evaluations = 1;

    let mut best: Option<(CostVector, Vec<Node>)> = None;
    for w in 0..host.n() {
        if w == v || !host.has_edge(v, w) {
            continue;
        }
        let mut s = current.clone();
        if !s.remove(&w) {
            s.insert(w);
        }
        let candidate = profile.with_strategy(v, s)?;
        let cost = cost_in(&undirected_graph(host, &candidate)?, &candidate, v);
        evaluations += 1;
        let key = (cost, candidate.strategy(v).iter().copied().collect::<Vec<_>>());
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }

    Ok(match best {
        Some((cost, s)) if cost < current_cost => BestResponse {
            agent: v,
            strategy: s.into_iter().collect(),
            cost,
            current_cost,
            improved: true,
            evaluations,
        },
        _ => BestResponse {
            agent: v,
            strategy: current.clone(),
            cost: current_cost,
            current_cost,
            improved: false,
            evaluations,
        },
    })
}

/// Node sets contributed by each possible purchase of `v`.
struct CoverProblem {
    /// Candidate endpoints in ascending order, restricted to useful ones.
    candidates: Vec<Node>,
    /// `gains[i]`: nodes of `need` reached through candidate `i`.
    gains: Vec<NodeSet>,
    need: NodeSet,
    min_unreached: usize,
}

fn cover_problem(host: &TemporalGraph, profile: &StrategyProfile, v: Node) -> Result<(CoverProblem, u64)> {
    let n = host.n();
    let g = undirected_graph(host, profile)?;
    let rest: Vec<Edge> = g.edges().iter().copied().filter(|e| !e.touches(v)).collect();
    let mut sweeps = 0;

    // What `v` reaches through edges bought by others.
    let mut fixed = singleton(n, v);
    for w in 0..n {
        if w != v && profile.strategy(w).contains(&v) {
            let label = host.label(v, w).ok_or(Error::NotSubgraph { u: w, v })?;
            fixed.union_with(&sweep(n, &rest, &singleton(n, w), label));
            sweeps += 1;
        }
    }

    let mut all = fixed.clone();
    let mut raw = Vec::new();
    for s in 0..n {
        if s == v {
            continue;
        }
        let Some(label) = host.label(v, s) else {
            continue;
        };
        let mut gain = sweep(n, &rest, &singleton(n, s), label);
        sweeps += 1;
        gain.difference_with(&fixed);
        all.union_with(&gain);
        if !gain.is_clear() {
            raw.push((s, gain));
        }
    }
    let mut need = all.clone();
    need.difference_with(&fixed);
    let (candidates, gains) = raw.into_iter().unzip();
    Ok((
        CoverProblem {
            candidates,
            gains,
            need,
            min_unreached: n - all.count_ones(..),
        },
        sweeps,
    ))
}

struct CoverSearch<'a> {
    p: &'a CoverProblem,
    /// Largest candidate index covering each needed node.
    last_cover: Vec<usize>,
    /// `suffix_max[i]`: largest gain among candidates `i..`.
    suffix_max: Vec<usize>,
    cap: u64,
    visited: u64,
}

impl<'a> CoverSearch<'a> {
    fn new(p: &'a CoverProblem, cap: u64) -> Self {
        let n = p.need.len();
        let mut last_cover = vec![0; n];
        for (i, g) in p.gains.iter().enumerate() {
            for x in g.ones() {
                last_cover[x] = i;
            }
        }
        let mut suffix_max = vec![0; p.gains.len() + 1];
        for i in (0..p.gains.len()).rev() {
            suffix_max[i] = suffix_max[i + 1].max(p.gains[i].count_ones(..));
        }
        CoverSearch {
            p,
            last_cover,
            suffix_max,
            cap,
            visited: 0,
        }
    }

    /// Lexicographically first cover of `need` with exactly `k` candidates.
    fn find(&mut self, k: usize) -> Result<Option<Vec<usize>>> {
        let mut chosen = Vec::with_capacity(k);
        let uncovered = self.p.need.clone();
        if self.dfs(0, k, &uncovered, &mut chosen)? {
            Ok(Some(chosen))
        } else {
            Ok(None)
        }
    }

    fn dfs(&mut self, start: usize, slots: usize, uncovered: &NodeSet, chosen: &mut Vec<usize>) -> Result<bool> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(Error::SearchSpaceExceeded { cap: self.cap });
        }
        let left = uncovered.count_ones(..);
        if left == 0 {
            return Ok(true);
        }
        if slots == 0 || left > slots * self.suffix_max[start] {
            return Ok(false);
        }
        if uncovered.ones().any(|x| self.last_cover[x] < start) {
            return Ok(false);
        }
        for i in start..self.p.gains.len() {
            // A candidate adding nothing new cannot be part of a minimum cover.
            if uncovered.is_disjoint(&self.p.gains[i]) {
                continue;
            }
            let mut next = uncovered.clone();
            next.difference_with(&self.p.gains[i]);
            chosen.push(i);
            if self.dfs(i + 1, slots - 1, &next, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

/// Strategy minimizing `v`'s cost over all subsets of the other agents.
///
/// When the current strategy already reaches everything reachable, only
/// strategies with fewer edges are searched; otherwise the search grows until
/// the maximum reach is attained. Among optimal strategies the
/// lexicographically smallest is returned. Fails with
/// [`Error::SearchSpaceExceeded`] after `budget_cap` search nodes
/// (default [`crate::DEFAULT_BUDGET_CAP`]).
pub fn exact_best_response(
    host: &TemporalGraph,
    profile: &StrategyProfile,
    v: Node,
    budget_cap: Option<u64>,
) -> Result<BestResponse> {
    check_agent(host, profile, v)?;
    let current = profile.strategy(v);
    let current_cost = cost_in(&undirected_graph(host, profile)?, profile, v);
    let (problem, sweeps) = cover_problem(host, profile, v)?;
    debug_assert!(problem.min_unreached <= current_cost.unreached);

    let max_size = if current_cost.unreached == problem.min_unreached {
        current_cost.edges.checked_sub(1)
    } else {
        Some(problem.candidates.len())
    };

    let mut search = CoverSearch::new(&problem, budget_cap.unwrap_or(crate::DEFAULT_BUDGET_CAP));
    let mut found = None;
    if let Some(max_size) = max_size {
        for k in 0..=max_size {
            if let Some(c) = search.find(k)? {
                found = Some(c);
                break;
            }
        }
    }
    let evaluations = sweeps + search.visited;

    Ok(match found {
        Some(chosen) => {
            let strategy: BTreeSet<Node> = chosen.iter().map(|&i| problem.candidates[i]).collect();
            let cost = CostVector::new(problem.min_unreached, strategy.len());
            debug_assert_eq!(
                cost,
                crate::game::agent_cost(host, &profile.with_strategy(v, strategy.clone())?, v)?
            );
            BestResponse {
                agent: v,
                improved: cost < current_cost,
                strategy,
                cost,
                current_cost,
                evaluations,
            }
        }
        None => BestResponse {
            agent: v,
            strategy: current.clone(),
            cost: current_cost,
            current_cost,
            improved: false,
            evaluations,
        },
    })
}

//! Strategy profiles, created graphs and agent costs.
//!
//! Costs are compared lexicographically on `(unreached, edges)`. This is the
//! ordering induced by `edges + K * unreached` for any `K > n - 1`; the numeric
//! view with an explicit `K` exists only for reporting.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::graph::{sweep, singleton, DirectedTemporalGraph, TemporalGraph};
use crate::{Error, Node, Result};

/// Cost of one agent, or the sum over agents for social cost.
///
/// The derived `Ord` compares `unreached` first, then `edges`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CostVector {
    pub unreached: usize,
    pub edges: usize,
}

impl CostVector {
    pub fn new(unreached: usize, edges: usize) -> Self {
        CostVector { unreached, edges }
    }

    /// `edges + k * unreached`.
    pub fn numeric(&self, k: u64) -> u64 {
        self.edges as u64 + k * self.unreached as u64
    }

    /// The reporting constant `K = n^2`.
    pub fn default_k(n: usize) -> u64 {
        (n * n) as u64
    }
}

impl Add for CostVector {
    type Output = CostVector;

    fn add(self, rhs: CostVector) -> CostVector {
        CostVector::new(self.unreached + rhs.unreached, self.edges + rhs.edges)
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(unreached={}, edges={})", self.unreached, self.edges)
    }
}

/// For every agent `v`, the set `S_v` of agents it buys an edge to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile {
    strategies: Vec<BTreeSet<Node>>,
}

impl StrategyProfile {
    /// Profile in which nobody buys anything.
    pub fn empty(n: usize) -> Self {
        StrategyProfile {
            strategies: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_strategies(strategies: Vec<BTreeSet<Node>>) -> Result<Self> {
        let p = StrategyProfile { strategies };
        p.validate()?;
        Ok(p)
    }

    /// Builds the profile from `(owner, endpoint)` arcs.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (Node, Node)>) -> Result<Self> {
        let mut p = StrategyProfile::empty(n);
        for (owner, endpoint) in arcs {
            if owner >= n {
                return Err(Error::NodeOutOfRange { node: owner, n });
            }
            p.strategies[owner].insert(endpoint);
        }
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        for (agent, s) in self.strategies.iter().enumerate() {
            if s.contains(&agent) {
                return Err(Error::SelfPurchase(agent));
            }
            if let Some(&endpoint) = s.iter().find(|&&e| e >= n) {
                return Err(Error::EndpointOutOfRange { agent, endpoint, n });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy(&self, v: Node) -> &BTreeSet<Node> {
        &self.strategies[v]
    }

    pub fn strategies(&self) -> &[BTreeSet<Node>] {
        &self.strategies
    }

    /// Replaces `S_v`, returning the new profile.
    pub fn with_strategy(&self, v: Node, s: BTreeSet<Node>) -> Result<Self> {
        let mut p = self.clone();
        p.set_strategy(v, s)?;
        Ok(p)
    }

    pub fn set_strategy(&mut self, v: Node, s: BTreeSet<Node>) -> Result<()> {
        let n = self.n();
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
        if s.contains(&v) {
            return Err(Error::SelfPurchase(v));
        }
        if let Some(&endpoint) = s.iter().find(|&&e| e >= n) {
            return Err(Error::EndpointOutOfRange {
                agent: v,
                endpoint,
                n,
            });
        }
        self.strategies[v] = s;
        Ok(())
    }

    /// All `(owner, endpoint)` pairs in ascending order.
    pub fn arcs(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.strategies
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    pub fn arc_count(&self) -> usize {
        self.strategies.iter().map(BTreeSet::len).sum()
    }

    /// Applies a node permutation: agent `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[Node]) -> Self {
        let mut p = StrategyProfile::empty(self.n());
        for (u, v) in self.arcs() {
            p.strategies[perm[u]].insert(perm[v]);
        }
        p
    }
}

fn check_sizes(host: &TemporalGraph, profile: &StrategyProfile) -> Result<()> {
    if host.n() != profile.n() {
        return Err(Error::SizeMismatch {
            profile: profile.n(),
            host: host.n(),
        });
    }
    Ok(())
}

/// Directed graph of all bought edges, labels copied from the host.
pub fn created_graph(host: &TemporalGraph, profile: &StrategyProfile) -> Result<DirectedTemporalGraph> {
    check_sizes(host, profile)?;
    let mut arcs = Vec::with_capacity(profile.arc_count());
    for (u, v) in profile.arcs() {
        let label = host.label(u, v).ok_or(Error::NotSubgraph { u, v })?;
        arcs.push((u, v, label));
    }
    DirectedTemporalGraph::new(host.n(), arcs)
}

/// Undirected version of the created graph, used for reachability.
pub fn undirected_graph(host: &TemporalGraph, profile: &StrategyProfile) -> Result<TemporalGraph> {
    Ok(created_graph(host, profile)?.undirected())
}

pub(crate) fn cost_in(g: &TemporalGraph, profile: &StrategyProfile, v: Node) -> CostVector {
    let reached = sweep(g.n(), g.edges(), &singleton(g.n(), v), 1).count_ones(..);
    CostVector::new(g.n() - reached, profile.strategy(v).len())
}

pub fn agent_cost(host: &TemporalGraph, profile: &StrategyProfile, v: Node) -> Result<CostVector> {
    if v >= host.n() {
        return Err(Error::NodeOutOfRange { node: v, n: host.n() });
    }
    let g = undirected_graph(host, profile)?;
    Ok(cost_in(&g, profile, v))
}

/// Per-agent cost vectors in agent order.
pub fn agent_costs(host: &TemporalGraph, profile: &StrategyProfile) -> Result<Vec<CostVector>> {
    let g = undirected_graph(host, profile)?;
    Ok((0..host.n()).map(|v| cost_in(&g, profile, v)).collect())
}

/// Sum of all agent costs; `edges` equals the number of created arcs.
pub fn social_cost(host: &TemporalGraph, profile: &StrategyProfile) -> Result<CostVector> {
    Ok(agent_costs(host, profile)?
        .into_iter()
        .fold(CostVector::default(), Add::add))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn four_node_host() -> TemporalGraph {
        TemporalGraph::new(
            4,
            [(0, 1, 1), (1, 2, 1), (0, 2, 2), (1, 3, 2), (0, 3, 2), (2, 3, 3)],
        )
        .unwrap()
    }

    /// v1 buys {v3, v4}, v2 buys {v3, v4}.
    pub(crate) fn four_node_profile() -> StrategyProfile {
        StrategyProfile::from_arcs(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    #[test]
    fn four_node_created_graph_labels() {
        let g = created_graph(&four_node_host(), &four_node_profile()).unwrap();
        let labels: Vec<_> = g.arcs().iter().map(|a| a.label).collect();
        assert_eq!(labels, vec![2, 2, 1, 2]);
        let empty = created_graph(&four_node_host(), &StrategyProfile::empty(4)).unwrap();
        assert_eq!(empty.arc_count(), 0);
    }

    #[test]
    fn double_bought_pair_yields_both_arcs() {
        let p = StrategyProfile::from_arcs(4, [(0, 1), (1, 0)]).unwrap();
        let g = created_graph(&four_node_host(), &p).unwrap();
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.undirected().edge_count(), 1);
    }

    #[test]
    fn four_node_agent_costs() {
        let host = four_node_host();
        let p = four_node_profile();
        assert_eq!(agent_cost(&host, &p, 0).unwrap(), CostVector::new(0, 2));
        let q = p.with_strategy(0, [1].into()).unwrap();
        assert_eq!(agent_cost(&host, &q, 0).unwrap(), CostVector::new(0, 1));
        let e = StrategyProfile::empty(4);
        for v in 0..4 {
            assert_eq!(agent_cost(&host, &e, v).unwrap(), CostVector::new(3, 0));
        }
        assert_eq!(social_cost(&host, &e).unwrap(), CostVector::new(12, 0));
    }

    #[test]
    fn spanning_tree_social_cost() {
        let host = TemporalGraph::complete(5, |_, _| 1).unwrap();
        let p = StrategyProfile::from_arcs(5, (1..5).map(|v| (v, v - 1))).unwrap();
        assert_eq!(social_cost(&host, &p).unwrap(), CostVector::new(0, 4));
    }

    #[test]
    fn profile_validation() {
        assert_eq!(
            StrategyProfile::from_arcs(3, [(0, 0)]),
            Err(Error::SelfPurchase(0))
        );
        assert_eq!(
            StrategyProfile::from_arcs(3, [(0, 3)]),
            Err(Error::EndpointOutOfRange {
                agent: 0,
                endpoint: 3,
                n: 3
            })
        );
        assert!(matches!(
            agent_cost(&four_node_host(), &StrategyProfile::empty(5), 0),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn lexicographic_matches_numeric_for_large_k() {
        let n = 6;
        let k = (n - 1) as u64 + 1;
        // An agent misses at most n - 1 others and buys at most n - 1 edges.
        let all: Vec<CostVector> = (0..n)
            .flat_map(|a| (0..n).map(move |b| CostVector::new(a, b)))
            .collect();
        for a in &all {
            for b in &all {
                assert_eq!(a.cmp(b), a.numeric(k).cmp(&b.numeric(k)), "{a} vs {b}");
                let big = CostVector::default_k(n);
                assert_eq!(a.cmp(b), a.numeric(big).cmp(&b.numeric(big)));
            }
        }
    }
}

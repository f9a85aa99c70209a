//! Equilibrium checks and structural audits of created graphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::game::{agent_costs, created_graph, undirected_graph, CostVector, StrategyProfile};
use crate::graph::{singleton, sweep, DirectedTemporalGraph, TemporalGraph};
use crate::response::{exact_best_response, greedy_best_response, BestResponse};
use crate::{Error, Label, Node, NodeSet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Nash equilibrium: no improving strategy change at all.
    Ne,
    /// Greedy equilibrium: no improving single addition or deletion.
    Ge,
}

/// An improving strategy change for one agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub agent: Node,
    pub strategy: BTreeSet<Node>,
    pub cost: CostVector,
    pub current_cost: CostVector,
}

impl From<BestResponse> for Deviation {
    fn from(r: BestResponse) -> Self {
        Deviation {
            agent: r.agent,
            strategy: r.strategy,
            cost: r.cost,
            current_cost: r.current_cost,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub mode: Mode,
    /// True iff `witness` is `None`.
    pub stable: bool,
    pub witness: Option<Deviation>,
    pub costs: Vec<CostVector>,
    pub social_cost: CostVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<StructuralAudit>,
}

fn check_with(
    host: &TemporalGraph,
    profile: &StrategyProfile,
    mode: Mode,
    mut respond: impl FnMut(Node) -> Result<BestResponse>,
) -> Result<EquilibriumReport> {
    let costs = agent_costs(host, profile)?;
    let social_cost = costs.iter().fold(CostVector::default(), |a, &b| a + b);
    let mut witness = None;
    for v in 0..host.n() {
        let r = respond(v)?;
        if r.improved {
            witness = Some(Deviation::from(r));
            break;
        }
    }
    Ok(EquilibriumReport {
        mode,
        stable: witness.is_none(),
        witness,
        costs,
        social_cost,
        audit: None,
    })
}

/// Greedy-equilibrium check; the witness is the first agent (ascending) with
/// a greedy improving move, together with its best such move.
pub fn check_ge(host: &TemporalGraph, profile: &StrategyProfile) -> Result<EquilibriumReport> {
    check_with(host, profile, Mode::Ge, |v| greedy_best_response(host, profile, v))
}

/// Nash-equilibrium check via exact best responses.
pub fn check_ne(host: &TemporalGraph, profile: &StrategyProfile, budget_cap: Option<u64>) -> Result<EquilibriumReport> {
    check_with(host, profile, Mode::Ne, |v| {
        exact_best_response(host, profile, v, budget_cap)
    })
}

pub fn check(
    host: &TemporalGraph,
    profile: &StrategyProfile,
    mode: Mode,
    budget_cap: Option<u64>,
) -> Result<EquilibriumReport> {
    match mode {
        Mode::Ne => check_ne(host, profile, budget_cap),
        Mode::Ge => check_ge(host, profile),
    }
}

fn necessary_in(g: &TemporalGraph, owner: Node, endpoint: Node) -> NodeSet {
    let n = g.n();
    let mut with = sweep(n, g.edges(), &singleton(n, owner), 1);
    let without = g.without_edge(owner, endpoint);
    with.difference_with(&sweep(n, without.edges(), &singleton(n, owner), 1));
    with
}

/// Nodes the owner of `(owner, endpoint)` reaches only through that arc.
///
/// If the endpoint also bought the same pair, removing one arc leaves the
/// undirected edge in place and the set is empty.
pub fn necessary_set(host: &TemporalGraph, profile: &StrategyProfile, owner: Node, endpoint: Node) -> Result<NodeSet> {
    if owner >= profile.n() || !profile.strategy(owner).contains(&endpoint) {
        return Err(Error::ArcNotPresent { owner, endpoint });
    }
    let g = undirected_graph(host, profile)?;
    if profile.strategy(endpoint).contains(&owner) {
        return Ok(NodeSet::with_capacity(g.n()));
    }
    Ok(necessary_in(&g, owner, endpoint))
}

/// Necessary sets of every arc, keyed by `(owner, endpoint)`.
pub fn necessary_sets(host: &TemporalGraph, profile: &StrategyProfile) -> Result<BTreeMap<(Node, Node), NodeSet>> {
    let g = undirected_graph(host, profile)?;
    Ok(profile
        .arcs()
        .map(|(u, v)| {
            let a = if profile.strategy(v).contains(&u) {
                NodeSet::with_capacity(g.n())
            } else {
                necessary_in(&g, u, v)
            };
            ((u, v), a)
        })
        .collect())
}

/// Five nodes and four arcs matching the forbidden configuration: `z` is
/// adjacent to `u1` and `u2`, and each `u_i` owns two distinct arcs, at least
/// as late as its edge to `z`, that are necessary for reaching `x` and `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenStructure {
    pub z: Node,
    pub u1: Node,
    pub u2: Node,
    pub x: Node,
    pub y: Node,
    pub e1x: (Node, Node),
    pub e1y: (Node, Node),
    pub e2x: (Node, Node),
    pub e2y: (Node, Node),
}

/// Exhaustive search over `z`, neighbor pairs `u1 < u2`, and the qualifying
/// arcs of each `u_i`, given the necessary set of every arc.
pub(crate) fn search_forbidden(
    g: &TemporalGraph,
    arcs: &DirectedTemporalGraph,
    necessary: &BTreeMap<(Node, Node), NodeSet>,
) -> Option<ForbiddenStructure> {
    let n = g.n();
    // node -> necessary arc of `u` reaching it, restricted to arcs labeled >= min_label
    let targets = |u: Node, z: Node, min_label: Label| -> BTreeMap<Node, (Node, Node)> {
        let mut m = BTreeMap::new();
        for a in arcs.out_arcs(u) {
            if a.endpoint == z || a.label < min_label {
                continue;
            }
            if let Some(set) = necessary.get(&(a.owner, a.endpoint)) {
                for x in set.ones() {
                    m.entry(x).or_insert((a.owner, a.endpoint));
                }
            }
        }
        m
    };
    for z in 0..n {
        let nbrs: Vec<(Node, Label)> = g.neighbors(z).collect();
        let per: Vec<BTreeMap<Node, (Node, Node)>> =
            nbrs.iter().map(|&(u, l)| targets(u, z, l)).collect();
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                let common: Vec<Node> = per[i]
                    .keys()
                    .filter(|x| per[j].contains_key(x))
                    .copied()
                    .collect();
                // The four arcs must be distinct: x and y need different arcs at both u_i.
                for (a, &x) in common.iter().enumerate() {
                    for &y in &common[a + 1..] {
                        if per[i][&x] == per[i][&y] || per[j][&x] == per[j][&y] {
                            continue;
                        }
                        return Some(ForbiddenStructure {
                            z,
                            u1: nbrs[i].0,
                            u2: nbrs[j].0,
                            x,
                            y,
                            e1x: per[i][&x],
                            e1y: per[i][&y],
                            e2x: per[j][&x],
                            e2y: per[j][&y],
                        });
                    }
                }
            }
        }
    }
    None
}

pub fn find_forbidden_structure(host: &TemporalGraph, profile: &StrategyProfile) -> Result<Option<ForbiddenStructure>> {
    let arcs = created_graph(host, profile)?;
    let g = arcs.undirected();
    let necessary = necessary_sets(host, profile)?;
    Ok(search_forbidden(&g, &arcs, &necessary))
}

/// Smallest `c` with `c >= sqrt(6n) / 3`, i.e. `9c^2 >= 6n`.
pub fn large_node_member_count(n: usize) -> usize {
    ceil_scaled_sqrt(6 * n)
}

/// Smallest `c` with `c >= 2 sqrt(6n) / 3`, i.e. `9c^2 >= 24n`.
pub fn large_node_trim_count(n: usize) -> usize {
    ceil_scaled_sqrt(24 * n)
}

/// Smallest `c` with `9c^2 >= m`.
fn ceil_scaled_sqrt(m: usize) -> usize {
    let mut c = ((m as f64).sqrt() / 3.0).floor() as usize;
    while 9 * c * c < m {
        c += 1;
    }
    while c > 0 && 9 * (c - 1) * (c - 1) >= m {
        c -= 1;
    }
    c
}

/// `arcs >= sqrt(6) n^{3/2} + n`, evaluated exactly.
pub fn reaches_density_threshold(arcs: usize, n: usize) -> bool {
    if arcs < n {
        return false;
    }
    let d = (arcs - n) as u128;
    let n = n as u128;
    d * d >= 6 * n * n * n
}

/// A node `z` with in-neighbors `members`, each of which owns
/// `out_arcs[i]`: arcs not pointing at `z` whose labels are at least the label
/// of its arc to `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargeNode {
    pub z: Node,
    pub members: Vec<Node>,
    pub out_arcs: Vec<Vec<(Node, Label)>>,
}

/// Locates the dense local structure guaranteed in any directed temporal
/// graph with at least `sqrt(6) n^{3/2} + n` arcs.
///
/// Every node drops its `ceil(2 sqrt(6n) / 3)` latest out-arcs; by counting,
/// some node keeps `ceil(sqrt(6n) / 3)` in-arcs, and each of those in-neighbors
/// dropped only arcs at least as late as the arc it kept.
pub fn find_large_node(g: &DirectedTemporalGraph) -> Result<LargeNode> {
    let n = g.n();
    if !reaches_density_threshold(g.arc_count(), n) {
        return Err(Error::PreconditionViolated(format!(
            "{} arcs is below sqrt(6) n^(3/2) + n for n = {n}",
            g.arc_count()
        )));
    }
    let trim = large_node_trim_count(n);
    let want = large_node_member_count(n);

    let mut dropped: Vec<Vec<(Node, Label)>> = vec![Vec::new(); n];
    let mut kept_in: Vec<Vec<Node>> = vec![Vec::new(); n];
    for u in 0..n {
        let mut out: Vec<(Node, Label)> = g.out_arcs(u).iter().map(|a| (a.endpoint, a.label)).collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let cut = trim.min(out.len());
        for &(v, _) in &out[cut..] {
            kept_in[v].push(u);
        }
        out.truncate(cut);
        dropped[u] = out;
    }
    let z = (0..n)
        .find(|&z| kept_in[z].len() >= want)
        .ok_or_else(|| Error::PreconditionViolated("no node keeps enough in-arcs".into()))?;
    let members: Vec<Node> = kept_in[z].iter().copied().take(want).collect();
    let out_arcs = members.iter().map(|&u| dropped[u].clone()).collect();
    Ok(LargeNode { z, members, out_arcs })
}

/// Re-checks the three defining conditions of a [`LargeNode`] against `g`.
pub fn verify_large_node(g: &DirectedTemporalGraph, w: &LargeNode) -> bool {
    let n = g.n();
    let distinct: BTreeSet<Node> = w.members.iter().copied().collect();
    if w.members.len() != large_node_member_count(n) || distinct.len() != w.members.len() {
        return false;
    }
    if w.out_arcs.len() != w.members.len() {
        return false;
    }
    w.members.iter().zip(&w.out_arcs).all(|(&u, arcs)| {
        let Some(base) = g.arc_label(u, w.z) else {
            return false;
        };
        let ends: BTreeSet<Node> = arcs.iter().map(|a| a.0).collect();
        9 * arcs.len() * arcs.len() >= 24 * n
            && ends.len() == arcs.len()
            && arcs
                .iter()
                .all(|&(v, l)| v != w.z && g.arc_label(u, v) == Some(l) && l >= base)
    })
}

/// Edge-count bounds that every greedy equilibrium must satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBoundAudit {
    pub arcs: usize,
    pub lifetime: Label,
    /// `t (n - 2)`; only defined for `n > 2` and `t > 1`.
    pub lifetime_bound: Option<usize>,
    pub within_lifetime_bound: bool,
    /// Whether `arcs >= sqrt(6) n^{3/2} + n`.
    pub density_threshold_reached: bool,
    /// A greedy equilibrium violating either bound.
    pub falsification: bool,
}

/// Assumes `profile` is a greedy equilibrium on `host`.
pub fn audit_edge_bounds(host: &TemporalGraph, profile: &StrategyProfile) -> EdgeBoundAudit {
    let n = host.n();
    let t = host.lifetime();
    let arcs = profile.arc_count();
    let lifetime_bound = (n > 2 && t > 1).then(|| t as usize * (n - 2));
    let within_lifetime_bound = lifetime_bound.is_none_or(|b| arcs <= b);
    let density_threshold_reached = reaches_density_threshold(arcs, n);
    EdgeBoundAudit {
        arcs,
        lifetime: t,
        lifetime_bound,
        within_lifetime_bound,
        density_threshold_reached,
        falsification: !within_lifetime_bound || density_threshold_reached,
    }
}

/// All structural properties checked on verified equilibria.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralAudit {
    pub antiparallel_free: bool,
    /// Arcs whose necessary set is empty.
    pub unnecessary_arcs: Vec<(Node, Node)>,
    pub forbidden_structure: Option<ForbiddenStructure>,
    pub bounds: EdgeBoundAudit,
}

impl StructuralAudit {
    /// True when none of the properties guaranteed for greedy equilibria fails.
    pub fn clean(&self) -> bool {
        self.antiparallel_free
            && self.unnecessary_arcs.is_empty()
            && self.forbidden_structure.is_none()
            && !self.bounds.falsification
    }
}

pub fn structural_audit(host: &TemporalGraph, profile: &StrategyProfile) -> Result<StructuralAudit> {
    let arcs = created_graph(host, profile)?;
    let g = arcs.undirected();
    let necessary = necessary_sets(host, profile)?;
    Ok(StructuralAudit {
        antiparallel_free: arcs.antiparallel_pairs().is_empty(),
        unnecessary_arcs: necessary
            .iter()
            .filter(|(_, a)| a.is_clear())
            .map(|(&k, _)| k)
            .collect(),
        forbidden_structure: search_forbidden(&g, &arcs, &necessary),
        bounds: audit_edge_bounds(host, profile),
    })
}

/// Copy of `host` where every pair outside the created graph gets label `t + 1`.
pub fn freeze_relabel(host: &TemporalGraph, profile: &StrategyProfile) -> Result<TemporalGraph> {
    let created = undirected_graph(host, profile)?;
    let frozen = host.lifetime() + 1;
    let relabeled = host.edges().iter().map(|e| {
        let l = if created.has_edge(e.u, e.v) { e.label } else { frozen };
        (e.u, e.v, l)
    });
    if created.edge_count() == host.edge_count() {
        return TemporalGraph::with_lifetime(host.n(), host.lifetime(), relabeled);
    }
    TemporalGraph::with_lifetime(host.n(), frozen, relabeled)
}

//! Temporal graphs and non-strict temporal reachability.
//!
//! A temporal path may use consecutive edges with equal labels (traversal takes
//! zero time), so reachability is computed by a single ascending sweep over the
//! label classes: inside one class, whole connected components touching the
//! already reached set become reached.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;

use crate::union_find::UnionFind;
use crate::{Error, Label, Node, NodeSet, Result};

/// Undirected labeled edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: Node,
    pub v: Node,
    pub label: Label,
}

impl Edge {
    pub fn new(a: Node, b: Node, label: Label) -> Self {
        Edge {
            u: a.min(b),
            v: a.max(b),
            label,
        }
    }

    pub fn other(&self, x: Node) -> Node {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: Node) -> bool {
        self.u == x || self.v == x
    }
}

/// Undirected temporal graph on nodes `0..n` with at most one label per pair.
///
/// Values are immutable once built. Hosts additionally satisfy
/// [`TemporalGraph::validate_host`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalGraph {
    n: usize,
    lifetime: Label,
    /// Row-major `n * n` label matrix, 0 where no edge exists.
    matrix: Vec<Label>,
    /// Sorted by `(label, u, v)`.
    edges: Vec<Edge>,
}

impl TemporalGraph {
    /// Builds a graph whose lifetime is its largest label (0 when edgeless).
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node, Label)>,
    {
        Self::build(n, None, edges)
    }

    /// Builds a graph with a declared lifetime; every label must lie in `1..=lifetime`.
    pub fn with_lifetime<I>(n: usize, lifetime: Label, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node, Label)>,
    {
        Self::build(n, Some(lifetime), edges)
    }

    /// Complete graph labeled by `label(u, v)` for every `u < v`.
    pub fn complete(n: usize, mut label: impl FnMut(Node, Node) -> Label) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, label(u, v)));
            }
        }
        Self::new(n, edges)
    }

    fn build<I>(n: usize, declared: Option<Label>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node, Label)>,
    {
        let mut matrix = vec![0; n * n];
        let mut list = Vec::new();
        for (a, b, label) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = Edge::new(a, b, label);
            if label == 0 || declared.is_some_and(|t| label > t) {
                return Err(Error::InvalidLabel {
                    u: e.u,
                    v: e.v,
                    label,
                    lifetime: declared.unwrap_or(Label::MAX),
                });
            }
            if matrix[e.u * n + e.v] != 0 {
                return Err(Error::DuplicatePair(e.u, e.v));
            }
            matrix[e.u * n + e.v] = label;
            matrix[e.v * n + e.u] = label;
            list.push(e);
        }
        list.sort_by_key(|e| (e.label, e.u, e.v));
        let max_label = list.last().map_or(0, |e| e.label);
        Ok(TemporalGraph {
            n,
            lifetime: declared.unwrap_or(max_label),
            matrix,
            edges: list,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lifetime(&self) -> Label {
        self.lifetime
    }

    /// Edges sorted by `(label, u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, u: Node, v: Node) -> Option<Label> {
        if u >= self.n || v >= self.n {
            return None;
        }
        match self.matrix[u * self.n + v] {
            0 => None,
            l => Some(l),
        }
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.label(u, v).is_some()
    }

    pub fn neighbors(&self, u: Node) -> impl Iterator<Item = (Node, Label)> + '_ {
        let row = &self.matrix[u * self.n..(u + 1) * self.n];
        row.iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(v, &l)| (v, l))
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Distinct labels in ascending order.
    pub fn label_set(&self) -> BTreeSet<Label> {
        self.edges.iter().map(|e| e.label).collect()
    }

    /// Checks the host invariants: complete, labels exactly `{1, ..., lifetime}`.
    pub fn validate_host(&self) -> Result<()> {
        if !self.is_complete() {
            return Err(Error::IncompleteHost {
                missing: self.n * self.n.saturating_sub(1) / 2 - self.edges.len(),
            });
        }
        let labels = self.label_set();
        for l in 1..=self.lifetime {
            if !labels.contains(&l) {
                return Err(Error::NonConsecutiveLabels(l));
            }
        }
        Ok(())
    }

    /// Order-preserving renumbering of the labels to `1..=t'`.
    pub fn compress_labels(&self) -> TemporalGraph {
        let rank: BTreeMap<Label, Label> = self
            .label_set()
            .into_iter()
            .zip(1..)
            .collect();
        Self::new(self.n, self.edges.iter().map(|e| (e.u, e.v, rank[&e.label])))
            .expect("relabeling keeps a valid graph")
    }

    /// Same node set, keeping only the edges accepted by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(&Edge) -> bool) -> TemporalGraph {
        Self::with_lifetime(
            self.n,
            self.lifetime,
            self.edges
                .iter()
                .filter(|e| keep(e))
                .map(|e| (e.u, e.v, e.label)),
        )
        .expect("subset of a valid graph")
    }

    pub fn without_edge(&self, a: Node, b: Node) -> TemporalGraph {
        self.filter_edges(|e| !(e.touches(a) && e.touches(b)))
    }

    /// Checks that every edge of `self` is an edge of `host` with the same label.
    pub fn check_subgraph_of(&self, host: &TemporalGraph) -> Result<()> {
        if self.n != host.n {
            return Err(Error::SizeMismatch {
                profile: self.n,
                host: host.n,
            });
        }
        for e in &self.edges {
            if host.label(e.u, e.v) != Some(e.label) {
                return Err(Error::NotSubgraph { u: e.u, v: e.v });
            }
        }
        Ok(())
    }
}

/// Ascending label-class sweep shared by all reachability queries.
///
/// `edges` must be sorted by label. Only classes with label `>= min_label` are
/// used, which gives the nodes reachable from `sources` by temporal paths that
/// start no earlier than `min_label`.
pub(crate) fn sweep(n: usize, edges: &[Edge], sources: &NodeSet, min_label: Label) -> NodeSet {
    let mut reached = sources.clone();
    let mut uf = UnionFind::new(n);
    let mut touched: Vec<Node> = Vec::new();
    let start = edges.partition_point(|e| e.label < min_label);
    let mut i = start;
    while i < edges.len() {
        let label = edges[i].label;
        let mut j = i;
        while j < edges.len() && edges[j].label == label {
            let e = edges[j];
            uf.union(e.u, e.v);
            touched.push(e.u);
            touched.push(e.v);
            j += 1;
        }
        // Components of this class that contain a reached node.
        let mut hit: Vec<Node> = touched
            .iter()
            .filter(|&&x| reached.contains(x))
            .map(|&x| uf.find(x))
            .collect();
        if !hit.is_empty() {
            hit.sort_unstable();
            hit.dedup();
            for k in 0..touched.len() {
                let x = touched[k];
                if hit.binary_search(&uf.find(x)).is_ok() {
                    reached.insert(x);
                }
            }
        }
        uf.reset(&touched);
        touched.clear();
        i = j;
    }
    reached
}

pub(crate) fn singleton(n: usize, u: Node) -> NodeSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert(u);
    s
}

fn check_node(g: &TemporalGraph, u: Node) -> Result<()> {
    if u >= g.n {
        return Err(Error::NodeOutOfRange { node: u, n: g.n });
    }
    Ok(())
}

/// Nodes reachable from `u` by a temporal path with non-decreasing labels.
pub fn reach(g: &TemporalGraph, u: Node) -> Result<NodeSet> {
    check_node(g, u)?;
    Ok(sweep(g.n, &g.edges, &singleton(g.n, u), 1))
}

/// True iff consecutive nodes are joined by edges with non-decreasing labels.
pub fn is_temporal_path(g: &TemporalGraph, nodes: &[Node]) -> bool {
    let mut last = 0;
    for w in nodes.windows(2) {
        match g.label(w[0], w[1]) {
            Some(l) if l >= last => last = l,
            _ => return false,
        }
    }
    nodes.iter().all(|&x| x < g.n)
}

pub fn is_temporally_connected(g: &TemporalGraph) -> bool {
    (0..g.n).all(|u| sweep(g.n, &g.edges, &singleton(g.n, u), 1).count_ones(..) == g.n)
}

/// A spanner is a temporally connected subgraph of `host` on all its nodes.
pub fn is_temporal_spanner(host: &TemporalGraph, sub: &TemporalGraph) -> Result<bool> {
    sub.check_subgraph_of(host)?;
    Ok(is_temporally_connected(sub))
}

/// A spanner from which no single edge can be removed.
pub fn is_minimal_spanner(host: &TemporalGraph, sub: &TemporalGraph) -> Result<bool> {
    if !is_temporal_spanner(host, sub)? {
        return Ok(false);
    }
    Ok(sub
        .edges
        .iter()
        .all(|e| !is_temporally_connected(&sub.without_edge(e.u, e.v))))
}

/// Arc `(owner, endpoint)` of a directed temporal graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub owner: Node,
    pub endpoint: Node,
    pub label: Label,
}

/// Directed temporal graph; arcs point away from the agent that bought them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedTemporalGraph {
    n: usize,
    /// Sorted by `(owner, endpoint)`.
    arcs: Vec<Arc>,
}

impl DirectedTemporalGraph {
    /// Antiparallel arcs must carry the same label.
    pub fn new<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node, Label)>,
    {
        let mut seen: BTreeMap<(Node, Node), Label> = BTreeMap::new();
        let mut list = Vec::new();
        for (a, b, label) in arcs {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if label == 0 {
                return Err(Error::InvalidLabel {
                    u: a,
                    v: b,
                    label,
                    lifetime: Label::MAX,
                });
            }
            if let Some(&l) = seen.get(&(b, a)) {
                if l != label {
                    return Err(Error::ArcLabelMismatch(a, b));
                }
            }
            if seen.insert((a, b), label).is_some() {
                return Err(Error::DuplicatePair(a, b));
            }
            list.push(Arc {
                owner: a,
                endpoint: b,
                label,
            });
        }
        list.sort();
        Ok(DirectedTemporalGraph { n, arcs: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, owner: Node, endpoint: Node) -> bool {
        self.arc_label(owner, endpoint).is_some()
    }

    pub fn arc_label(&self, owner: Node, endpoint: Node) -> Option<Label> {
        self.arcs
            .binary_search_by_key(&(owner, endpoint), |a| (a.owner, a.endpoint))
            .ok()
            .map(|i| self.arcs[i].label)
    }

    pub fn out_arcs(&self, owner: Node) -> &[Arc] {
        let lo = self.arcs.partition_point(|a| a.owner < owner);
        let hi = self.arcs.partition_point(|a| a.owner <= owner);
        &self.arcs[lo..hi]
    }

    /// Pairs `(u, v)` where both `(u, v)` and `(v, u)` are arcs, with `u < v`.
    pub fn antiparallel_pairs(&self) -> Vec<(Node, Node)> {
        self.arcs
            .iter()
            .filter(|a| a.owner < a.endpoint && self.has_arc(a.endpoint, a.owner))
            .map(|a| (a.owner, a.endpoint))
            .collect()
    }

    /// Forgets directions and merges antiparallel arcs.
    pub fn undirected(&self) -> TemporalGraph {
        let pairs: BTreeMap<(Node, Node), Label> = self
            .arcs
            .iter()
            .map(|a| ((a.owner.min(a.endpoint), a.owner.max(a.endpoint)), a.label))
            .collect();
        TemporalGraph::new(self.n, pairs.into_iter().map(|((u, v), l)| (u, v, l)))
            .expect("arcs form a valid graph")
    }
}

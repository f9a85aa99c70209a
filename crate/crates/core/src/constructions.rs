//! Generators for the instance families studied for this game.
//!
//! Every generator is deterministic. Where arc ownership is not forced by the
//! construction, a fixed convention is used and documented per generator.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::StrategyProfile;
use crate::graph::{DirectedTemporalGraph, TemporalGraph};
use crate::setcover::SetCoverInstance;
use crate::{Error, Label, Node, Result};

/// Host graph and profile, with a display name per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub host: TemporalGraph,
    pub profile: StrategyProfile,
    pub names: Vec<String>,
}

impl Instance {
    pub fn node(&self, name: &str) -> Option<Node> {
        self.names.iter().position(|s| s == name)
    }
}

/// Hypercube of dimension `d` inside a complete host on `2^d` bitstrings.
///
/// Bit position `i` (1-based, read left to right) is integer bit `d - i`, so
/// node indices order bitstrings lexicographically. Pairs differing only in
/// position `i` get label `i`; all other pairs get `d + 1`. Each hypercube
/// edge is bought by its lexicographically smaller endpoint.
pub fn gen_hypercube(d: u32) -> Result<Instance> {
    if !(3..=16).contains(&d) {
        return Err(Error::InvalidParameter(format!("hypercube dimension must be in 3..=16, got {d}")));
    }
    let n = 1usize << d;
    let host = TemporalGraph::complete(n, |u, v| {
        let x = u ^ v;
        if x.is_power_of_two() {
            d - x.trailing_zeros()
        } else {
            d + 1
        }
    })?;
    let profile = StrategyProfile::from_arcs(
        n,
        (0..n).flat_map(|u| (0..d).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v)),
    )?;
    let names = (0..n).map(|u| format!("{:0width$b}", u, width = d as usize)).collect();
    Ok(Instance { host, profile, names })
}

/// Equilibrium with `2(n - 2)` arcs on a lifetime-2 host (nodes `v1..vn`).
///
/// `{v2, v3}` and `{v1, vi}` for `i >= 4` have label 1, everything else 2. Arcs:
/// `(v1, v2)`, `(v2, v3)`, and `(v3, vi)`, `(vi, v1)` for `i >= 4`.
pub fn gen_t2_family(n: usize) -> Result<Instance> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("t=2 family needs n >= 5, got {n}")));
    }
    let host = TemporalGraph::complete(n, |u, v| {
        if (u, v) == (1, 2) || (u == 0 && v >= 3) {
            1
        } else {
            2
        }
    })?;
    let mut arcs = vec![(0, 1), (1, 2)];
    for i in 3..n {
        arcs.push((2, i));
        arcs.push((i, 0));
    }
    let profile = StrategyProfile::from_arcs(n, arcs)?;
    let names = (1..=n).map(|i| format!("v{i}")).collect();
    Ok(Instance { host, profile, names })
}

/// Starting configuration of an improving-response cycle, plus its schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrCycle {
    pub instance: Instance,
    pub schedule: Vec<Node>,
}

/// Eight agents `u, v1..v6, x` (indices 0..8) forming a best-response cycle.
///
/// Pairs that carry no drawn edge get label 5, one above the largest drawn
/// label, so they never help as intermediate hops.
pub fn gen_br_cycle() -> BrCycle {
    const U: Node = 0;
    const X: Node = 7;
    let v = |i: usize| i;
    let drawn: [(Node, Node, Label); 14] = [
        (v(2), v(1), 2),
        (v(2), v(3), 1),
        (v(4), v(3), 2),
        (v(4), v(5), 1),
        (v(6), v(5), 2),
        (v(6), v(1), 1),
        (v(1), U, 3),
        (v(5), U, 3),
        (X, v(1), 4),
        (X, v(2), 4),
        (X, v(3), 4),
        (X, v(4), 4),
        (X, v(5), 4),
        (X, v(6), 4),
    ];
    let mut labels = vec![vec![5; 8]; 8];
    for &(a, b, l) in &drawn {
        labels[a][b] = l;
        labels[b][a] = l;
    }
    // The dashed edge (v3, u) is absent initially but has label 3 in the host.
    labels[v(3)][U] = 3;
    labels[U][v(3)] = 3;
    let host = TemporalGraph::complete(8, |a, b| labels[a][b]).expect("valid labels");
    let profile = StrategyProfile::from_arcs(8, drawn.iter().map(|&(a, b, _)| (a, b))).expect("valid arcs");
    let mut names = vec!["u".to_string()];
    names.extend((1..=6).map(|i| format!("v{i}")));
    names.push("x".into());
    BrCycle {
        instance: Instance { host, profile, names },
        schedule: vec![v(1), v(3), v(5), v(1), v(3), v(5)],
    }
}

/// Reduction instance together with the agent whose response encodes the cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub instance: Instance,
    pub x: Node,
}

fn require_coverable(sc: &SetCoverInstance) -> Result<()> {
    if sc.k() == 0 || sc.m() == 0 {
        return Err(Error::InvalidInstance("empty universe or family".into()));
    }
    if !sc.is_coverable() {
        return Err(Error::InvalidInstance("the sets do not cover the universe".into()));
    }
    Ok(())
}

/// Node indices for the sets, elements and set-element connectors.
struct Layout {
    names: Vec<String>,
    set: Vec<Node>,
    elem: Vec<Node>,
    /// `(set index, element, node)` for every membership.
    link: Vec<(usize, usize, Node)>,
}

fn layout(sc: &SetCoverInstance, prefix: &[&str]) -> Layout {
    let mut names: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    let mut push = |name: String| {
        names.push(name);
        names.len() - 1
    };
    let set = (0..sc.m()).map(|i| push(format!("M{}", i + 1))).collect();
    let elem = (0..sc.k()).map(|j| push(format!("u{}", j + 1))).collect();
    let mut link = Vec::new();
    for (i, s) in sc.sets().iter().enumerate() {
        for &j in s {
            link.push((i, j, push(format!("v{}_{}", i + 1, j + 1))));
        }
    }
    Layout { names, set, elem, link }
}

/// Host and profile in which the best response of `x` is a minimum set cover.
///
/// Nodes: `x`, the sets `M_i`, the elements `u_j`, and a connector `v_ij` for
/// every membership `u_j ∈ M_i`. Edges at `x` and the edges `{M_i, v_ij}` have
/// label 1, all others label 2. The created graph is the path
/// `M_1 - ... - M_m` plus `M_i - v_ij - u_j`; each edge is bought by its
/// lower-indexed endpoint and `x` buys nothing.
pub fn gen_reduction_br(sc: &SetCoverInstance) -> Result<Reduction> {
    require_coverable(sc)?;
    let l = layout(sc, &["x"]);
    let x = 0;
    let n = l.names.len();
    let mut label = vec![vec![2 as Label; n]; n];
    for w in 0..n {
        label[x][w] = 1;
        label[w][x] = 1;
    }
    let mut edges = Vec::new();
    for w in l.set.windows(2) {
        edges.push((w[0], w[1]));
    }
    for &(i, j, c) in &l.link {
        label[l.set[i]][c] = 1;
        label[c][l.set[i]] = 1;
        edges.push((l.set[i], c));
        edges.push((c, l.elem[j]));
    }
    let host = TemporalGraph::complete(n, |a, b| label[a][b])?;
    let profile = StrategyProfile::from_arcs(n, edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))))?;
    Ok(Reduction {
        instance: Instance { host, profile, names: l.names },
        x,
    })
}

/// Host and profile that are a Nash equilibrium iff the attached cover is minimum.
///
/// Nodes: `x`, `a`, sets, elements, connectors `v_ij`, and a node `w_i` for
/// every set outside the cover. Labels (everything else is 3):
/// - 1 on `{M_i, x}`, `{M_i, w_i}`, `{M_i, v_ij}` for `M_i` outside the cover;
/// - 2 on `{M_i, x}`, `{M_i, v_ij}` for `M_i` in the cover, on every
///   `{w_i, x}`, on `{u_k, a}` and on the element path `{u_j, u_j+1}`.
///
/// `x` buys exactly the cover; all other arcs are fixed by the construction.
pub fn gen_reduction_ne(sc: &SetCoverInstance) -> Result<Reduction> {
    require_coverable(sc)?;
    let cover = sc
        .cover()
        .ok_or_else(|| Error::InvalidInstance("no candidate cover given".into()))?
        .clone();
    let mut l = layout(sc, &["x", "a"]);
    let (x, a) = (0, 1);
    let mut w = vec![None; sc.m()];
    for i in (0..sc.m()).filter(|i| !cover.contains(i)) {
        l.names.push(format!("w{}", i + 1));
        w[i] = Some(l.names.len() - 1);
    }
    let n = l.names.len();
    let mut label = vec![vec![3 as Label; n]; n];
    let mut set_label = |p: Node, q: Node, v: Label| {
        label[p][q] = v;
        label[q][p] = v;
    };
    for i in 0..sc.m() {
        let m = l.set[i];
        match w[i] {
            Some(wi) => {
                set_label(m, x, 1);
                set_label(m, wi, 1);
                set_label(wi, x, 2);
            }
            None => set_label(m, x, 2),
        }
    }
    for &(i, _, c) in &l.link {
        set_label(l.set[i], c, if cover.contains(&i) { 2 } else { 1 });
    }
    let last = *l.elem.last().expect("non-empty universe");
    set_label(last, a, 2);
    for p in l.elem.windows(2) {
        set_label(p[0], p[1], 2);
    }

    let mut arcs = Vec::new();
    for p in l.elem.windows(2) {
        arcs.push((p[0], p[1]));
    }
    for &(i, j, c) in &l.link {
        arcs.push((c, l.set[i]));
        arcs.push((l.elem[j], c));
    }
    arcs.push((last, a));
    arcs.push((a, x));
    for i in 0..sc.m() {
        arcs.push((a, l.set[i]));
        match w[i] {
            Some(wi) => {
                arcs.push((a, wi));
                arcs.push((l.set[i], wi));
                arcs.push((wi, x));
            }
            None => arcs.push((x, l.set[i])),
        }
    }
    let host = TemporalGraph::complete(n, |p, q| label[p][q])?;
    let profile = StrategyProfile::from_arcs(n, arcs)?;
    Ok(Reduction {
        instance: Instance { host, profile, names: l.names },
        x,
    })
}

/// Equilibrium on a complete host with labels in `{1, 2}`.
///
/// One of the two label classes is connected (every cut of the label-1 class
/// is crossed by label-2 edges), so it contains a spanning tree; the tree is a
/// BFS tree from node 0 and every node buys the edge to its parent.
pub fn gen_t2_equilibrium(host: &TemporalGraph) -> Result<StrategyProfile> {
    if !host.is_complete() {
        return Err(Error::PreconditionViolated("host is not complete".into()));
    }
    if host.lifetime() > 2 {
        return Err(Error::PreconditionViolated(format!(
            "host lifetime is {}, expected at most 2",
            host.lifetime()
        )));
    }
    let n = host.n();
    for class in [1, 2] {
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        if n > 0 {
            seen[0] = true;
            queue.push_back(0);
        }
        while let Some(u) = queue.pop_front() {
            for (v, l) in host.neighbors(u) {
                if l == class && !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            return StrategyProfile::from_arcs(
                n,
                parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (v, p))),
            );
        }
    }
    Err(Error::PreconditionViolated("neither label class is connected".into()))
}

/// Complete host with labels drawn uniformly from `1..=t`, then compressed to
/// consecutive labels.
pub fn gen_random_host(n: usize, t: Label, seed: u64) -> Result<TemporalGraph> {
    let pairs = n * n.saturating_sub(1) / 2;
    if t < 1 || (pairs > 0 && t as usize > pairs) {
        return Err(Error::InvalidParameter(format!("t must be in 1..={pairs}, got {t}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = TemporalGraph::complete(n, |_, _| rng.random_range(1..=t))?;
    Ok(g.compress_labels())
}

/// Random directed temporal graph with `arcs` distinct arcs and labels in `1..=t`.
///
/// Labels are drawn per unordered pair, so antiparallel arcs agree.
pub fn gen_random_directed(n: usize, arcs: usize, t: Label, seed: u64) -> Result<DirectedTemporalGraph> {
    let max = n * n.saturating_sub(1);
    if arcs > max || t < 1 {
        return Err(Error::InvalidParameter(format!(
            "need arcs <= {max} and t >= 1, got arcs={arcs}, t={t}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = vec![0; n * n];
    for u in 0..n {
        for v in u + 1..n {
            let l = rng.random_range(1..=t);
            labels[u * n + v] = l;
            labels[v * n + u] = l;
        }
    }
    let mut all: Vec<(Node, Node)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    all.shuffle(&mut rng);
    all.truncate(arcs);
    DirectedTemporalGraph::new(n, all.into_iter().map(|(u, v)| (u, v, labels[u * n + v])))
}

/// Every node pair of `n` nodes, for exhaustive labelings (pair order of
/// [`TemporalGraph::complete`]).
pub fn node_pairs(n: usize) -> Vec<(Node, Node)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Complete host on `n` nodes whose `i`-th pair gets label `1 + bit i of mask`.
pub fn two_label_host(n: usize, mask: u64) -> TemporalGraph {
    let pairs = node_pairs(n);
    assert!(pairs.len() <= 64);
    let edges: Vec<_> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| (u, v, 1 + (mask >> i & 1) as Label))
        .collect();
    TemporalGraph::new(n, edges).expect("valid labels")
}

/// Distinct endpoints of a strategy, as owned names.
pub fn strategy_names(inst: &Instance, s: &BTreeSet<Node>) -> Vec<String> {
    s.iter().map(|&v| inst.names[v].clone()).collect()
}

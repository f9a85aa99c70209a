//! Social optimum: minimal and minimum temporal spanners, and PoA ratios.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::game::{social_cost, StrategyProfile};
use crate::graph::{singleton, sweep, Edge, TemporalGraph};
use crate::union_find::UnionFind;
use crate::{Error, Ratio, Result, DEFAULT_BUDGET_CAP};

/// `edges` must be sorted by label.
fn connected(n: usize, edges: &[Edge]) -> bool {
    if n > 64 {
        return (0..n).all(|u| sweep(n, edges, &singleton(n, u), 1).count_ones(..) == n);
    }
    // reached[v] holds the sources that reach v, as a bitmask.
    let mut reached: Vec<u64> = (0..n).map(|v| 1 << v).collect();
    let mut merged = vec![0u64; n];
    let mut uf = UnionFind::new(n);
    let mut touched: Vec<usize> = Vec::new();
    for class in edges.chunk_by(|a, b| a.label == b.label) {
        for e in class {
            uf.union(e.u, e.v);
            touched.push(e.u);
            touched.push(e.v);
        }
        for &x in &touched {
            let r = uf.find(x);
            merged[r] |= reached[x];
        }
        for &x in &touched {
            let r = uf.find(x);
            reached[x] = merged[r];
        }
        for &x in &touched {
            merged[x] = 0;
        }
        uf.reset(&touched);
        touched.clear();
    }
    let full = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    reached.iter().all(|&r| r == full)
}

fn require_connected(host: &TemporalGraph) -> Result<()> {
    if connected(host.n(), host.edges()) {
        Ok(())
    } else {
        Err(Error::NotTemporallyConnected)
    }
}

/// Greedy edge removal, by descending label and then lexicographically.
pub fn minimal_spanner(host: &TemporalGraph) -> Result<TemporalGraph> {
    require_connected(host)?;
    let n = host.n();
    let mut order: Vec<Edge> = host.edges().to_vec();
    order.sort_by(|a, b| b.label.cmp(&a.label).then((a.u, a.v).cmp(&(b.u, b.v))));
    let mut kept: Vec<Edge> = host.edges().to_vec();
    for e in order {
        let rest: Vec<Edge> = kept.iter().copied().filter(|&f| f != e).collect();
        if connected(n, &rest) {
            kept = rest;
        }
    }
    Ok(host.filter_edges(|e| kept.contains(e)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpannerMethod {
    /// A single label class spans the host; its spanning tree is optimal.
    LabelClassTree,
    /// No spanner smaller than the greedy minimal one exists.
    MinimalIsMinimum,
    BranchAndBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpannerSolution {
    pub graph: TemporalGraph,
    pub size: usize,
    pub method: SpannerMethod,
    /// Search steps: hitting-set nodes plus spanner checks.
    pub nodes: u64,
}

/// Spanning tree of the smallest label class that is connected on its own.
fn label_class_tree(host: &TemporalGraph) -> Option<TemporalGraph> {
    let n = host.n();
    for label in host.label_set() {
        let mut class: Vec<Edge> = host.edges().iter().copied().filter(|e| e.label == label).collect();
        class.sort_by_key(|e| (e.u, e.v));
        let mut uf = UnionFind::new(n);
        let tree: Vec<Edge> = class.into_iter().filter(|e| uf.union(e.u, e.v)).collect();
        if tree.len() + 1 == n {
            return Some(host.filter_edges(|e| tree.contains(e)));
        }
    }
    None
}

const CUTS_PER_ROUND: usize = 16;

/// Implicit hitting-set search. Every spanner meets every cut, a set of edges
/// whose removal leaves the host without a spanner. A minimum hitting set of
/// the known cuts that is itself a spanner is a minimum spanner; otherwise it
/// grows into a maximal non-spanner whose complement is a new cut.
struct Search<'a> {
    n: usize,
    /// Host edges sorted by label, so any bit subset iterates in label order.
    edges: &'a [Edge],
    cuts: Vec<FixedBitSet>,
    cap: u64,
    nodes: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SearchSpaceExceeded { cap: self.cap });
        }
        Ok(())
    }

    fn spans(&mut self, set: &FixedBitSet) -> Result<bool> {
        self.tick()?;
        let edges: Vec<Edge> = set.ones().map(|i| self.edges[i]).collect();
        Ok(connected(self.n, &edges))
    }

    /// Adds edges to `set` while it stays a non-spanner, in order starting at `from`.
    fn grow(&mut self, set: &mut FixedBitSet, from: usize) -> Result<()> {
        let m = self.edges.len();
        for j in (0..m).map(|j| (j + from) % m) {
            if set.contains(j) {
                continue;
            }
            set.insert(j);
            if self.spans(set)? {
                set.set(j, false);
            }
        }
        Ok(())
    }

    /// Turns a non-spanner into a minimal spanner.
    fn repair(&mut self, set: &FixedBitSet) -> Result<FixedBitSet> {
        let mut s = set.clone();
        for j in 0..self.edges.len() {
            if !s.contains(j) {
                s.insert(j);
                if self.spans(&s)? {
                    break;
                }
            }
        }
        for j in (0..self.edges.len()).rev() {
            if s.contains(j) {
                s.set(j, false);
                if !self.spans(&s)? {
                    s.insert(j);
                }
            }
        }
        Ok(s)
    }

    /// Hitting set built by repeatedly taking the edge in the most unhit cuts.
    fn greedy_hitting_set(&self) -> FixedBitSet {
        let m = self.edges.len();
        let mut chosen = FixedBitSet::with_capacity(m);
        let mut open: Vec<&FixedBitSet> = self.cuts.iter().collect();
        while !open.is_empty() {
            let mut hits = vec![0usize; m];
            for cut in &open {
                for j in cut.ones() {
                    hits[j] += 1;
                }
            }
            let best = (0..m).max_by_key(|&j| (hits[j], std::cmp::Reverse(j))).unwrap_or(0);
            chosen.insert(best);
            open.retain(|cut| !cut.contains(best));
        }
        chosen
    }

    /// Smallest hitting set of the cuts with fewer than `upper` edges; stops
    /// early at `lower`, a known lower bound.
    fn hitting_set(&mut self, upper: usize, lower: usize) -> Result<Option<FixedBitSet>> {
        let m = self.edges.len();
        let mut chosen = FixedBitSet::with_capacity(m);
        let mut excluded = FixedBitSet::with_capacity(m);
        let mut best = None;
        let mut upper = upper;
        self.branch(&mut chosen, 0, &mut excluded, &mut best, &mut upper, lower)?;
        Ok(best)
    }

    fn branch(
        &mut self,
        chosen: &mut FixedBitSet,
        size: usize,
        excluded: &mut FixedBitSet,
        best: &mut Option<FixedBitSet>,
        upper: &mut usize,
        lower: usize,
    ) -> Result<bool> {
        self.tick()?;
        // Unhit cuts as (edges still allowed, index).
        let mut open: Vec<(usize, usize)> = Vec::new();
        for (c, cut) in self.cuts.iter().enumerate() {
            if cut.is_disjoint(chosen) {
                let avail = cut.difference_count(excluded);
                if avail == 0 {
                    return Ok(false);
                }
                open.push((avail, c));
            }
        }
        if open.is_empty() {
            *best = Some(chosen.clone());
            *upper = size;
            return Ok(size <= lower);
        }
        open.sort_unstable();
        let mut used = FixedBitSet::with_capacity(self.edges.len());
        let mut packed = 0;
        for &(_, c) in &open {
            let cut = &self.cuts[c];
            if cut.is_disjoint(&used) {
                packed += 1;
                used.union_with(cut);
                used.difference_with(excluded);
                if size + packed >= *upper {
                    return Ok(false);
                }
            }
        }
        let pick: Vec<usize> = self.cuts[open[0].1].ones().filter(|&j| !excluded.contains(j)).collect();
        let mut stop = false;
        let mut barred = Vec::new();
        for j in pick {
            chosen.insert(j);
            stop = self.branch(chosen, size + 1, excluded, best, upper, lower)?;
            chosen.set(j, false);
            if stop {
                break;
            }
            excluded.insert(j);
            barred.push(j);
        }
        for j in barred {
            excluded.set(j, false);
        }
        Ok(stop)
    }
}

/// Spanner with the fewest edges.
///
/// `budget_cap` bounds the number of search steps (default
/// [`DEFAULT_BUDGET_CAP`]).
pub fn minimum_spanner(host: &TemporalGraph, budget_cap: Option<u64>) -> Result<SpannerSolution> {
    require_connected(host)?;
    let n = host.n();
    if let Some(tree) = label_class_tree(host) {
        return Ok(SpannerSolution {
            size: tree.edge_count(),
            graph: tree,
            method: SpannerMethod::LabelClassTree,
            nodes: 0,
        });
    }
    let minimal = minimal_spanner(host)?;
    let mut edges: Vec<Edge> = host.edges().to_vec();
    edges.sort_by_key(|e| (e.label, e.u, e.v));
    let m = edges.len();
    let to_bits = |g: &TemporalGraph| -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(m);
        for (i, e) in edges.iter().enumerate() {
            if g.edges().contains(e) {
                b.insert(i);
            }
        }
        b
    };
    let cuts = (0..n)
        .map(|v| {
            let mut star = FixedBitSet::with_capacity(m);
            star.extend(edges.iter().enumerate().filter(|(_, e)| e.u == v || e.v == v).map(|(i, _)| i));
            star
        })
        .collect();
    let mut search = Search {
        n,
        edges: &edges,
        cuts,
        cap: budget_cap.unwrap_or(DEFAULT_BUDGET_CAP),
        nodes: 0,
    };
    let mut incumbent = to_bits(&minimal);
    let mut improved = false;
    // Every spanning tree that spans temporally is single-label.
    let mut lower = n;
    let mut round = 0;
    while incumbent.count_ones(..) > lower {
        let greedy = search.greedy_hitting_set();
        let h = if search.spans(&greedy)? {
            let Some(h) = search.hitting_set(incumbent.count_ones(..), lower)? else {
                break;
            };
            lower = lower.max(h.count_ones(..));
            if search.spans(&h)? {
                incumbent = h;
                improved = true;
                break;
            }
            h
        } else {
            greedy
        };
        for k in 0..CUTS_PER_ROUND {
            let mut grown = h.clone();
            search.grow(&mut grown, (round * 7 + k * m / CUTS_PER_ROUND) % m)?;
            let mut cut = FixedBitSet::with_capacity(m);
            cut.insert_range(..);
            cut.difference_with(&grown);
            if !search.cuts.contains(&cut) {
                search.cuts.push(cut);
            }
        }
        let repaired = search.repair(&h)?;
        if repaired.count_ones(..) < incumbent.count_ones(..) {
            incumbent = repaired;
            improved = true;
        }
        round += 1;
    }
    let kept: Vec<Edge> = incumbent.ones().map(|i| edges[i]).collect();
    Ok(SpannerSolution {
        size: kept.len(),
        graph: host.filter_edges(|e| kept.contains(e)),
        method: if improved {
            SpannerMethod::BranchAndBound
        } else {
            SpannerMethod::MinimalIsMinimum
        },
        nodes: search.nodes,
    })
}

/// Social cost of `profile` over the minimum spanner size, as an exact ratio.
///
/// The profile is expected to be a verified equilibrium; this only checks that
/// it connects every agent.
pub fn poa_ratio(host: &TemporalGraph, profile: &StrategyProfile, budget_cap: Option<u64>) -> Result<Ratio> {
    let cost = social_cost(host, profile)?;
    if cost.unreached > 0 {
        return Err(Error::ProfileNotSpanner {
            unreached: cost.unreached,
        });
    }
    let opt = minimum_spanner(host, budget_cap)?;
    if opt.size == 0 {
        return Ok(Ratio::from_integer(1));
    }
    Ok(Ratio::new(cost.edges as u64, opt.size as u64))
}

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::*;
use tncg_core::dynamics::{run_dynamics, DynamicsConfig, Outcome, Rule, Schedule};
use tncg_core::equilibrium::{check_ge, check_ne, find_forbidden_structure, necessary_set};
use tncg_core::format::*;
use tncg_core::game::{agent_cost, agent_costs, social_cost};
use tncg_core::graph::{is_minimal_spanner, is_temporally_connected, reach};
use tncg_core::optimum::{minimal_spanner, minimum_spanner, poa_ratio};
use tncg_core::response::{exact_best_response, greedy_best_response};
use tncg_core::{Label, Node, Ratio, SetCoverInstance, StrategyProfile, TemporalGraph};

/// Sparse graph: each pair present or not, with a label in `1..=t`.
fn graph(max_n: usize, max_t: Label) -> impl Strategy<Value = TemporalGraph> {
    (1..=max_n, 1..=max_t).prop_flat_map(|(n, t)| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(proptest::option::weighted(0.6, 1..=t), pairs).prop_map(move |labels| {
            let edges = tncg_core::constructions::node_pairs(n)
                .into_iter()
                .zip(labels)
                .filter_map(|((u, v), l)| l.map(|l| (u, v, l)));
            TemporalGraph::new(n, edges).unwrap()
        })
    })
}

/// Complete host with consecutive labels.
fn host(min_n: usize, max_n: usize, max_t: Label) -> impl Strategy<Value = TemporalGraph> {
    (min_n..=max_n, 1..=max_t).prop_flat_map(|(n, t)| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(1..=t, pairs)
            .prop_map(move |labels| TemporalGraph::complete_from(n, labels).compress_labels())
    })
}

trait CompleteFrom {
    fn complete_from(n: usize, labels: Vec<Label>) -> TemporalGraph;
}

impl CompleteFrom for TemporalGraph {
    fn complete_from(n: usize, labels: Vec<Label>) -> TemporalGraph {
        let mut it = labels.into_iter();
        TemporalGraph::complete(n, |_, _| it.next().unwrap()).unwrap()
    }
}

fn host_and_profile(min_n: usize, max_n: usize, max_t: Label) -> impl Strategy<Value = (TemporalGraph, StrategyProfile)> {
    host(min_n, max_n, max_t).prop_flat_map(|h| {
        let n = h.n();
        proptest::collection::vec(proptest::bool::weighted(0.3), n * n).prop_map(move |bits| {
            let arcs = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v && bits[u * n + v]);
            let p = StrategyProfile::from_arcs(n, arcs).unwrap();
            (h.clone(), p)
        })
    })
}

fn reach_set(g: &TemporalGraph, u: Node) -> BTreeSet<Node> {
    reach(g, u).unwrap().ones().collect()
}

/// Static connected component of `u`, ignoring labels.
fn component(g: &TemporalGraph, u: Node) -> BTreeSet<Node> {
    let mut seen = BTreeSet::from([u]);
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        for (y, _) in g.neighbors(x) {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reach_matches_path_enumeration(g in graph(7, 5)) {
        let labels = Labels::of(&g);
        for u in 0..g.n() {
            let r = reach_set(&g, u);
            prop_assert!(r.contains(&u));
            prop_assert_eq!(r, reach_by_paths(&labels, u));
        }
    }

    #[test]
    fn reach_grows_with_edges(g in graph(7, 4), pick in any::<usize>(), l in 1u32..5) {
        let missing: Vec<_> = tncg_core::constructions::node_pairs(g.n())
            .into_iter()
            .filter(|&(a, b)| !g.has_edge(a, b))
            .collect();
        if missing.is_empty() {
            return Ok(());
        }
        let (a, b) = missing[pick % missing.len()];
        let mut edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
        edges.push((a, b, l));
        let bigger = TemporalGraph::new(g.n(), edges).unwrap();
        for u in 0..g.n() {
            prop_assert!(reach_set(&g, u).is_subset(&reach_set(&bigger, u)));
        }
    }

    #[test]
    fn single_label_reach_is_static_component(g in graph(7, 1)) {
        for u in 0..g.n() {
            prop_assert_eq!(reach_set(&g, u), component(&g, u));
        }
    }

    #[test]
    fn spanner_sizes_are_ordered(h in host(2, 6, 8)) {
        let minimal = minimal_spanner(&h).unwrap();
        prop_assert!(is_minimal_spanner(&h, &minimal).unwrap());
        let minimum = minimum_spanner(&h, None).unwrap();
        prop_assert!(is_temporally_connected(&minimum.graph));
        minimum.graph.check_subgraph_of(&h).unwrap();
        prop_assert_eq!(minimum.size, minimum.graph.edge_count());
        prop_assert!(h.n() - 1 <= minimum.size);
        prop_assert!(minimum.size <= minimal.edge_count());
        prop_assert!(minimal.edge_count() <= h.edge_count());
        prop_assert_eq!(Some(minimum.size), minimum_spanner_by_enumeration(&h));
    }

    #[test]
    fn costs_match_path_enumeration((h, p) in host_and_profile(2, 7, 4)) {
        let costs = agent_costs(&h, &p).unwrap();
        for v in 0..h.n() {
            prop_assert_eq!(costs[v], cost_by_paths(&h, &p, v));
        }
        let sc = social_cost(&h, &p).unwrap();
        prop_assert_eq!(sc.edges, p.arc_count());
    }

    #[test]
    fn costs_are_permutation_invariant((h, p) in host_and_profile(2, 7, 4), seed in any::<u64>()) {
        let n = h.n();
        let mut perm: Vec<Node> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut inv = vec![0; n];
        for (v, &pv) in perm.iter().enumerate() {
            inv[pv] = v;
        }
        let ph = TemporalGraph::complete(n, |a, b| h.label(inv[a], inv[b]).unwrap()).unwrap();
        let pp = p.permuted(&perm);
        for v in 0..n {
            prop_assert_eq!(agent_cost(&h, &p, v).unwrap(), agent_cost(&ph, &pp, perm[v]).unwrap());
        }
    }

    #[test]
    fn responses_match_enumeration((h, p) in host_and_profile(2, 6, 4)) {
        for v in 0..h.n() {
            let current = cost_by_paths(&h, &p, v);
            let exact = exact_best_response(&h, &p, v, None).unwrap();
            let greedy = greedy_best_response(&h, &p, v).unwrap();
            prop_assert_eq!(exact.current_cost, current);
            prop_assert_eq!(exact.cost, best_cost_by_enumeration(&h, &p, v));
            prop_assert_eq!(greedy.cost, best_greedy_cost_by_enumeration(&h, &p, v));
            prop_assert!(exact.cost <= greedy.cost && greedy.cost <= current);
            prop_assert_eq!(exact.improved, exact.cost < current);
            prop_assert_eq!(greedy.improved, greedy.cost < current);
            let applied = p.with_strategy(v, exact.strategy.clone()).unwrap();
            prop_assert_eq!(cost_by_paths(&h, &applied, v), exact.cost);
            let applied = p.with_strategy(v, greedy.strategy.clone()).unwrap();
            prop_assert_eq!(cost_by_paths(&h, &applied, v), greedy.cost);
            prop_assert!(greedy.evaluations <= h.n() as u64);
        }
    }

    #[test]
    fn ne_implies_ge((h, p) in host_and_profile(2, 6, 3)) {
        let ne = check_ne(&h, &p, None).unwrap();
        let ge = check_ge(&h, &p).unwrap();
        prop_assert_eq!(ne.stable, is_ne_by_enumeration(&h, &p));
        if ne.stable {
            prop_assert!(ge.stable);
        }
        if let Some(w) = ne.witness {
            prop_assert!(w.cost < w.current_cost);
        }
    }

    #[test]
    fn no_forbidden_structure_in_any_profile((h, p) in host_and_profile(5, 8, 4)) {
        prop_assert_eq!(find_forbidden_structure(&h, &p).unwrap(), None);
    }

    #[test]
    fn necessary_sets_are_lost_without_the_arc((h, p) in host_and_profile(2, 7, 4)) {
        for (u, w) in p.arcs() {
            let set: BTreeSet<Node> = necessary_set(&h, &p, u, w).unwrap().ones().collect();
            let mut s = p.strategy(u).clone();
            s.remove(&w);
            let with = reach_by_paths(&created(&h, &p), u);
            let without = reach_by_paths(&created(&h, &p.with_strategy(u, s).unwrap()), u);
            let lost: BTreeSet<Node> = with.difference(&without).copied().collect();
            if p.strategy(w).contains(&u) {
                prop_assert!(set.is_empty());
            } else {
                prop_assert_eq!(set, lost);
            }
        }
    }

    #[test]
    fn greedy_dynamics_traces_are_consistent(h in host(2, 7, 4), seed in any::<u64>()) {
        let n = h.n();
        let mut cfg = DynamicsConfig::new(Schedule::UniformRandom, Rule::GreedyBr);
        cfg.seed = seed;
        let trace = run_dynamics(&h, &StrategyProfile::empty(n), &cfg).unwrap();
        prop_assert_eq!(trace.replay().unwrap(), trace.final_profile.clone());
        let mut p = trace.initial.clone();
        for m in &trace.moves {
            let before = cost_by_paths(&h, &p, m.agent);
            p = p.with_strategy(m.agent, m.new_strategy.clone()).unwrap();
            prop_assert!(cost_by_paths(&h, &p, m.agent) < before);
        }
        if trace.outcome == Outcome::ConvergedGe {
            let f = &trace.final_profile;
            prop_assert!(check_ge(&h, f).unwrap().stable);
            let t = h.lifetime() as u64;
            if n > 2 {
                let ratio = poa_ratio(&h, f, None).unwrap();
                prop_assert!(ratio >= Ratio::from_integer(1));
                prop_assert!(ratio <= Ratio::from_integer(t) - Ratio::new(t, n as u64 - 1) || t == 1);
            }
        }
    }

    #[test]
    fn graph_files_round_trip(g in graph(7, 6)) {
        let text = write_temporal_graph(&g);
        prop_assert_eq!(parse_temporal_graph(&text).unwrap(), g.clone());
        prop_assert_eq!(write_temporal_graph(&parse_temporal_graph(&text).unwrap()), text);
    }

    #[test]
    fn host_and_profile_files_round_trip((h, p) in host_and_profile(2, 7, 4)) {
        prop_assert_eq!(parse_host(&write_temporal_graph(&h)).unwrap(), h.clone());
        prop_assert_eq!(parse_profile(&write_profile(&p), h.n()).unwrap(), p);
    }

    #[test]
    fn setcover_files_round_trip(k in 1usize..9, m in 1usize..7, seed in any::<u64>(), with_cover in any::<bool>()) {
        let mut sc = SetCoverInstance::random(k, m, seed).unwrap();
        if with_cover {
            sc = sc.with_cover((0..m).collect()).unwrap();
        }
        let text = write_setcover(&sc);
        prop_assert_eq!(parse_setcover(&text).unwrap(), sc.clone());
        prop_assert_eq!(sc.minimum_cover_size(), minimum_cover_by_enumeration(k, sc.sets()));
    }
}

//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use tncg_core::constructions::*;
use tncg_core::dynamics::{run_dynamics, DynamicsConfig, Outcome, Rule, Schedule};
use tncg_core::equilibrium::*;
use tncg_core::game::social_cost;
use tncg_core::optimum::{minimum_spanner, poa_ratio, SpannerMethod};
use tncg_core::response::exact_best_response;
use tncg_core::{Error, Ratio, SetCoverInstance, StrategyProfile};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn hypercube_poa() -> Check {
    let inst = ok(gen_hypercube(3))?;
    ensure!(ok(check_ne(&inst.host, &inst.profile, None))?.stable, "d=3 profile is not an NE");
    ensure!(is_ne_by_enumeration(&inst.host, &inst.profile), "d=3 brute-force NE oracle disagrees");
    let edges = ok(social_cost(&inst.host, &inst.profile))?.edges;
    ensure!(edges == 12, "d=3 has {edges} edges");
    let opt = ok(minimum_spanner(&inst.host, None))?.size;
    ensure!(opt == 7, "d=3 optimum is {opt}");
    let r3 = ok(poa_ratio(&inst.host, &inst.profile, None))?;
    ensure!(r3 == Ratio::new(12, 7), "d=3 ratio {r3}");

    let inst = ok(gen_hypercube(4))?;
    ensure!(ok(check_ge(&inst.host, &inst.profile))?.stable, "d=4 profile is not a GE");
    ensure!(ok(check_ne(&inst.host, &inst.profile, None))?.stable, "d=4 profile is not an NE");
    let r4 = ok(poa_ratio(&inst.host, &inst.profile, None))?;
    ensure!(r4 == Ratio::new(32, 15), "d=4 ratio {r4}");
    Ok(format!("d=3 ratio {r3}, d=4 ratio {r4}"))
}

fn t2_tightness() -> Check {
    for n in 5..=12 {
        let inst = ok(gen_t2_family(n))?;
        ensure!(ok(check_ne(&inst.host, &inst.profile, None))?.stable, "n={n} is not an NE");
        if n <= 8 {
            ensure!(is_ne_by_enumeration(&inst.host, &inst.profile), "n={n} brute-force NE oracle disagrees");
        }
        let edges = ok(social_cost(&inst.host, &inst.profile))?.edges;
        ensure!(edges == 2 * (n - 2), "n={n} has {edges} edges");
        let r = ok(poa_ratio(&inst.host, &inst.profile, None))?;
        let want = Ratio::from_integer(2) - Ratio::new(2, n as u64 - 1);
        ensure!(r == want, "n={n} ratio {r}, expected {want}");
    }
    Ok("n = 5..12 tight at 2(n-2) edges, ratio 2 - 2/(n-1)".into())
}

fn br_cycle() -> Check {
    let c = gen_br_cycle();
    let mut cfg = DynamicsConfig::new(Schedule::Explicit(c.schedule.clone()), Rule::GreedyBr);
    cfg.max_steps = Some(6);
    let trace = ok(run_dynamics(&c.instance.host, &c.instance.profile, &cfg))?;
    ensure!(
        trace.outcome == Outcome::CycleDetected { period: 6, entry_move: 0 },
        "outcome {:?}",
        trace.outcome
    );
    ensure!(trace.moves.len() == 6, "{} moves", trace.moves.len());
    ensure!(trace.final_profile == c.instance.profile, "final profile differs from the initial one");
    let mut p = c.instance.profile.clone();
    for (m, &agent) in trace.moves.iter().zip(&c.schedule) {
        ensure!(m.agent == agent, "move by {} out of schedule", m.agent);
        let before = cost_by_paths(&c.instance.host, &p, m.agent);
        p = ok(p.with_strategy(m.agent, m.new_strategy.clone()))?;
        let after = cost_by_paths(&c.instance.host, &p, m.agent);
        ensure!(after < before, "move at step {} is not improving", m.step);
    }
    Ok("period 6, six strictly improving moves".into())
}

fn random_setcover(rng: &mut ChaCha8Rng) -> SetCoverInstance {
    let k = rng.random_range(2..=8);
    let m = rng.random_range(2..=6);
    SetCoverInstance::random(k, m, rng.random()).unwrap()
}

fn reductions() -> Check {
    let small = SetCoverInstance::new(5, vec![[0, 1].into(), [0, 1, 3].into(), [2, 4].into()]).unwrap();
    let r = ok(gen_reduction_br(&small))?;
    let br = ok(exact_best_response(&r.instance.host, &r.instance.profile, r.x, None))?;
    ensure!(br.strategy.len() == 2, "small instance response has {} edges", br.strategy.len());

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ne_yes, mut ne_no) = (0, 0);
    for i in 0..24 {
        let sc = random_setcover(&mut rng);
        let min = minimum_cover_by_enumeration(sc.k(), sc.sets()).unwrap();
        let r = ok(gen_reduction_br(&sc))?;
        let br = ok(exact_best_response(&r.instance.host, &r.instance.profile, r.x, None))?;
        ensure!(br.cost.unreached == 0, "instance {i}: x left nodes unreached");
        ensure!(br.strategy.len() == min, "instance {i}: response {} vs cover {min}", br.strategy.len());

        let mut covers: Vec<BTreeSet<usize>> = Vec::new();
        let mut sizes: Vec<BTreeSet<usize>> = (0u32..1 << sc.m())
            .map(|mask| (0..sc.m()).filter(|b| mask >> b & 1 == 1).collect())
            .filter(|c| sc.is_cover(c))
            .collect();
        sizes.sort_by_key(|c| c.len());
        covers.push(sizes[0].clone());
        if let Some(bigger) = sizes.iter().find(|c| c.len() > min) {
            covers.push(bigger.clone());
        }
        for cover in covers {
            let minimum = cover.len() == min;
            let r = ok(gen_reduction_ne(&ok(sc.clone().with_cover(cover.clone()))?))?;
            let stable = ok(check_ne(&r.instance.host, &r.instance.profile, None))?.stable;
            ensure!(
                stable == minimum,
                "instance {i}: cover {cover:?} (minimum {min}) gives stable = {stable}"
            );
            if minimum {
                ne_yes += 1;
            } else {
                ne_no += 1;
            }
        }
    }
    Ok(format!("24 response instances; NE iff minimum on {ne_yes} minimum and {ne_no} larger covers"))
}

fn t2_existence() -> Check {
    for mask in 0u64..1 << 10 {
        let host = two_label_host(5, mask);
        let p = ok(gen_t2_equilibrium(&host))?;
        ensure!(ok(check_ne(&host, &p, None))?.stable, "labeling {mask:#b} is not an NE");
        ensure!(is_ne_by_enumeration(&host, &p), "labeling {mask:#b}: brute-force NE oracle disagrees");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let n = rng.random_range(2..=10);
        let t = if n == 2 { 1 } else { 2 };
        let host = ok(gen_random_host(n, t, rng.random()))?;
        let p = ok(gen_t2_equilibrium(&host))?;
        ensure!(ok(check_ne(&host, &p, None))?.stable, "random host {i} (n={n}) is not an NE");
    }
    Ok("1024 labelings at n=5 and 500 random hosts".into())
}

/// Greedy dynamics from the empty profile on random hosts; yields converged GEs.
fn random_ges(count: usize, max_n: usize, max_t: u32, seed: u64) -> Result<(Vec<(tncg_core::TemporalGraph, StrategyProfile)>, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut runs = 0;
    while out.len() < count {
        runs += 1;
        let n = rng.random_range(4..=max_n);
        let t = rng.random_range(1..=max_t);
        let host = ok(gen_random_host(n, t, rng.random()))?;
        let mut cfg = DynamicsConfig::new(Schedule::UniformRandom, Rule::GreedyBr);
        cfg.seed = rng.random();
        let trace = ok(run_dynamics(&host, &StrategyProfile::empty(n), &cfg))?;
        if trace.outcome == Outcome::ConvergedGe {
            out.push((host, trace.final_profile));
        }
    }
    Ok((out, runs))
}

fn structural_audits() -> Check {
    let (ges, runs) = random_ges(200, 12, 4, 6)?;
    for (i, (host, p)) in ges.iter().enumerate() {
        let n = host.n();
        ensure!(ok(check_ge(host, p))?.stable, "run {i}: not a GE");
        for v in 0..n {
            ensure!(
                best_greedy_cost_by_enumeration(host, p, v) == cost_by_paths(host, p, v),
                "run {i}: brute-force GE oracle disagrees at {v}"
            );
        }
        let audit = ok(structural_audit(host, p))?;
        ensure!(audit.antiparallel_free, "run {i}: antiparallel arcs");
        ensure!(audit.unnecessary_arcs.is_empty(), "run {i}: unnecessary arcs {:?}", audit.unnecessary_arcs);
        ensure!(audit.forbidden_structure.is_none(), "run {i}: forbidden structure");
        // Independent necessity check: dropping any arc must cost its owner a node.
        for (u, w) in p.arcs() {
            let mut s = p.strategy(u).clone();
            s.remove(&w);
            let without = ok(p.with_strategy(u, s))?;
            ensure!(
                reach_by_paths(&created(host, &without), u).len() < reach_by_paths(&created(host, p), u).len(),
                "run {i}: arc ({u}, {w}) is not needed"
            );
        }
        let t = host.lifetime() as usize;
        let arcs = p.arc_count();
        ensure!(t < 2 || arcs <= t * (n - 2), "run {i}: {arcs} arcs above t(n-2)");
        ensure!(((arcs as f64) < 6f64.sqrt() * (n as f64).powf(1.5) + n as f64), "run {i}: density bound");
        ensure!(!audit.bounds.falsification, "run {i}: falsification flagged");
    }
    Ok(format!("{} converged GEs out of {runs} runs, zero falsifications", ges.len()))
}

fn freeze_relabel_audit() -> Check {
    let (ges, _) = random_ges(30, 10, 4, 7)?;
    for (i, (host, p)) in ges.iter().enumerate() {
        ensure!(ok(check_ge(host, p))?.stable, "run {i}: not a GE");
        let frozen = ok(freeze_relabel(host, p))?;
        let g = created(host, p);
        ensure!(
            host.edges().iter().all(|e| g.get(e.u, e.v) == 0 || frozen.label(e.u, e.v) == Some(e.label)),
            "run {i}: a created edge changed its label"
        );
        let compressed = frozen.compress_labels();
        ok(compressed.validate_host())?;
        ensure!(ok(check_ne(&frozen, p, None))?.stable, "run {i}: not an NE after relabeling");
        ensure!(ok(check_ne(&compressed, p, None))?.stable, "run {i}: not an NE after compression");
        if host.n() <= 7 {
            ensure!(is_ne_by_enumeration(&frozen, p), "run {i}: brute-force NE oracle disagrees");
        }
        ensure!(
            ok(social_cost(&frozen, p))? == ok(social_cost(host, p))?,
            "run {i}: social cost changed"
        );
    }
    Ok(format!("{} GEs become NEs with unchanged social cost", ges.len()))
}

fn large_node() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..24 {
        let arcs = rng.random_range(600..=1260);
        let t = rng.random_range(1..=40);
        let g = ok(gen_random_directed(36, arcs, t, rng.random()))?;
        let w = ok(find_large_node(&g))?;
        // Re-check the three conditions from the raw arcs.
        ensure!(w.members.len() == 5, "graph {i}: {} members", w.members.len());
        let distinct: BTreeSet<_> = w.members.iter().collect();
        ensure!(distinct.len() == 5, "graph {i}: repeated members");
        for (&u, out) in w.members.iter().zip(&w.out_arcs) {
            let base = g.arcs().iter().find(|a| a.owner == u && a.endpoint == w.z).map(|a| a.label);
            let Some(base) = base else {
                return Err(format!("graph {i}: member {u} has no arc to {}", w.z));
            };
            let ends: BTreeSet<_> = out.iter().map(|a| a.0).collect();
            ensure!(ends.len() == out.len() && out.len() >= 10, "graph {i}: member {u} has {} out-arcs", out.len());
            for &(v, l) in out {
                ensure!(v != w.z, "graph {i}: out-arc points at z");
                ensure!(
                    g.arcs().iter().any(|a| a.owner == u && a.endpoint == v && a.label == l) && l >= base,
                    "graph {i}: bad out-arc ({u}, {v})"
                );
            }
        }
        ensure!(verify_large_node(&g, &w), "graph {i}: verifier rejects");
    }
    let sparse = ok(gen_random_directed(36, 565, 10, 1))?;
    ensure!(
        matches!(find_large_node(&sparse), Err(Error::PreconditionViolated(_))),
        "565 arcs did not raise precondition-violated"
    );
    Ok("24 graphs at n=36 verified; 565 arcs rejected".into())
}

fn core_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1200 {
        let n = rng.random_range(1..=7);
        let pairs = node_pairs(n);
        let t = rng.random_range(1..=5);
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if rng.random_bool(0.6) {
                edges.push((u, v, rng.random_range(1..=t)));
            }
        }
        let g = ok(tncg_core::TemporalGraph::new(n, edges.clone()))?;
        let labels = Labels::from_edges(n, &edges);
        for u in 0..n {
            let fast: BTreeSet<_> = ok(tncg_core::graph::reach(&g, u))?.ones().collect();
            ensure!(fast == reach_by_paths(&labels, u), "instance {i}: reach({u}) differs");
        }
    }
    let (mut spanners, mut searched) = (0, 0);
    for i in 0..150 {
        let n = rng.random_range(2..=7);
        let pairs = (n * (n - 1) / 2) as u32;
        let t = rng.random_range(1..=pairs.min(10));
        let host = ok(gen_random_host(n, t, rng.random()))?;
        let fast = ok(minimum_spanner(&host, None))?;
        let slow = minimum_spanner_by_enumeration(&host).unwrap();
        ensure!(fast.size == slow, "host {i}: minimum {} vs exhaustive {slow}", fast.size);
        ensure!(connected_by_paths(&Labels::of(&fast.graph)), "host {i}: returned graph not connected");
        spanners += 1;
        if fast.method == SpannerMethod::BranchAndBound {
            searched += 1;
        }
    }
    Ok(format!("1200 reach instances, {spanners} minimum spanners ({searched} by branch and bound)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("hypercube price of anarchy", hypercube_poa),
        ("lifetime-2 tightness", t2_tightness),
        ("best-response cycle", br_cycle),
        ("set-cover reductions", reductions),
        ("lifetime-2 equilibrium existence", t2_existence),
        ("structural audits of greedy equilibria", structural_audits),
        ("freeze-relabel", freeze_relabel_audit),
        ("large-node audit", large_node),
        ("core oracle equivalence", core_oracles),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why}; {secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Named experiment scenarios.
//!
//! Instance `i` of a scenario draws its randomness from ChaCha stream `i` of
//! the configured seed, so results do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tncg_core::constructions::{
    gen_br_cycle, gen_hypercube, gen_random_directed, gen_random_host, gen_reduction_br, gen_reduction_ne,
    gen_t2_equilibrium, gen_t2_family, two_label_host,
};
use tncg_core::dynamics::{run_dynamics, DynamicsConfig, Outcome, Rule, Schedule};
use tncg_core::equilibrium::{
    check_ge, check_ne, find_large_node, freeze_relabel, reaches_density_threshold, structural_audit,
    verify_large_node,
};
use tncg_core::game::social_cost;
use tncg_core::optimum::poa_ratio;
use tncg_core::response::exact_best_response;
use tncg_core::{Error, Ratio, SetCoverInstance, StrategyProfile, TemporalGraph};

use crate::report::{Provenance, Report, Row, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    HypercubePoa,
    T2Tightness,
    BrCycle,
    ReductionAudit,
    RandomGeSweep,
    FreezeRelabelAudit,
    T2ExistenceSweep,
    LargeNodeAudit,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::HypercubePoa,
        Scenario::T2Tightness,
        Scenario::BrCycle,
        Scenario::ReductionAudit,
        Scenario::RandomGeSweep,
        Scenario::FreezeRelabelAudit,
        Scenario::T2ExistenceSweep,
        Scenario::LargeNodeAudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::HypercubePoa => "hypercube-poa",
            Scenario::T2Tightness => "t2-tightness",
            Scenario::BrCycle => "br-cycle",
            Scenario::ReductionAudit => "reduction-audit",
            Scenario::RandomGeSweep => "random-ge-sweep",
            Scenario::FreezeRelabelAudit => "freeze-relabel-audit",
            Scenario::T2ExistenceSweep => "t2-existence-sweep",
            Scenario::LargeNodeAudit => "large-node-audit",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match Scenario::ALL.into_iter().find(|sc| sc.name() == s) {
            Some(sc) => Ok(sc),
            None => {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                bail!("unknown scenario {s:?}; expected one of {}", names.join(", "))
            }
        }
    }
}

/// Scenario parameters; unset fields take per-scenario defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    /// Number of random instances.
    pub count: Option<usize>,
    pub max_n: Option<usize>,
    pub max_t: Option<u32>,
    /// Hypercube dimensions.
    pub dims: Option<Vec<u32>>,
    /// Explicit node counts.
    pub sizes: Option<Vec<usize>>,
    /// Search cap for exact responses and minimum spanners.
    pub budget_cap: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        ExperimentConfig {
            scenario,
            seed,
            count: None,
            max_n: None,
            max_t: None,
            dims: None,
            sizes: None,
            budget_cap: None,
        }
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).context("parsing experiment config")
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<Report> {
    let (rows, notes) = match config.scenario {
        Scenario::HypercubePoa => hypercube_poa(config)?,
        Scenario::T2Tightness => t2_tightness(config)?,
        Scenario::BrCycle => br_cycle(config)?,
        Scenario::ReductionAudit => reduction_audit(config)?,
        Scenario::RandomGeSweep => random_ge_sweep(config)?,
        Scenario::FreezeRelabelAudit => freeze_relabel_audit(config)?,
        Scenario::T2ExistenceSweep => t2_existence_sweep(config)?,
        Scenario::LargeNodeAudit => large_node_audit(config)?,
    };
    Ok(Report {
        scenario: config.scenario.name().into(),
        provenance: Provenance::new(config.seed, config),
        config: serde_json::to_value(config)?,
        summary: Summary {
            instances: rows.len(),
            failures: rows.iter().filter(|r| !r.passed).count(),
            notes,
        },
        rows,
    })
}

type Rows = (Vec<Row>, Vec<String>);

fn par_rows<F>(count: usize, f: F) -> anyhow::Result<Vec<Row>>
where
    F: Fn(usize) -> anyhow::Result<Row> + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

fn hypercube_poa(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let dims = c.dims.clone().unwrap_or_else(|| vec![3, 4]);
    let rows = par_rows(dims.len(), |i| {
        let d = dims[i];
        let inst = gen_hypercube(d)?;
        let n = inst.host.n();
        let stable = check_ne(&inst.host, &inst.profile, c.budget_cap)?.stable;
        let ratio = poa_ratio(&inst.host, &inst.profile, c.budget_cap)?;
        let expected = Ratio::new(n as u64 / 2 * d as u64, n as u64 - 1);
        Ok(Row {
            instance: i,
            n,
            t: inst.host.lifetime(),
            edges: inst.profile.arc_count(),
            mode: "ne".into(),
            stable: Some(stable),
            poa: Some(ratio.into()),
            passed: stable && ratio == expected,
            detail: format!("d={d}, expected ratio {expected}"),
            ..Row::default()
        })
    })?;
    let notes = rows.iter().map(|r| format!("{}: ratio {}", r.detail, fmt_ratio(r))).collect();
    Ok((rows, notes))
}

fn fmt_ratio(r: &Row) -> String {
    r.poa.map_or("-".into(), |f| format!("{}/{}", f.numerator, f.denominator))
}

fn t2_tightness(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let sizes = c.sizes.clone().unwrap_or_else(|| (5..=12).collect());
    let rows = par_rows(sizes.len(), |i| {
        let n = sizes[i];
        let inst = gen_t2_family(n)?;
        let stable = check_ne(&inst.host, &inst.profile, c.budget_cap)?.stable;
        let ratio = poa_ratio(&inst.host, &inst.profile, c.budget_cap)?;
        let expected = Ratio::from_integer(2) - Ratio::new(2, n as u64 - 1);
        let edges = inst.profile.arc_count();
        Ok(Row {
            instance: i,
            n,
            t: 2,
            edges,
            mode: "ne".into(),
            stable: Some(stable),
            poa: Some(ratio.into()),
            passed: stable && edges == 2 * (n - 2) && ratio == expected,
            detail: format!("expected {} edges, ratio {expected}", 2 * (n - 2)),
            ..Row::default()
        })
    })?;
    let notes = vec![format!("{} sizes checked", rows.len())];
    Ok((rows, notes))
}

fn br_cycle(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let cyc = gen_br_cycle();
    let mut cfg = DynamicsConfig::new(Schedule::Explicit(cyc.schedule.clone()), Rule::GreedyBr);
    cfg.seed = c.seed;
    let trace = run_dynamics(&cyc.instance.host, &cyc.instance.profile, &cfg)?;
    let cycled = trace.outcome == Outcome::CycleDetected { period: 6, entry_move: 0 };
    let improving = trace.moves.iter().all(|m| m.new_cost < m.old_cost);
    let row = Row {
        instance: 0,
        n: cyc.instance.host.n(),
        t: cyc.instance.host.lifetime(),
        edges: cyc.instance.profile.arc_count(),
        passed: cycled && improving && trace.final_profile == cyc.instance.profile,
        detail: format!("outcome {}, {} moves", outcome_name(&trace.outcome), trace.moves.len()),
        ..Row::default()
    };
    let notes = vec![row.detail.clone()];
    Ok((vec![row], notes))
}

fn outcome_name(o: &Outcome) -> String {
    match o {
        Outcome::ConvergedGe => "converged-ge".into(),
        Outcome::ConvergedNe => "converged-ne".into(),
        Outcome::CycleDetected { period, entry_move } => {
            format!("cycle-detected (period {period}, entry {entry_move})")
        }
        Outcome::StepCapReached => "step-cap-reached".into(),
    }
}

fn reduction_audit(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let count = c.count.unwrap_or(20);
    let max_k = c.max_n.unwrap_or(8).max(2);
    let rows = par_rows(count, |i| {
        let mut rng = c.rng(i as u64);
        let k = rng.random_range(2..=max_k);
        let m = rng.random_range(2..=6);
        let sc = SetCoverInstance::random(k, m, rng.random())?;
        let min = sc.minimum_cover().context("random instance is coverable")?;

        let br = gen_reduction_br(&sc)?;
        let resp = exact_best_response(&br.instance.host, &br.instance.profile, br.x, c.budget_cap)?;
        let br_ok = resp.cost.unreached == 0 && resp.strategy.len() == min.len();

        let ne = gen_reduction_ne(&sc.clone().with_cover(min.clone())?)?;
        let stable = check_ne(&ne.instance.host, &ne.instance.profile, c.budget_cap)?.stable;
        let larger: Option<_> = (0..m).find(|s| !min.contains(s)).map(|s| {
            let mut bigger = min.clone();
            bigger.insert(s);
            bigger
        });
        let larger_stable = match &larger {
            Some(cover) => {
                let r = gen_reduction_ne(&sc.clone().with_cover(cover.clone())?)?;
                Some(check_ne(&r.instance.host, &r.instance.profile, c.budget_cap)?.stable)
            }
            None => None,
        };
        Ok(Row {
            instance: i,
            n: ne.instance.host.n(),
            t: ne.instance.host.lifetime(),
            edges: ne.instance.profile.arc_count(),
            mode: "ne".into(),
            stable: Some(stable),
            passed: br_ok && stable && larger_stable != Some(true),
            detail: format!(
                "k={k} m={m} minimum cover {} response edges {} larger cover stable {}",
                min.len(),
                resp.strategy.len(),
                larger_stable.map_or("-".into(), |b| b.to_string())
            ),
            ..Row::default()
        })
    })?;
    let notes = vec![format!("{} set-cover instances", rows.len())];
    Ok((rows, notes))
}

/// Greedy dynamics from the empty profile under a random schedule.
fn converge(host: &TemporalGraph, seed: u64) -> anyhow::Result<(Outcome, StrategyProfile)> {
    let mut cfg = DynamicsConfig::new(Schedule::UniformRandom, Rule::GreedyBr);
    cfg.seed = seed;
    let trace = run_dynamics(host, &StrategyProfile::empty(host.n()), &cfg)?;
    Ok((trace.outcome, trace.final_profile))
}

fn random_host(rng: &mut ChaCha8Rng, max_n: usize, max_t: u32) -> anyhow::Result<TemporalGraph> {
    let n = rng.random_range(4..=max_n.max(4));
    let pairs = (n * (n - 1) / 2) as u32;
    let t = rng.random_range(1..=max_t.clamp(1, pairs));
    Ok(gen_random_host(n, t, rng.random())?)
}

fn random_ge_sweep(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let count = c.count.unwrap_or(200);
    let (max_n, max_t) = (c.max_n.unwrap_or(12), c.max_t.unwrap_or(4));
    let rows = par_rows(count, |i| {
        let mut rng = c.rng(i as u64);
        let host = random_host(&mut rng, max_n, max_t)?;
        let (n, t) = (host.n(), host.lifetime());
        let (outcome, p) = converge(&host, rng.random())?;
        let mut row = Row {
            instance: i,
            n,
            t,
            edges: p.arc_count(),
            mode: "ge".into(),
            passed: true,
            detail: outcome_name(&outcome),
            ..Row::default()
        };
        if outcome != Outcome::ConvergedGe {
            return Ok(row);
        }
        let stable = check_ge(&host, &p)?.stable;
        let audit = structural_audit(&host, &p)?;
        let ratio = match poa_ratio(&host, &p, c.budget_cap) {
            Ok(r) => Some(r),
            Err(Error::SearchSpaceExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let bound = Ratio::from_integer(t as u64) - Ratio::new(t as u64, n as u64 - 1);
        let ratio_violation = t >= 2 && ratio.is_some_and(|r| r > bound);
        row.stable = Some(stable);
        row.poa = ratio.map(Into::into);
        row.antiparallel_free = Some(audit.antiparallel_free);
        row.unnecessary_arcs = Some(audit.unnecessary_arcs.len());
        row.forbidden_structure = Some(audit.forbidden_structure.is_some());
        row.bound_violation = Some(audit.bounds.falsification || ratio_violation);
        row.passed = stable && audit.clean() && !ratio_violation;
        if ratio.is_none() {
            row.detail.push_str(", optimum search capped");
        }
        Ok(row)
    })?;
    let converged = rows.iter().filter(|r| r.stable.is_some()).count();
    let violations = rows.iter().filter(|r| r.bound_violation == Some(true)).count();
    let forbidden = rows.iter().filter(|r| r.forbidden_structure == Some(true)).count();
    let notes = vec![
        format!("{converged} of {} runs converged to a greedy equilibrium", rows.len()),
        format!("{violations} bound violations, {forbidden} forbidden structures"),
    ];
    Ok((rows, notes))
}

fn freeze_relabel_audit(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let count = c.count.unwrap_or(30);
    let (max_n, max_t) = (c.max_n.unwrap_or(10), c.max_t.unwrap_or(4));
    let rows = par_rows(count, |i| {
        let mut rng = c.rng(i as u64);
        let (host, p) = loop {
            let host = random_host(&mut rng, max_n, max_t)?;
            if let (Outcome::ConvergedGe, p) = converge(&host, rng.random())? {
                break (host, p);
            }
        };
        let ge = check_ge(&host, &p)?.stable;
        let frozen = freeze_relabel(&host, &p)?;
        let ne = check_ne(&frozen, &p, c.budget_cap)?.stable;
        let same_cost = social_cost(&frozen, &p)? == social_cost(&host, &p)?;
        Ok(Row {
            instance: i,
            n: host.n(),
            t: frozen.lifetime(),
            edges: p.arc_count(),
            mode: "ne".into(),
            stable: Some(ne),
            passed: ge && ne && same_cost,
            detail: format!("greedy equilibrium on lifetime {}, social cost kept: {same_cost}", host.lifetime()),
            ..Row::default()
        })
    })?;
    let notes = vec![format!("{} greedy equilibria relabeled", rows.len())];
    Ok((rows, notes))
}

fn t2_existence_sweep(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    const EXHAUSTIVE: usize = 1 << 10;
    let count = c.count.unwrap_or(500);
    let max_n = c.max_n.unwrap_or(10).max(2);
    let rows = par_rows(EXHAUSTIVE + count, |i| {
        let (host, detail) = if i < EXHAUSTIVE {
            (two_label_host(5, i as u64), format!("labeling {i} of n=5"))
        } else {
            let mut rng = c.rng(i as u64);
            let n = rng.random_range(2..=max_n);
            let t = if n == 2 { 1 } else { 2 };
            (gen_random_host(n, t, rng.random())?, "random".to_string())
        };
        let p = gen_t2_equilibrium(&host)?;
        let stable = check_ne(&host, &p, c.budget_cap)?.stable;
        Ok(Row {
            instance: i,
            n: host.n(),
            t: host.lifetime(),
            edges: p.arc_count(),
            mode: "ne".into(),
            stable: Some(stable),
            passed: stable,
            detail,
            ..Row::default()
        })
    })?;
    let notes = vec![format!("{EXHAUSTIVE} exhaustive labelings and {count} random hosts")];
    Ok((rows, notes))
}

fn large_node_audit(c: &ExperimentConfig) -> anyhow::Result<Rows> {
    let count = c.count.unwrap_or(20);
    let n = c.max_n.unwrap_or(36);
    let max_t = c.max_t.unwrap_or(40);
    let max_arcs = n * n.saturating_sub(1);
    let min_arcs = (n..=max_arcs)
        .find(|&a| reaches_density_threshold(a, n))
        .with_context(|| format!("no graph on {n} nodes reaches the density threshold"))?;
    let mut rows = par_rows(count, |i| {
        let mut rng = c.rng(i as u64);
        let arcs = rng.random_range(min_arcs.max(600.min(max_arcs))..=max_arcs);
        let t = rng.random_range(1..=max_t.max(1));
        let g = gen_random_directed(n, arcs, t, rng.random())?;
        let w = find_large_node(&g)?;
        Ok(Row {
            instance: i,
            n,
            t,
            edges: arcs,
            passed: verify_large_node(&g, &w),
            detail: format!("z={} members {:?}", w.z, w.members),
            ..Row::default()
        })
    })?;
    let below = min_arcs - 1;
    let g = gen_random_directed(n, below, max_t.max(1), c.seed)?;
    let rejected = matches!(find_large_node(&g), Err(Error::PreconditionViolated(_)));
    rows.push(Row {
        instance: count,
        n,
        t: max_t,
        edges: below,
        passed: rejected,
        detail: format!("{below} arcs, below threshold, rejected: {rejected}"),
        ..Row::default()
    });
    let notes = vec![format!("density threshold at n={n} is {min_arcs} arcs")];
    Ok((rows, notes))
}

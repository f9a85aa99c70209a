//! Improving-response dynamics.
//!
//! One agent is activated per step. If its response under the chosen rule is
//! strictly improving, the move is applied and recorded. A run stops when no
//! agent can improve, when a profile repeats, or at the step cap.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::{CostVector, StrategyProfile};
use crate::graph::TemporalGraph;
use crate::response::{exact_best_response, greedy_best_response, BestResponse};
use crate::{Error, Node, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    RoundRobin,
    UniformRandom,
    /// Activation order, repeated cyclically.
    Explicit(Vec<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    GreedyBr,
    ExactBr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub schedule: Schedule,
    pub rule: Rule,
    /// Activation cap; `None` means `10 n^2`.
    pub max_steps: Option<usize>,
    pub seed: u64,
    /// Search cap for exact responses.
    pub budget_cap: Option<u64>,
}

impl DynamicsConfig {
    pub fn new(schedule: Schedule, rule: Rule) -> Self {
        DynamicsConfig {
            schedule,
            rule,
            max_steps: None,
            seed: 0,
            budget_cap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    /// Activation index (1-based) at which the move happened.
    pub step: usize,
    pub agent: Node,
    pub old_strategy: BTreeSet<Node>,
    pub new_strategy: BTreeSet<Node>,
    pub old_cost: CostVector,
    pub new_cost: CostVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    ConvergedGe,
    ConvergedNe,
    /// The profile after `entry_move + period` moves equals the one after
    /// `entry_move` moves (0 is the initial profile).
    CycleDetected { period: usize, entry_move: usize },
    StepCapReached,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub initial: StrategyProfile,
    pub moves: Vec<Move>,
    pub outcome: Outcome,
    pub steps: usize,
    pub seed: u64,
    pub final_profile: StrategyProfile,
}

impl DynamicsTrace {
    /// Re-applies every recorded move to the initial profile.
    pub fn replay(&self) -> Result<StrategyProfile> {
        let mut p = self.initial.clone();
        for m in &self.moves {
            if p.strategy(m.agent) != &m.old_strategy {
                return Err(Error::PreconditionViolated(format!(
                    "trace move at step {} does not match the replayed profile",
                    m.step
                )));
            }
            p.set_strategy(m.agent, m.new_strategy.clone())?;
        }
        Ok(p)
    }
}

struct Scheduler {
    schedule: Schedule,
    n: usize,
    pos: usize,
    rng: ChaCha8Rng,
}

impl Scheduler {
    fn next(&mut self) -> Node {
        match &self.schedule {
            Schedule::RoundRobin => {
                let v = self.pos % self.n;
                self.pos += 1;
                v
            }
            Schedule::UniformRandom => self.rng.random_range(0..self.n),
            Schedule::Explicit(seq) => {
                let v = seq[self.pos % seq.len()];
                self.pos += 1;
                v
            }
        }
    }

    /// Consecutive idle activations after which a verification sweep runs.
    fn quiet_limit(&self) -> usize {
        match &self.schedule {
            Schedule::Explicit(seq) => seq.len(),
            _ => self.n,
        }
    }

    /// A round-robin round of idle activations already covers every agent.
    fn needs_sweep(&self) -> bool {
        !matches!(self.schedule, Schedule::RoundRobin)
    }
}

pub fn run_dynamics(
    host: &TemporalGraph,
    initial: &StrategyProfile,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace> {
    let n = host.n();
    if initial.n() != n {
        return Err(Error::SizeMismatch {
            profile: initial.n(),
            host: n,
        });
    }
    if let Schedule::Explicit(seq) = &config.schedule {
        if seq.is_empty() {
            return Err(Error::InvalidParameter("empty explicit schedule".into()));
        }
        if let Some(&v) = seq.iter().find(|&&v| v >= n) {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
    }
    let max_steps = config.max_steps.unwrap_or(10 * n * n);
    let respond = |p: &StrategyProfile, v: Node| -> Result<BestResponse> {
        match config.rule {
            Rule::GreedyBr => greedy_best_response(host, p, v),
            Rule::ExactBr => exact_best_response(host, p, v, config.budget_cap),
        }
    };

    let mut sched = Scheduler {
        schedule: config.schedule.clone(),
        n,
        pos: 0,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };
    let mut profile = initial.clone();
    let mut moves: Vec<Move> = Vec::new();
    // Full profiles as keys, so a hash hit is always confirmed by equality.
    let mut seen: HashMap<StrategyProfile, usize> = HashMap::new();
    seen.insert(profile.clone(), 0);
    let mut step = 0;
    let mut quiet = 0;

    let outcome = 'run: loop {
        if n == 0 {
            break converged(config.rule);
        }
        let mut pending: Option<BestResponse> = None;
        if quiet >= sched.quiet_limit() {
            if !sched.needs_sweep() {
                break converged(config.rule);
            }
            for v in 0..n {
                if step >= max_steps {
                    break 'run Outcome::StepCapReached;
                }
                step += 1;
                let r = respond(&profile, v)?;
                if r.improved {
                    pending = Some(r);
                    break;
                }
            }
            if pending.is_none() {
                break converged(config.rule);
            }
        } else {
            if step >= max_steps {
                break Outcome::StepCapReached;
            }
            step += 1;
            let r = respond(&profile, sched.next())?;
            if r.improved {
                pending = Some(r);
            } else {
                quiet += 1;
            }
        }

        if let Some(r) = pending {
            quiet = 0;
            debug_assert!(r.cost < r.current_cost);
            let old_strategy = profile.strategy(r.agent).clone();
            profile.set_strategy(r.agent, r.strategy.clone())?;
            moves.push(Move {
                step,
                agent: r.agent,
                old_strategy,
                new_strategy: r.strategy,
                old_cost: r.current_cost,
                new_cost: r.cost,
            });
            if let Some(&entry) = seen.get(&profile) {
                break Outcome::CycleDetected {
                    period: moves.len() - entry,
                    entry_move: entry,
                };
            }
            seen.insert(profile.clone(), moves.len());
        }
    };

    Ok(DynamicsTrace {
        initial: initial.clone(),
        moves,
        outcome,
        steps: step,
        seed: config.seed,
        final_profile: profile,
    })
}

fn converged(rule: Rule) -> Outcome {
    match rule {
        Rule::GreedyBr => Outcome::ConvergedGe,
        Rule::ExactBr => Outcome::ConvergedNe,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::check_ge;
    use crate::graph::{is_temporally_connected, TemporalGraph};
    use crate::game::undirected_graph;

    #[test]
    fn single_label_host_converges_to_connected_ge() {
        let host = TemporalGraph::complete(6, |_, _| 1).unwrap();
        let cfg = DynamicsConfig::new(Schedule::RoundRobin, Rule::GreedyBr);
        let t = run_dynamics(&host, &StrategyProfile::empty(6), &cfg).unwrap();
        assert_eq!(t.outcome, Outcome::ConvergedGe);
        assert!(is_temporally_connected(&undirected_graph(&host, &t.final_profile).unwrap()));
        assert!(check_ge(&host, &t.final_profile).unwrap().stable);
        assert_eq!(t.replay().unwrap(), t.final_profile);
    }

    #[test]
    fn stable_start_makes_no_moves() {
        let host = TemporalGraph::complete(5, |_, _| 1).unwrap();
        let star = StrategyProfile::from_arcs(5, (1..5).map(|v| (v, 0))).unwrap();
        for schedule in [Schedule::RoundRobin, Schedule::UniformRandom, Schedule::Explicit(vec![2])] {
            let cfg = DynamicsConfig::new(schedule, Rule::GreedyBr);
            let t = run_dynamics(&host, &star, &cfg).unwrap();
            assert_eq!(t.outcome, Outcome::ConvergedGe);
            assert!(t.moves.is_empty());
        }
    }

    #[test]
    fn step_cap() {
        let host = TemporalGraph::complete(6, |_, _| 1).unwrap();
        let mut cfg = DynamicsConfig::new(Schedule::RoundRobin, Rule::GreedyBr);
        cfg.max_steps = Some(2);
        let t = run_dynamics(&host, &StrategyProfile::empty(6), &cfg).unwrap();
        assert_eq!(t.outcome, Outcome::StepCapReached);
        assert_eq!(t.steps, 2);
    }

    #[test]
    fn random_schedule_is_seed_deterministic() {
        let host = TemporalGraph::complete(6, |u, v| ((u * 7 + v * 3) % 3 + 1) as u32).unwrap();
        let mut cfg = DynamicsConfig::new(Schedule::UniformRandom, Rule::GreedyBr);
        cfg.seed = 11;
        let a = run_dynamics(&host, &StrategyProfile::empty(6), &cfg).unwrap();
        let b = run_dynamics(&host, &StrategyProfile::empty(6), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_schedule_validation() {
        let host = TemporalGraph::complete(3, |_, _| 1).unwrap();
        let cfg = DynamicsConfig::new(Schedule::Explicit(vec![]), Rule::GreedyBr);
        assert!(run_dynamics(&host, &StrategyProfile::empty(3), &cfg).is_err());
        let cfg = DynamicsConfig::new(Schedule::Explicit(vec![3]), Rule::GreedyBr);
        assert!(run_dynamics(&host, &StrategyProfile::empty(3), &cfg).is_err());
    }
}

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tncg_core::constructions::{
    gen_br_cycle, gen_hypercube, gen_random_host, gen_reduction_br, gen_reduction_ne, gen_t2_family, Instance,
};
use tncg_core::dynamics::{run_dynamics, DynamicsConfig, Rule, Schedule};
use tncg_core::equilibrium::{check, structural_audit, Mode};
use tncg_core::format::{write_profile, write_temporal_graph};
use tncg_core::optimum::{minimal_spanner, minimum_spanner, poa_ratio};
use tncg_core::response::{exact_best_response, greedy_best_response};
use tncg_core::StrategyProfile;
use tncg_harness::files::{self, read_host, read_profile, read_schedule, read_setcover};
use tncg_harness::{run_experiment, validate_files, ExperimentConfig, Fraction, Scenario};

/// Temporal reachability network creation game toolkit.
#[derive(Parser)]
#[command(name = "tncg", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for experiment reports.
    #[arg(long, global = true, default_value = "reports")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ne,
    Ge,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Ne => Mode::Ne,
            ModeArg::Ge => Mode::Ge,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Greedy,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a host (and profile) file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Check whether a profile is a Nash or greedy equilibrium.
    Check {
        #[command(flatten)]
        input: HostProfile,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Add the structural audit to the report.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        budget_cap: Option<u64>,
    },
    /// Best response of one agent.
    Br {
        #[command(flatten)]
        input: HostProfile,
        #[arg(long)]
        agent: usize,
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        budget_cap: Option<u64>,
    },
    /// Improving-response dynamics.
    Dynamics {
        #[arg(long)]
        host: PathBuf,
        /// Starting profile (default: empty).
        #[arg(long)]
        profile: Option<PathBuf>,
        /// `round-robin`, `random`, or `file:PATH` with agent indices.
        #[arg(long, default_value = "round-robin")]
        schedule: String,
        #[arg(long, value_enum, default_value_t = RuleArg::Greedy)]
        rule: RuleArg,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        budget_cap: Option<u64>,
        /// Trace output (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Minimum (default) or greedy minimal temporal spanner of a host.
    Spanner {
        #[arg(long)]
        host: PathBuf,
        #[arg(long, conflicts_with = "minimal")]
        exact: bool,
        #[arg(long)]
        minimal: bool,
        #[arg(long)]
        budget_cap: Option<u64>,
        /// Write the spanner as a graph file.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Price-of-anarchy ratio of a verified equilibrium.
    Poa {
        #[command(flatten)]
        input: HostProfile,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        budget_cap: Option<u64>,
    },
    /// Compare the exact best response in the set-cover reduction with a minimum cover.
    ReduceBr {
        #[arg(long)]
        setcover: PathBuf,
    },
    /// Check the equilibrium reduction for the cover given in the file.
    ReduceNe {
        #[arg(long)]
        setcover: PathBuf,
        #[arg(long)]
        budget_cap: Option<u64>,
    },
    /// Run a named scenario and write JSON and CSV reports.
    Experiment {
        /// One of the scenario names; may instead come from `--config`.
        scenario: Option<Scenario>,
        /// TOML file with scenario parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        max_t: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        budget_cap: Option<u64>,
    },
    /// Parse instance files (.tg, .tsp, .sc) and report line-precise errors.
    Validate {
        paths: Vec<PathBuf>,
        /// Host used to read profile files.
        #[arg(long)]
        host: Option<PathBuf>,
    },
}

#[derive(Args)]
struct HostProfile {
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    profile: PathBuf,
}

#[derive(Args)]
struct GenOut {
    /// Host output (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Profile output.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    Hypercube {
        #[arg(long)]
        dim: u32,
        #[command(flatten)]
        out: GenOut,
    },
    T2family {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: GenOut,
    },
    Brcycle {
        #[command(flatten)]
        out: GenOut,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: u32,
        #[command(flatten)]
        out: GenOut,
    },
    ReduceBr {
        #[arg(long)]
        setcover: PathBuf,
        #[command(flatten)]
        out: GenOut,
    },
    ReduceNe {
        #[arg(long)]
        setcover: PathBuf,
        #[command(flatten)]
        out: GenOut,
    },
}

/// Command result: a document to print and whether a checked property held.
struct Outcome {
    value: Option<Value>,
    holds: bool,
}

impl Outcome {
    fn ok(value: impl Serialize) -> anyhow::Result<Self> {
        Ok(Outcome {
            value: Some(serde_json::to_value(value)?),
            holds: true,
        })
    }

    fn checked(value: impl Serialize, holds: bool) -> anyhow::Result<Self> {
        Ok(Outcome {
            value: Some(serde_json::to_value(value)?),
            holds,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli).and_then(|out| {
        if let Some(v) = &out.value {
            print(v, cli.format)?;
        }
        Ok(out.holds)
    }) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn print(value: &Value, format: Format) -> anyhow::Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Csv => to_csv(value)?,
    };
    emit(&text)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Arrays of objects become one row per element, a single object one row;
/// nested values are written as JSON text.
fn to_csv(value: &Value) -> anyhow::Result<String> {
    let rows: Vec<&serde_json::Map<String, Value>> = match value {
        Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
        Value::Object(map) => match map.get("rows").and_then(Value::as_array) {
            Some(items) => items.iter().filter_map(Value::as_object).collect(),
            None => vec![map],
        },
        _ => bail!("nothing tabular to print"),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.keys())?;
    }
    for row in rows {
        w.write_record(row.values().map(|v| match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        }))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Gen { kind } => generate(kind, seed),
        Command::Check {
            input,
            mode,
            audit,
            budget_cap,
        } => {
            let (host, profile) = load(input)?;
            let mut report = check(&host, &profile, (*mode).into(), *budget_cap)?;
            if *audit {
                report.audit = Some(structural_audit(&host, &profile)?);
            }
            let stable = report.stable;
            Outcome::checked(report, stable)
        }
        Command::Br {
            input,
            agent,
            greedy,
            budget_cap,
            ..
        } => {
            let (host, profile) = load(input)?;
            let r = if *greedy {
                greedy_best_response(&host, &profile, *agent)?
            } else {
                exact_best_response(&host, &profile, *agent, *budget_cap)?
            };
            Outcome::ok(r)
        }
        Command::Dynamics {
            host,
            profile,
            schedule,
            rule,
            max_steps,
            budget_cap,
            out,
        } => {
            let host = read_host(host)?;
            let initial = match profile {
                Some(p) => read_profile(p, host.n())?,
                None => StrategyProfile::empty(host.n()),
            };
            let schedule = match schedule.as_str() {
                "round-robin" => Schedule::RoundRobin,
                "random" => Schedule::UniformRandom,
                s => match s.strip_prefix("file:") {
                    Some(path) => Schedule::Explicit(read_schedule(Path::new(path))?),
                    None => bail!("unknown schedule {s:?}; expected round-robin, random or file:PATH"),
                },
            };
            let rule = match rule {
                RuleArg::Greedy => Rule::GreedyBr,
                RuleArg::Exact => Rule::ExactBr,
            };
            let mut cfg = DynamicsConfig::new(schedule, rule);
            cfg.seed = seed;
            cfg.max_steps = *max_steps;
            cfg.budget_cap = *budget_cap;
            let trace = run_dynamics(&host, &initial, &cfg)?;
            match out {
                Some(path) => {
                    files::write(path, &(serde_json::to_string_pretty(&trace)? + "\n"))?;
                    Outcome::ok(json!({
                        "outcome": trace.outcome,
                        "moves": trace.moves.len(),
                        "steps": trace.steps,
                        "seed": trace.seed,
                        "trace": path,
                    }))
                }
                None => Outcome::ok(trace),
            }
        }
        Command::Spanner {
            host,
            minimal,
            budget_cap,
            out,
            ..
        } => {
            let host = read_host(host)?;
            let (graph, method, nodes) = if *minimal {
                (minimal_spanner(&host)?, "greedy-removal".to_string(), 0)
            } else {
                let s = minimum_spanner(&host, *budget_cap)?;
                (s.graph, serde_json::to_value(s.method)?.as_str().unwrap_or_default().to_string(), s.nodes)
            };
            if let Some(path) = out {
                files::write(path, &write_temporal_graph(&graph))?;
            }
            let edges: Vec<_> = graph.edges().iter().map(|e| [e.u, e.v, e.label as usize]).collect();
            Outcome::ok(json!({
                "size": graph.edge_count(),
                "method": method,
                "search_nodes": nodes,
                "edges": edges,
            }))
        }
        Command::Poa {
            input,
            mode,
            budget_cap,
        } => {
            let (host, profile) = load(input)?;
            let report = check(&host, &profile, (*mode).into(), *budget_cap)?;
            if !report.stable {
                return Outcome::checked(
                    json!({ "stable": false, "witness": report.witness, "poa": null }),
                    false,
                );
            }
            let ratio: Fraction = poa_ratio(&host, &profile, *budget_cap)?.into();
            Outcome::ok(json!({
                "stable": true,
                "social_cost_edges": report.social_cost.edges,
                "poa": ratio,
            }))
        }
        Command::ReduceBr { setcover } => {
            let sc = read_setcover(setcover)?;
            let r = gen_reduction_br(&sc)?;
            let resp = exact_best_response(&r.instance.host, &r.instance.profile, r.x, None)?;
            let min = sc.minimum_cover().context("the sets do not cover the universe")?;
            let agree = resp.cost.unreached == 0 && resp.strategy.len() == min.len();
            Outcome::checked(
                json!({
                    "response": names(&r.instance, &resp.strategy),
                    "response_edges": resp.strategy.len(),
                    "minimum_cover_size": min.len(),
                    "agree": agree,
                }),
                agree,
            )
        }
        Command::ReduceNe { setcover, budget_cap } => {
            let sc = read_setcover(setcover)?;
            let cover = sc.cover().context("the set-cover file has no `cover:` line")?.clone();
            let r = gen_reduction_ne(&sc)?;
            let stable = check(&r.instance.host, &r.instance.profile, Mode::Ne, *budget_cap)?.stable;
            let min = sc.minimum_cover_size().context("the sets do not cover the universe")?;
            let minimum = cover.len() == min;
            Outcome::checked(
                json!({
                    "cover": cover.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "cover_is_minimum": minimum,
                    "stable": stable,
                    "consistent": stable == minimum,
                }),
                stable == minimum,
            )
        }
        Command::Experiment {
            scenario,
            config,
            count,
            max_n,
            max_t,
            dims,
            sizes,
            budget_cap,
        } => {
            let mut cfg = match (config, scenario) {
                (Some(path), _) => ExperimentConfig::from_toml(
                    &std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
                )?,
                (None, Some(s)) => ExperimentConfig::new(*s, 0),
                (None, None) => bail!("name a scenario or pass --config"),
            };
            if let Some(s) = scenario {
                cfg.scenario = *s;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            cfg.count = count.or(cfg.count);
            cfg.max_n = max_n.or(cfg.max_n);
            cfg.max_t = max_t.or(cfg.max_t);
            cfg.dims = dims.clone().or(cfg.dims);
            cfg.sizes = sizes.clone().or(cfg.sizes);
            cfg.budget_cap = budget_cap.or(cfg.budget_cap);
            let report = run_experiment(&cfg)?;
            let (json_path, csv_path) = report.write(&cli.out_dir)?;
            let passed = report.passed();
            if cli.format == Format::Csv {
                emit(&report.to_csv()?)?;
                return Ok(Outcome { value: None, holds: passed });
            }
            Outcome::checked(
                json!({
                    "scenario": report.scenario,
                    "provenance": report.provenance,
                    "summary": report.summary,
                    "json": json_path,
                    "csv": csv_path,
                }),
                passed,
            )
        }
        Command::Validate { paths, host } => {
            if paths.is_empty() {
                bail!("no files given");
            }
            let diags = validate_files(paths, host.as_deref());
            if diags.iter().all(|d| d.ok) {
                Outcome::ok(diags)
            } else {
                print(&serde_json::to_value(&diags)?, cli.format)?;
                bail!("{} of {} files failed validation", diags.iter().filter(|d| !d.ok).count(), diags.len())
            }
        }
    }
}

fn load(input: &HostProfile) -> anyhow::Result<(tncg_core::TemporalGraph, StrategyProfile)> {
    let host = read_host(&input.host)?;
    let profile = read_profile(&input.profile, host.n())?;
    Ok((host, profile))
}

fn names(inst: &Instance, s: &BTreeSet<usize>) -> Vec<String> {
    s.iter().map(|&v| inst.names[v].clone()).collect()
}

fn generate(kind: &GenKind, seed: u64) -> anyhow::Result<Outcome> {
    let mut extra = serde_json::Map::new();
    let (inst, out) = match kind {
        GenKind::Hypercube { dim, out } => (gen_hypercube(*dim)?, out),
        GenKind::T2family { n, out } => (gen_t2_family(*n)?, out),
        GenKind::Brcycle { out } => {
            let c = gen_br_cycle();
            extra.insert("schedule".into(), json!(c.schedule));
            (c.instance, out)
        }
        GenKind::Random { n, t, out } => {
            let host = gen_random_host(*n, *t, seed)?;
            let names = (0..*n).map(|v| v.to_string()).collect();
            let profile = StrategyProfile::empty(*n);
            (Instance { host, profile, names }, out)
        }
        GenKind::ReduceBr { setcover, out } => {
            let r = gen_reduction_br(&read_setcover(setcover)?)?;
            extra.insert("x".into(), json!(r.x));
            (r.instance, out)
        }
        GenKind::ReduceNe { setcover, out } => {
            let r = gen_reduction_ne(&read_setcover(setcover)?)?;
            extra.insert("x".into(), json!(r.x));
            (r.instance, out)
        }
    };
    let host_text = write_temporal_graph(&inst.host);
    if let Some(p) = &out.profile {
        files::write(p, &write_profile(&inst.profile))?;
    }
    match &out.out {
        Some(path) => files::write(path, &host_text)?,
        None => {
            emit(&host_text)?;
            return Ok(Outcome {
                value: None,
                holds: true,
            });
        }
    }
    let mut summary = serde_json::Map::new();
    summary.insert("n".into(), json!(inst.host.n()));
    summary.insert("lifetime".into(), json!(inst.host.lifetime()));
    summary.insert("arcs".into(), json!(inst.profile.arc_count()));
    summary.insert("names".into(), json!(inst.names));
    summary.extend(extra);
    Outcome::ok(Value::Object(summary))
}

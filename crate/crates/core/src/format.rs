//! Plain-text formats.
//!
//! - temporal graphs (`.tg`): a header `n t`, then one `u v label` line per
//!   edge with 0-indexed nodes;
//! - strategy profiles (`.tsp`): one `v: e1 e2 ...` line per agent, agents
//!   with an empty strategy may be left out;
//! - set cover: a header `k m`, then `m` lines of 1-indexed elements, and an
//!   optional `cover: i1 i2 ...` line with 1-indexed set numbers.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Errors
//! carry the 1-based line number they refer to.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::game::StrategyProfile;
use crate::graph::TemporalGraph;
use crate::setcover::SetCoverInstance;
use crate::{Error, Label, Node, Result};

fn err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<T: FromStr>(line: usize, s: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| err(line, format!("expected a non-negative integer, found {tok:?}"))))
        .collect()
}

fn header(line: usize, s: &str, what: &str) -> Result<(usize, usize)> {
    match numbers::<usize>(line, s)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(err(line, format!("expected header `{what}`"))),
    }
}

/// Parses a temporal graph; pairs may be missing.
pub fn parse_temporal_graph(text: &str) -> Result<TemporalGraph> {
    let mut lines = content_lines(text);
    let (hl, head) = lines.next().ok_or_else(|| err(1, "missing header `n t`"))?;
    let (n, t) = header(hl, head, "n t")?;
    let t = Label::try_from(t).map_err(|_| err(hl, "lifetime too large"))?;
    let mut seen = vec![false; n * n];
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let [u, v, label] = numbers::<u64>(ln, l)?[..] else {
            return Err(err(ln, "expected `u v label`"));
        };
        for x in [u, v] {
            if x >= n as u64 {
                return Err(err(ln, format!("node {x} out of range (n = {n})")));
            }
        }
        let (u, v) = (u as Node, v as Node);
        if u == v {
            return Err(err(ln, format!("self-loop at node {u}")));
        }
        if label == 0 || label > t as u64 {
            return Err(err(ln, format!("label {label} outside 1..={t}")));
        }
        if seen[u * n + v] {
            return Err(err(ln, format!("pair {{{u}, {v}}} listed more than once")));
        }
        seen[u * n + v] = true;
        seen[v * n + u] = true;
        edges.push((u, v, label as Label));
    }
    TemporalGraph::with_lifetime(n, t, edges).map_err(|e| err(hl, e.to_string()))
}

/// Parses a host: every pair must be listed and labels must be `1..=t`.
pub fn parse_host(text: &str) -> Result<TemporalGraph> {
    let g = parse_temporal_graph(text)?;
    let last = text.lines().count().max(1);
    match g.validate_host() {
        Ok(()) => Ok(g),
        Err(e @ Error::IncompleteHost { .. }) => Err(err(last, e.to_string())),
        Err(e) => Err(err(1, e.to_string())),
    }
}

/// Writes `g` with edges in lexicographic pair order.
pub fn write_temporal_graph(g: &TemporalGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.lifetime());
    let mut edges = g.edges().to_vec();
    edges.sort_by_key(|e| (e.u, e.v));
    for e in edges {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.label);
    }
    out
}

/// Parses a profile for `n` agents.
pub fn parse_profile(text: &str, n: usize) -> Result<StrategyProfile> {
    let mut strategies = vec![BTreeSet::new(); n];
    let mut listed = vec![false; n];
    for (ln, l) in content_lines(text) {
        let (agent, rest) = l.split_once(':').ok_or_else(|| err(ln, "expected `v: e1 e2 ...`"))?;
        let agent: Node = agent
            .trim()
            .parse()
            .map_err(|_| err(ln, format!("bad agent {:?}", agent.trim())))?;
        if agent >= n {
            return Err(err(ln, format!("agent {agent} out of range (n = {n})")));
        }
        if std::mem::replace(&mut listed[agent], true) {
            return Err(err(ln, format!("agent {agent} listed more than once")));
        }
        for e in numbers::<Node>(ln, rest)? {
            if e >= n {
                return Err(err(ln, format!("endpoint out of range: {e} (n = {n})")));
            }
            if e == agent {
                return Err(err(ln, format!("agent {agent} lists itself")));
            }
            if !strategies[agent].insert(e) {
                return Err(err(ln, format!("endpoint {e} repeated")));
            }
        }
    }
    StrategyProfile::from_strategies(strategies)
}

/// Writes one line per agent with a non-empty strategy.
pub fn write_profile(p: &StrategyProfile) -> String {
    let mut out = String::new();
    for (v, s) in p.strategies().iter().enumerate().filter(|(_, s)| !s.is_empty()) {
        let ends: Vec<String> = s.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "{v}: {}", ends.join(" "));
    }
    out
}

pub fn parse_setcover(text: &str) -> Result<SetCoverInstance> {
    let mut lines = content_lines(text).peekable();
    let (hl, head) = lines.next().ok_or_else(|| err(1, "missing header `k m`"))?;
    let (k, m) = header(hl, head, "k m")?;
    let mut sets = Vec::with_capacity(m);
    let mut cover = None;
    for (ln, l) in lines {
        if let Some(rest) = l.strip_prefix("cover:") {
            if cover.is_some() {
                return Err(err(ln, "second cover line"));
            }
            let mut c = BTreeSet::new();
            for i in numbers::<usize>(ln, rest)? {
                if i == 0 || i > m {
                    return Err(err(ln, format!("set {i} out of range 1..={m}")));
                }
                c.insert(i - 1);
            }
            cover = Some((ln, c));
            continue;
        }
        if cover.is_some() {
            return Err(err(ln, "sets must precede the cover line"));
        }
        if sets.len() == m {
            return Err(err(ln, format!("more than {m} sets")));
        }
        let mut s = BTreeSet::new();
        for e in numbers::<usize>(ln, l)? {
            if e == 0 || e > k {
                return Err(err(ln, format!("element {e} out of range 1..={k}")));
            }
            s.insert(e - 1);
        }
        if s.is_empty() {
            return Err(err(ln, "empty set"));
        }
        sets.push(s);
    }
    if sets.len() < m {
        return Err(err(text.lines().count().max(1), format!("expected {m} sets, found {}", sets.len())));
    }
    let sc = SetCoverInstance::new(k, sets).map_err(|e| err(hl, e.to_string()))?;
    match cover {
        Some((ln, c)) => sc.with_cover(c).map_err(|e| err(ln, e.to_string())),
        None => Ok(sc),
    }
}

pub fn write_setcover(sc: &SetCoverInstance) -> String {
    let one_based = |s: &BTreeSet<usize>| s.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("{} {}\n", sc.k(), sc.m());
    for s in sc.sets() {
        let _ = writeln!(out, "{}", one_based(s));
    }
    if let Some(c) = sc.cover() {
        let _ = writeln!(out, "cover: {}", one_based(c));
    }
    out
}

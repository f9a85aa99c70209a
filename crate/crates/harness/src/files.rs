//! Reading and validating instance files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use tncg_core::format::{
    parse_host, parse_profile, parse_setcover, parse_temporal_graph, write_profile, write_setcover,
    write_temporal_graph,
};
use tncg_core::{SetCoverInstance, StrategyProfile, TemporalGraph};

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_host(path: &Path) -> anyhow::Result<TemporalGraph> {
    parse_host(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn read_profile(path: &Path, n: usize) -> anyhow::Result<StrategyProfile> {
    parse_profile(&read(path)?, n).with_context(|| format!("in {}", path.display()))
}

pub fn read_setcover(path: &Path) -> anyhow::Result<SetCoverInstance> {
    parse_setcover(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Whitespace-separated agent indices.
pub fn read_schedule(path: &Path) -> anyhow::Result<Vec<usize>> {
    read(path)?
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(|tok| tok.parse().with_context(|| format!("bad agent {tok:?} in {}", path.display())))
        .collect()
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Host,
    Profile,
    SetCover,
}

impl FileKind {
    /// `.tg` hosts, `.tsp` profiles, `.sc` set-cover instances.
    pub fn of(path: &Path) -> Option<FileKind> {
        match path.extension()?.to_str()? {
            "tg" => Some(FileKind::Host),
            "tsp" => Some(FileKind::Profile),
            "sc" => Some(FileKind::SetCover),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub kind: Option<FileKind>,
    pub ok: bool,
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn from_result(path: &Path, kind: Option<FileKind>, r: Result<(), tncg_core::Error>) -> Self {
        let (ok, line, message) = match r {
            Ok(()) => (true, None, "ok".to_string()),
            Err(tncg_core::Error::Parse { line, reason }) => (false, Some(line), reason),
            Err(e) => (false, None, e.to_string()),
        };
        Diagnostic {
            path: path.to_path_buf(),
            kind,
            ok,
            line,
            message,
        }
    }
}

fn round_trip_error(what: &str) -> tncg_core::Error {
    tncg_core::Error::InvalidInstance(format!("{what} changed after a write and re-read"))
}

/// Parses every file and checks that writing and re-reading it is lossless.
///
/// Profiles are read against `host` when given, otherwise against the first
/// host file in `paths`.
pub fn validate_files(paths: &[PathBuf], host: Option<&Path>) -> Vec<Diagnostic> {
    let host_path = host
        .map(Path::to_path_buf)
        .or_else(|| paths.iter().find(|p| FileKind::of(p) == Some(FileKind::Host)).cloned());
    let host_n = host_path
        .as_deref()
        .and_then(|p| fs::read_to_string(p).ok())
        .and_then(|t| parse_temporal_graph(&t).ok())
        .map(|g| g.n());

    paths
        .iter()
        .map(|path| {
            let kind = FileKind::of(path);
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    return Diagnostic {
                        path: path.clone(),
                        kind,
                        ok: false,
                        line: None,
                        message: e.to_string(),
                    }
                }
            };
            let result = match kind {
                Some(FileKind::Host) => parse_host(&text).and_then(|g| {
                    let again = parse_host(&write_temporal_graph(&g))?;
                    if again == g { Ok(()) } else { Err(round_trip_error("host")) }
                }),
                Some(FileKind::Profile) => match host_n {
                    Some(n) => parse_profile(&text, n).and_then(|p| {
                        let again = parse_profile(&write_profile(&p), n)?;
                        if again == p { Ok(()) } else { Err(round_trip_error("profile")) }
                    }),
                    None => Err(tncg_core::Error::InvalidParameter(
                        "a profile needs a host file to know the number of agents".into(),
                    )),
                },
                Some(FileKind::SetCover) => parse_setcover(&text).and_then(|sc| {
                    let again = parse_setcover(&write_setcover(&sc))?;
                    if again == sc { Ok(()) } else { Err(round_trip_error("set-cover instance")) }
                }),
                None => Err(tncg_core::Error::InvalidParameter(
                    "unknown file type; expected .tg, .tsp or .sc".into(),
                )),
            };
            Diagnostic::from_result(path, kind, result)
        })
        .collect()
}

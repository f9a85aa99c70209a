//! Experiment reports: JSON document plus a flat CSV table.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tncg_core::Ratio;

pub const TOOL: &str = "tncg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact rational as integer fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl From<Ratio> for Fraction {
    fn from(r: Ratio) -> Self {
        Fraction {
            numerator: *r.numer(),
            denominator: *r.denom(),
        }
    }
}

impl From<Fraction> for Ratio {
    fn from(f: Fraction) -> Self {
        Ratio::new(f.numerator, f.denominator)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_digest: String,
}

impl Provenance {
    pub fn new<C: Serialize>(seed: u64, config: &C) -> Self {
        let canonical = serde_json::to_vec(config).expect("config serializes");
        Provenance {
            tool: TOOL.into(),
            version: VERSION.into(),
            seed,
            config_digest: hex::encode(Sha256::digest(&canonical)),
        }
    }
}

/// One instance of a scenario.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub instance: usize,
    pub n: usize,
    pub t: u32,
    pub edges: usize,
    /// `ne`, `ge` or empty when no equilibrium check applies.
    pub mode: String,
    pub stable: Option<bool>,
    pub poa: Option<Fraction>,
    pub antiparallel_free: Option<bool>,
    pub unnecessary_arcs: Option<usize>,
    pub forbidden_structure: Option<bool>,
    pub bound_violation: Option<bool>,
    pub passed: bool,
    pub detail: String,
}

/// Flat CSV record; rationals stay split into integer columns.
#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub instance: usize,
    pub n: usize,
    pub t: u32,
    pub edges: usize,
    pub mode: String,
    pub stable: Option<bool>,
    pub poa_numerator: Option<u64>,
    pub poa_denominator: Option<u64>,
    pub antiparallel_free: Option<bool>,
    pub unnecessary_arcs: Option<usize>,
    pub forbidden_structure: Option<bool>,
    pub bound_violation: Option<bool>,
    pub passed: bool,
    pub detail: String,
}

impl From<&Row> for CsvRow {
    fn from(r: &Row) -> Self {
        CsvRow {
            instance: r.instance,
            n: r.n,
            t: r.t,
            edges: r.edges,
            mode: r.mode.clone(),
            stable: r.stable,
            poa_numerator: r.poa.map(|f| f.numerator),
            poa_denominator: r.poa.map(|f| f.denominator),
            antiparallel_free: r.antiparallel_free,
            unnecessary_arcs: r.unnecessary_arcs,
            forbidden_structure: r.forbidden_structure,
            bound_violation: r.bound_violation,
            passed: r.passed,
            detail: r.detail.clone(),
        }
    }
}

impl CsvRow {
    pub fn into_row(self) -> Row {
        Row {
            instance: self.instance,
            n: self.n,
            t: self.t,
            edges: self.edges,
            mode: self.mode,
            stable: self.stable,
            poa: match (self.poa_numerator, self.poa_denominator) {
                (Some(numerator), Some(denominator)) => Some(Fraction { numerator, denominator }),
                _ => None,
            },
            antiparallel_free: self.antiparallel_free,
            unnecessary_arcs: self.unnecessary_arcs,
            forbidden_structure: self.forbidden_structure,
            bound_violation: self.bound_violation,
            passed: self.passed,
            detail: self.detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: usize,
    pub failures: usize,
    /// Scenario-specific headline, e.g. the ratios found.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub provenance: Provenance,
    pub config: serde_json::Value,
    pub summary: Summary,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        rows_to_csv(&self.rows)
    }

    /// Writes `<scenario>.json` and `<scenario>.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let json = dir.join(format!("{}.json", self.scenario));
        let csv = dir.join(format!("{}.csv", self.scenario));
        fs::write(&json, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing {}", json.display()))?;
        fs::write(&csv, self.to_csv()?).with_context(|| format!("writing {}", csv.display()))?;
        Ok((json, csv))
    }
}

pub fn rows_to_csv(rows: &[Row]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRow::from(r))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn rows_from_csv(text: &str) -> anyhow::Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize::<CsvRow>()
        .map(|row| Ok(row?.into_row()))
        .collect()
}

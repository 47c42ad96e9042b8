//! Benchmark forging and judging.
//!
//! A benchmark set holds restructured variants of golden circuits, each of
//! which may or may not carry a Trojan. The public set is anonymized; the
//! truth lives in a separate answer key that the judge scores submissions
//! against.

mod forge;
mod judge;
mod store;

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::Metric;
use crate::equiv::EquivConfig;
use crate::netlist::Netlist;
use crate::restructure::Recipe;
use crate::trojan::TrojanRecord;

pub use forge::forge_benchmark;
pub use judge::{
    conf_val, export_key, judge_window, score_submission, ConfusionReport, EntryTruth,
    GoldenBreakdown, Judged, Label, Submission, WindowPolicy,
};
pub use store::{
    default_key_path, load_forge_config, read_key, read_manifest, read_submission_csv, write_set,
    ForgeConfigFile,
};

/// Version of the manifest and key layout.
pub const FORMAT_VERSION: u32 = 1;
/// Supported life span of a released set.
pub const LIFESPAN_MONTHS: u32 = 36;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("golden `{golden}` variant {variant}: {detail}")]
    Insertion {
        golden: String,
        variant: usize,
        detail: String,
    },
    #[error("generation bug in golden `{golden}` variant {variant}: {detail}")]
    Generation {
        golden: String,
        variant: usize,
        detail: String,
    },
    #[error("submission does not match the key: {0}")]
    Submission(String),
    #[error("alpha must be a positive finite number, got {0}")]
    Alpha(f64),
    #[error("benchmark retired on {0}")]
    Retired(NaiveDate),
    #[error("the key stays sealed until {0}")]
    Sealed(NaiveDate),
    #[error("key does not belong to this set: {0}")]
    KeyMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: crate::netlist::NetlistError,
    },
}

/// How many variants of each golden circuit carry a Trojan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infection {
    /// Independent seeded coin per variant.
    Rate(f64),
    /// Exactly this many infected variants per golden, by position.
    Counts(Vec<usize>),
}

/// Distribution the per-variant [`crate::trojan::TrojanSpec`] is drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrojanDistribution {
    /// Trigger widths, drawn uniformly.
    pub q: Vec<usize>,
    /// Rare trigger nets per Trojan; `None` makes every trigger net rare.
    #[serde(default)]
    pub p: Option<usize>,
    pub metric: Metric,
    pub threshold: f64,
}

impl Default for TrojanDistribution {
    fn default() -> Self {
        TrojanDistribution {
            q: vec![2, 3, 4],
            p: None,
            metric: Metric::SignalProbLow,
            threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForgeConfig {
    pub set_name: String,
    pub goldens: Vec<Netlist>,
    pub variants_per_golden: usize,
    pub infection: Infection,
    pub recipes: Vec<Recipe>,
    pub trojans: TrojanDistribution,
    pub seed: u64,
    pub release: NaiveDate,
    pub equiv: EquivConfig,
    /// Hash of the configuration source, echoed into provenance blocks.
    pub config_hash: String,
}

impl ForgeConfig {
    pub fn expiry(&self) -> NaiveDate {
        expiry_of(self.release)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.set_name.is_empty()
            || !self
                .set_name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return bad(format!(
                "set name `{}` must be non-empty ASCII letters, digits, '-', '_' or '.'",
                self.set_name
            ));
        }
        if self.goldens.is_empty() {
            return bad("no golden circuits".into());
        }
        if self.variants_per_golden == 0 {
            return bad("variants_per_golden must be at least 1".into());
        }
        if self.recipes.is_empty() {
            return bad("the recipe pool is empty".into());
        }
        match &self.infection {
            Infection::Rate(r) if !(0.0..=1.0).contains(r) => {
                return bad(format!("infection rate {r} is outside [0, 1]"))
            }
            Infection::Counts(c) if c.len() != self.goldens.len() => {
                return bad(format!(
                    "{} infection counts for {} goldens",
                    c.len(),
                    self.goldens.len()
                ))
            }
            Infection::Counts(c) if c.iter().any(|&k| k > self.variants_per_golden) => {
                return bad("an infection count exceeds variants_per_golden".into())
            }
            _ => {}
        }
        if self.trojans.q.is_empty() || self.trojans.q.iter().any(|&q| q < 2) {
            return bad("trigger widths must be non-empty and at least 2".into());
        }
        if let Some(p) = self.trojans.p {
            if self.trojans.q.iter().any(|&q| p > q) {
                return bad(format!("rare count {p} exceeds a trigger width"));
            }
        }
        for g in &self.goldens {
            if !g.is_valid() {
                return bad(format!("golden `{}` is not a valid netlist", g.name()));
            }
        }
        Ok(())
    }
}

pub fn expiry_of(release: NaiveDate) -> NaiveDate {
    release
        .checked_add_months(Months::new(LIFESPAN_MONTHS))
        .expect("date in range")
}

/// Tool identity and inputs behind an artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash.into(),
            seed,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub set_name: String,
    pub format_version: u32,
    pub entry_count: usize,
    pub release: NaiveDate,
    pub expiry: NaiveDate,
    pub entries: Vec<ManifestEntry>,
    pub provenance: Provenance,
}

impl Manifest {
    /// The exact bytes written to `manifest.json`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("serializable");
        v.push(b'\n');
        v
    }

    pub fn checksum(&self) -> String {
        sha256_hex(&self.to_bytes())
    }
}

/// The public half of a forged set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkSet {
    pub manifest: Manifest,
    /// `(id, structural Verilog)` in id order.
    pub circuits: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSeeds {
    pub variant: u64,
    pub recipe: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trojan: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyEntry {
    pub id: String,
    pub golden: String,
    pub golden_index: usize,
    pub variant: usize,
    pub recipe: u32,
    /// 1 when the variant carries a Trojan.
    pub k: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trojan: Option<TrojanRecord>,
    pub seeds: VariantSeeds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerKey {
    pub set_name: String,
    pub format_version: u32,
    /// Checksum of the manifest this key belongs to.
    pub manifest_checksum: String,
    pub release: NaiveDate,
    pub expiry: NaiveDate,
    /// Set by [`export_key`] once the set is retired; scoring against an
    /// expired key also reports per-entry truth.
    #[serde(default)]
    pub expired: bool,
    pub entries: Vec<KeyEntry>,
    pub provenance: Provenance,
}

impl AnswerKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("serializable");
        v.push(b'\n');
        v
    }

    pub fn checksum(&self) -> String {
        sha256_hex(&self.to_bytes())
    }

    pub fn infected_count(&self) -> usize {
        self.entries.iter().filter(|e| e.k == 1).count()
    }

    /// Fails unless the key was sealed against `manifest`.
    pub fn check_binding(&self, manifest: &Manifest) -> Result<(), BenchError> {
        let sum = manifest.checksum();
        if sum != self.manifest_checksum {
            return Err(BenchError::KeyMismatch(format!(
                "manifest checksum {sum} differs from the key's {}",
                self.manifest_checksum
            )));
        }
        Ok(())
    }
}

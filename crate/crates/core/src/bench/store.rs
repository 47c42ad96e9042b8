use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{
    sha256_hex, AnswerKey, BenchError, BenchmarkSet, ForgeConfig, Infection, Label, Manifest,
    Submission, TrojanDistribution,
};
use crate::equiv::EquivConfig;
use crate::netlist::parse_netlist;
use crate::restructure::{builtin_recipe, builtin_recipes};

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn json(path: &Path) -> impl FnOnce(serde_json::Error) -> BenchError + '_ {
    move |source| BenchError::Json {
        path: path.display().to_string(),
        source,
    }
}

fn default_vectors() -> u64 {
    EquivConfig::default().vectors
}

fn default_bound() -> usize {
    EquivConfig::default().exhaustive_bound
}

/// On-disk form of [`ForgeConfig`]; golden paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForgeConfigFile {
    pub set_name: String,
    pub goldens: Vec<PathBuf>,
    pub variants_per_golden: usize,
    pub infection: Infection,
    /// Built-in recipe ids; all 18 when absent.
    #[serde(default)]
    pub recipes: Option<Vec<u32>>,
    #[serde(default)]
    pub trojans: TrojanDistribution,
    pub seed: u64,
    pub release: NaiveDate,
    #[serde(default = "default_bound")]
    pub exhaustive_bound: usize,
    #[serde(default = "default_vectors")]
    pub vectors: u64,
}

/// Loads a forge configuration. `seed_override` replaces the file's seed.
/// The configuration hash covers the file and every golden netlist.
pub fn load_forge_config(
    path: &Path,
    seed_override: Option<u64>,
) -> Result<ForgeConfig, BenchError> {
    let bytes = fs::read(path).map_err(io(path))?;
    let file: ForgeConfigFile = serde_json::from_slice(&bytes).map_err(json(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut hash_input = bytes.clone();
    let mut goldens = Vec::with_capacity(file.goldens.len());
    for g in &file.goldens {
        let p = base.join(g);
        let text = fs::read_to_string(&p).map_err(io(&p))?;
        hash_input.extend_from_slice(text.as_bytes());
        goldens.push(parse_netlist(&text).map_err(|source| BenchError::Parse {
            path: p.display().to_string(),
            source,
        })?);
    }
    let recipes = match &file.recipes {
        None => builtin_recipes(),
        Some(ids) => ids
            .iter()
            .map(|&id| builtin_recipe(id).map_err(|e| BenchError::Config(e.to_string())))
            .collect::<Result<_, _>>()?,
    };
    let seed = seed_override.unwrap_or(file.seed);
    Ok(ForgeConfig {
        set_name: file.set_name,
        goldens,
        variants_per_golden: file.variants_per_golden,
        infection: file.infection,
        recipes,
        trojans: file.trojans,
        seed,
        release: file.release,
        equiv: EquivConfig {
            exhaustive_bound: file.exhaustive_bound,
            vectors: file.vectors,
            seed,
            ..EquivConfig::default()
        },
        config_hash: sha256_hex(&hash_input),
    })
}

/// Conventional key location for a set directory: `<set>.key.json` next to it.
pub fn default_key_path(dir: &Path) -> PathBuf {
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "set".into());
    dir.with_file_name(format!("{name}.key.json"))
}

/// Writes `<dir>/manifest.json`, `<dir>/circuits/<id>.v` and the key.
pub fn write_set(
    dir: &Path,
    set: &BenchmarkSet,
    key: &AnswerKey,
    key_path: &Path,
) -> Result<(), BenchError> {
    let circuits = dir.join("circuits");
    fs::create_dir_all(&circuits).map_err(io(&circuits))?;
    for (id, text) in &set.circuits {
        let p = circuits.join(format!("{id}.v"));
        fs::write(&p, text).map_err(io(&p))?;
    }
    let m = dir.join("manifest.json");
    fs::write(&m, set.manifest.to_bytes()).map_err(io(&m))?;
    fs::write(key_path, key.to_bytes()).map_err(io(key_path))?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, BenchError> {
    let p = dir.join("manifest.json");
    let bytes = fs::read(&p).map_err(io(&p))?;
    serde_json::from_slice(&bytes).map_err(json(&p))
}

pub fn read_key(path: &Path) -> Result<AnswerKey, BenchError> {
    let bytes = fs::read(path).map_err(io(path))?;
    serde_json::from_slice(&bytes).map_err(json(path))
}

#[derive(Debug, Deserialize)]
struct Row {
    circuit_id: String,
    label: String,
}

/// Reads a `circuit_id,label` submission file.
pub fn read_submission_csv(
    path: &Path,
    set_name: &str,
    submitter: &str,
) -> Result<Submission, BenchError> {
    let csv_err = |source| BenchError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["circuit_id", "label"] {
        return Err(BenchError::Submission(format!(
            "expected header `circuit_id,label`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize::<Row>() {
        let row = rec.map_err(csv_err)?;
        rows.push((row.circuit_id, row.label.parse::<Label>()?));
    }
    Submission::from_rows(set_name, submitter, rows)
}

//! The `forge` command line.
//!
//! Exit codes: 0 success, 1 domain negative (a counterexample, a failed
//! check, an impossible insertion, a retired benchmark), 2 usage or input
//! error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::aig::{to_aig, write_aiger_ascii, write_aiger_binary};
use crate::analysis::{
    exact_signal_prob, rare_nets, report, scoap, signal_prob, Metric, RareSource, EXACT_PROB_BOUND,
};
use crate::analytics::{
    expected_game_length, extract_features, ht_space_size, pca_fit, pca_project, scatter_svg,
    seek_simulate, ScatterPoint, Strategy, StrategyProfile, FEATURE_NAMES, FEATURE_VERSION,
};
use crate::bench::{
    default_key_path, export_key, forge_benchmark, judge_window, load_forge_config, read_key,
    read_manifest, read_submission_csv, score_submission, sha256_hex, write_set, BenchError,
    Judged, Provenance, WindowPolicy,
};
use crate::equiv::{check_equivalence, check_trojan_semantics, EquivConfig};
use crate::netlist::{parse_netlist, write_netlist, Netlist, Severity};
use crate::restructure::{apply_recipe, builtin_recipe, Recipe};
use crate::trojan::{insert_trojan, TrojanError, TrojanRecord, TrojanSpec};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Negative(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Negative(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn bench_err(e: BenchError) -> CliError {
    match e {
        BenchError::Retired(_) | BenchError::Sealed(_) | BenchError::Insertion { .. } => {
            CliError::Negative(e.to_string())
        }
        e => usage(e),
    }
}

type CliResult = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(name = "forge", version, about = "Forge hidden-Trojan benchmark sets and judge detector submissions")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log level: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Parse and validate a netlist.
    Parse {
        file: PathBuf,
        /// Print the canonical JSON dump instead of a summary.
        #[arg(long)]
        json: bool,
    },
    /// Apply a restructuring recipe.
    Restructure(RestructureArgs),
    /// Insert a Trojan into a netlist.
    Insert(InsertArgs),
    /// Re-verify an infected netlist against its golden model and record.
    CheckTrojan {
        golden: PathBuf,
        infected: PathBuf,
        #[arg(long)]
        record: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Forge a benchmark set and its sealed answer key.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output set directory.
        #[arg(short, long)]
        out: PathBuf,
        /// Key path (default: `<set>.key.json` next to the set).
        #[arg(long)]
        key: Option<PathBuf>,
        /// Overrides the configuration seed.
        #[arg(long, env = "FORGE_SEED")]
        seed: Option<u64>,
    },
    /// Score a submission against an answer key.
    Judge(JudgeArgs),
    /// Publish a retired answer key.
    ExportKey {
        #[arg(long)]
        key: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Today's date (default: the system date, UTC).
        #[arg(long)]
        date: Option<NaiveDate>,
    },
    /// SCOAP testability and signal probabilities per net.
    Analyze(AnalyzeArgs),
    /// Combinational equivalence of two netlists (exit 0 equal, 1 differ, 2 inconclusive).
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Feature matrix of every circuit in a set.
    Features {
        set: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        /// Answer key used to add an infected/clean label column.
        #[arg(long)]
        key: Option<PathBuf>,
    },
    /// Principal components of a feature matrix.
    Pca(PcaArgs),
    /// Size of the Trojan placement space.
    Space(SpaceArgs),
    /// Simulate the hide-and-seek game.
    Game(GameArgs),
    /// AIG export.
    Aig {
        #[command(subcommand)]
        cmd: AigCmd,
    },
}

#[derive(Debug, Subcommand)]
enum AigCmd {
    /// Write the structurally hashed AIG in AIGER format.
    Export {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Binary `aig` instead of ASCII `aag` (requires --out).
        #[arg(long)]
        binary: bool,
    },
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Exhaustive checking up to this many primary inputs.
    #[arg(long, default_value_t = crate::search::EXHAUSTIVE_BOUND)]
    exhaustive_bound: usize,
    /// Random vectors above the exhaustive bound.
    #[arg(long, default_value_t = 100_000)]
    vectors: u64,
    #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Run the search engine when sampling finds no mismatch.
    #[arg(long)]
    search: bool,
}

impl CheckArgs {
    fn config(&self) -> EquivConfig {
        EquivConfig {
            exhaustive_bound: self.exhaustive_bound,
            vectors: self.vectors,
            seed: self.seed,
            search: self.search,
            ..EquivConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct RestructureArgs {
    input: PathBuf,
    /// Built-in recipe id (1..=18).
    #[arg(long, conflicts_with = "recipe_file", required_unless_present = "recipe_file")]
    recipe: Option<u32>,
    /// JSON list of {pass, params, seed} steps.
    #[arg(long)]
    recipe_file: Option<PathBuf>,
    #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = crate::search::EXHAUSTIVE_BOUND)]
    exhaustive_bound: usize,
    #[arg(long, default_value_t = 100_000)]
    vectors: u64,
}

#[derive(Debug, Args)]
struct InsertArgs {
    input: PathBuf,
    /// Trigger width.
    #[arg(long, default_value_t = 4)]
    q: usize,
    /// Rare trigger nets (default: q).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value = "signal-prob-low")]
    metric: Metric,
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Random vectors for probability estimates.
    #[arg(long, default_value_t = 100_000)]
    vectors: u64,
    /// Comma-separated trigger nets instead of a random draw.
    #[arg(long, value_delimiter = ',')]
    trigger: Option<Vec<String>>,
    #[arg(long)]
    victim: Option<String>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Where to write the Trojan record (part of the sealed key).
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct JudgeArgs {
    #[arg(long)]
    key: PathBuf,
    /// CSV with header `circuit_id,label`.
    #[arg(long)]
    submission: PathBuf,
    /// Weight of a missed Trojan relative to a false alarm.
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value = "anonymous")]
    submitter: String,
    /// Today's date (default: the system date, UTC).
    #[arg(long)]
    date: Option<NaiveDate>,
    /// Hold the report until the next monthly release day.
    #[arg(long)]
    window: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long)]
    scoap: bool,
    /// Signal probabilities from this many random vectors.
    #[arg(long, value_name = "N", conflicts_with = "exact")]
    sigprob: Option<u64>,
    /// Exact signal probabilities by enumeration.
    #[arg(long)]
    exact: bool,
    #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Also list rare nets under this metric.
    #[arg(long)]
    rare: Option<Metric>,
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PcaArgs {
    /// Feature CSV as written by `forge features`.
    input: PathBuf,
    #[arg(long, default_value_t = 4)]
    components: usize,
    #[arg(long)]
    coords: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the fitted model as JSON.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    /// JSON {"circuits": [[r, g], ...], "max_width": M}.
    #[arg(long, required_unless_present = "netlists")]
    profile: Option<PathBuf>,
    /// Build the profile from these netlists instead.
    #[arg(long, num_args = 1.., conflicts_with = "profile")]
    netlists: Vec<PathBuf>,
    #[arg(long, default_value = "signal-prob-low")]
    metric: Metric,
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    /// Largest trigger width when building from netlists.
    #[arg(long, default_value_t = 4)]
    max_width: u64,
    #[arg(long, default_value_t = 100_000)]
    vectors: u64,
    #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Uniform,
    Sequential,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Uniform => Strategy::Uniform,
            StrategyArg::Sequential => Strategy::Sequential,
        }
    }
}

#[derive(Debug, Args)]
struct GameArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Query budget (default: the node count).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value = "uniform")]
    hider: StrategyArg,
    #[arg(long, value_enum, default_value = "uniform")]
    seeker: StrategyArg,
    #[arg(long, env = "FORGE_SEED", default_value_t = 0)]
    seed: u64,
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let _ = env_logger::Builder::new().filter_level(cli.log_level).try_init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("forge: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Parse { file, json } => cmd_parse(&file, json),
        Cmd::Restructure(a) => cmd_restructure(a),
        Cmd::Insert(a) => cmd_insert(a),
        Cmd::CheckTrojan { golden, infected, record, check } => cmd_check_trojan(&golden, &infected, &record, &check),
        Cmd::Bench { config, out, key, seed } => cmd_bench(&config, &out, key, seed),
        Cmd::Judge(a) => cmd_judge(a),
        Cmd::ExportKey { key, out, date } => cmd_export_key(&key, &out, date),
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Equiv { a, b, check } => cmd_equiv(&a, &b, &check),
        Cmd::Features { set, csv, key } => cmd_features(&set, &csv, key.as_deref()),
        Cmd::Pca(a) => cmd_pca(a),
        Cmd::Space(a) => cmd_space(a),
        Cmd::Game(a) => cmd_game(a),
        Cmd::Aig { cmd: AigCmd::Export { file, out, binary } } => cmd_aig_export(&file, out.as_deref(), binary),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_netlist(path: &Path) -> Result<(Netlist, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let n = parse_netlist(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((n, bytes))
}

/// Hash over the input bytes and a description of the command's settings.
fn config_hash(inputs: &[&[u8]], settings: &impl fmt::Debug) -> String {
    let mut buf = Vec::new();
    for i in inputs {
        buf.extend_from_slice(&(i.len() as u64).to_le_bytes());
        buf.extend_from_slice(i);
    }
    buf.extend_from_slice(format!("{settings:?}").as_bytes());
    sha256_hex(&buf)
}

/// `body` as a JSON object with a provenance block added.
fn with_provenance(body: &impl Serialize, prov: Provenance) -> Value {
    let prov = serde_json::to_value(prov).expect("serializable");
    match serde_json::to_value(body).expect("serializable") {
        Value::Object(mut m) => {
            m.insert("provenance".into(), prov);
            Value::Object(m)
        }
        other => json!({ "result": other, "provenance": prov }),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(v: &Value, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, pretty(v)),
        None => {
            print!("{}", pretty(v));
            Ok(())
        }
    }
}

fn today_utc() -> NaiveDate {
    let days = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs() / 86_400)
        .unwrap_or(0);
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("epoch") + Days::new(days)
}

fn cmd_parse(file: &Path, json: bool) -> CliResult {
    let (n, _) = load_netlist(file)?;
    if json {
        print!("{}", pretty(&serde_json::to_value(n.dump()).expect("serializable")));
        return Ok(0);
    }
    println!(
        "{}: {} inputs, {} outputs, {} gates, {} nets",
        n.name(),
        n.inputs().len(),
        n.outputs().len(),
        n.gate_count(),
        n.net_count()
    );
    for d in n.validate() {
        if d.severity() == Severity::Warning {
            println!("warning: {d}");
        }
    }
    Ok(0)
}

fn cmd_restructure(a: RestructureArgs) -> CliResult {
    let (n, bytes) = load_netlist(&a.input)?;
    let (recipe, recipe_bytes) = match (&a.recipe, &a.recipe_file) {
        (Some(id), _) => (builtin_recipe(*id).map_err(usage)?, id.to_le_bytes().to_vec()),
        (None, Some(f)) => {
            let b = read(f)?;
            let text = String::from_utf8_lossy(&b).into_owned();
            (Recipe::from_json(&text).map_err(usage)?, b)
        }
        (None, None) => return Err(usage("one of --recipe or --recipe-file is required")),
    };
    let cfg = EquivConfig {
        exhaustive_bound: a.exhaustive_bound,
        vectors: a.vectors,
        seed: a.seed,
        ..EquivConfig::default()
    };
    let r = apply_recipe(&n, &recipe, a.seed, &cfg).map_err(|e| CliError::Negative(e.to_string()))?;
    let text = write_netlist(&r.netlist);
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &a.report {
        let hash = config_hash(&[&bytes, &recipe_bytes], &(a.exhaustive_bound, a.vectors));
        let body = json!({ "recipe": recipe.id, "steps": recipe.steps, "passes": r.reports });
        write(p, pretty(&with_provenance(&body, Provenance::new(hash, a.seed))))?;
    }
    Ok(0)
}

fn cmd_insert(a: InsertArgs) -> CliResult {
    let (n, bytes) = load_netlist(&a.input)?;
    let spec = TrojanSpec {
        p: a.p.unwrap_or(a.q),
        metric: a.metric,
        threshold: a.threshold,
        vectors: a.vectors,
        trigger: a.trigger.clone(),
        victim: a.victim.clone(),
        ..TrojanSpec::new(a.q, a.seed)
    };
    let (infected, rec) = insert_trojan(&n, &spec).map_err(|e| match e {
        TrojanError::Spec(_) | TrojanError::UnknownNet(_) | TrojanError::Netlist(_) => usage(e),
        e => CliError::Negative(e.to_string()),
    })?;
    let text = write_netlist(&infected);
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    let hash = config_hash(&[&bytes], &spec);
    let body = with_provenance(&json!({ "spec": spec, "record": rec }), Provenance::new(hash, a.seed));
    match &a.record {
        Some(p) => write(p, pretty(&body))?,
        None if a.out.is_some() => print!("{}", pretty(&body)),
        None => {}
    }
    if !rec.is_proven() {
        log::warn!("no trigger witness found within the search budget");
    }
    Ok(0)
}

fn load_record(path: &Path) -> Result<TrojanRecord, CliError> {
    let v: Value = serde_json::from_slice(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    // accept both a bare record and the `forge insert` output
    let inner = v.get("record").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_check_trojan(golden: &Path, infected: &Path, record: &Path, check: &CheckArgs) -> CliResult {
    let (g, gb) = load_netlist(golden)?;
    let (i, ib) = load_netlist(infected)?;
    let rec = load_record(record)?;
    let v = check_trojan_semantics(&g, &i, &rec, &check.config()).map_err(usage)?;
    let hash = config_hash(&[&gb, &ib], &check.config());
    let mut body = with_provenance(&v, Provenance::new(hash, check.seed));
    body["passed"] = json!(v.passed());
    if let Some(f) = &v.failure {
        body["message"] = json!(f.to_string());
    }
    emit(&body, None)?;
    Ok(if v.passed() { 0 } else { 1 })
}

fn cmd_bench(config: &Path, out: &Path, key: Option<PathBuf>, seed: Option<u64>) -> CliResult {
    let cfg = load_forge_config(config, seed).map_err(bench_err)?;
    let (set, k) = forge_benchmark(&cfg).map_err(bench_err)?;
    let key_path = key.unwrap_or_else(|| default_key_path(out));
    write_set(out, &set, &k, &key_path).map_err(bench_err)?;
    let body = json!({
        "set_name": set.manifest.set_name,
        "entries": set.manifest.entry_count,
        "set_dir": out.display().to_string(),
        "key": key_path.display().to_string(),
        "manifest_checksum": set.manifest.checksum(),
        "key_checksum": k.checksum(),
        "expiry": set.manifest.expiry,
        "provenance": set.manifest.provenance,
    });
    emit(&body, None)?;
    Ok(0)
}

fn cmd_judge(a: JudgeArgs) -> CliResult {
    let key = read_key(&a.key).map_err(bench_err)?;
    let sub = read_submission_csv(&a.submission, &key.set_name, &a.submitter).map_err(bench_err)?;
    let today = a.date.unwrap_or_else(today_utc);
    let judged = if a.window {
        judge_window(&WindowPolicy::of(&key), &sub, &key, a.alpha, today).map_err(bench_err)?
    } else {
        if today > key.expiry {
            return Err(bench_err(BenchError::Retired(key.expiry)));
        }
        Judged::Released { report: score_submission(&sub, &key, a.alpha).map_err(bench_err)? }
    };
    let sub_bytes = read(&a.submission)?;
    let hash = config_hash(&[&key.to_bytes(), &sub_bytes], &(a.alpha, today, a.window));
    emit(&with_provenance(&judged, Provenance::new(hash, key.provenance.seed)), a.report.as_deref())?;
    Ok(0)
}

fn cmd_export_key(key: &Path, out: &Path, date: Option<NaiveDate>) -> CliResult {
    let k = read_key(key).map_err(bench_err)?;
    let public = export_key(&k, date.unwrap_or_else(today_utc)).map_err(bench_err)?;
    write(out, public.to_bytes())?;
    Ok(0)
}

fn cmd_analyze(a: AnalyzeArgs) -> CliResult {
    if !a.scoap && a.sigprob.is_none() && !a.exact {
        return Err(usage("nothing to compute: pass --scoap, --sigprob N or --exact"));
    }
    let (n, bytes) = load_netlist(&a.input)?;
    let sc = if a.scoap || a.rare == Some(Metric::ScoapHard) {
        Some(scoap(&n).map_err(usage)?)
    } else {
        None
    };
    let st = match (a.sigprob, a.exact) {
        (_, true) => Some(exact_signal_prob(&n).map_err(usage)?),
        (Some(v), _) => Some(signal_prob(&n, v, a.seed).map_err(usage)?),
        _ => None,
    };
    let mut body = json!({ "netlist": n.name(), "nets": report(&n, if a.scoap { sc.as_ref() } else { None }, st.as_ref()) });
    if let Some(s) = &sc {
        body["scoap_saturated"] = json!(s.saturated);
    }
    if let Some(s) = &st {
        body["samples"] = json!(s.samples);
        body["exact"] = json!(s.exact);
    }
    if let Some(metric) = a.rare {
        let source = match (metric, &sc, &st) {
            (Metric::ScoapHard, Some(s), _) => RareSource::Scoap(s),
            (_, _, Some(s)) => RareSource::Stats(s),
            _ => return Err(usage(format!("--rare {metric} needs --sigprob or --exact"))),
        };
        let part = rare_nets(&n, source, metric, a.threshold).map_err(usage)?;
        let rare: Vec<Value> = part
            .rare
            .iter()
            .map(|r| json!({ "net": n.net_name(r.net), "score": r.score, "rare_value": r.rare_value as u8 }))
            .collect();
        body["rare"] = json!({ "metric": metric, "threshold": a.threshold, "nets": rare });
    }
    let hash = config_hash(&[&bytes], &(a.scoap, a.sigprob, a.exact, a.rare, a.threshold));
    emit(&with_provenance(&body, Provenance::new(hash, a.seed)), a.json.as_deref())?;
    Ok(0)
}

fn cmd_equiv(a: &Path, b: &Path, check: &CheckArgs) -> CliResult {
    let (x, xb) = load_netlist(a)?;
    let (y, yb) = load_netlist(b)?;
    let v = check_equivalence(&x, &y, &check.config()).map_err(usage)?;
    let hash = config_hash(&[&xb, &yb], &check.config());
    emit(&with_provenance(&v, Provenance::new(hash, check.seed)), None)?;
    Ok(v.exit_code())
}

fn cmd_features(set: &Path, csv_path: &Path, key: Option<&Path>) -> CliResult {
    let manifest = read_manifest(set).map_err(bench_err)?;
    let labels = match key {
        Some(k) => {
            let key = read_key(k).map_err(bench_err)?;
            key.check_binding(&manifest).map_err(bench_err)?;
            Some(key.entries.iter().map(|e| (e.id.clone(), e.k > 0)).collect::<std::collections::HashMap<_, _>>())
        }
        None => None,
    };
    let mut w = csv::Writer::from_path(csv_path).map_err(|e| usage(format!("{}: {e}", csv_path.display())))?;
    let mut header = vec!["id".to_string()];
    if labels.is_some() {
        header.push("label".into());
    }
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(usage)?;
    for e in &manifest.entries {
        let (n, _) = load_netlist(&set.join(&e.file))?;
        let f = extract_features(&n).map_err(usage)?;
        let mut row = vec![e.id.clone()];
        if let Some(l) = &labels {
            row.push(if l[&e.id] { "infected" } else { "clean" }.into());
        }
        row.extend(f.0.iter().map(|x| x.to_string()));
        w.write_record(&row).map_err(usage)?;
    }
    w.flush().map_err(usage)?;
    let hash = config_hash(&[&manifest.to_bytes()], &(FEATURE_VERSION, labels.is_some()));
    let body = json!({
        "rows": manifest.entries.len(),
        "features": FEATURE_NAMES.len(),
        "feature_version": FEATURE_VERSION,
        "csv": csv_path.display().to_string(),
    });
    emit(&with_provenance(&body, Provenance::new(hash, 0)), None)?;
    Ok(0)
}

struct FeatureTable {
    ids: Vec<String>,
    labels: Vec<Option<bool>>,
    rows: Vec<Vec<f64>>,
}

fn read_feature_csv(path: &Path) -> Result<FeatureTable, CliError> {
    let err = |e: csv::Error| usage(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let header = r.headers().map_err(err)?.clone();
    if header.get(0) != Some("id") {
        return Err(usage(format!("{}: first column must be `id`", path.display())));
    }
    let labeled = header.get(1) == Some("label");
    let first = if labeled { 2 } else { 1 };
    let mut t = FeatureTable { ids: Vec::new(), labels: Vec::new(), rows: Vec::new() };
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(err)?;
        t.ids.push(rec[0].to_string());
        t.labels.push(match labeled {
            true => match &rec[1] {
                "infected" => Some(true),
                "clean" => Some(false),
                _ => None,
            },
            false => None,
        });
        let row = rec
            .iter()
            .skip(first)
            .map(|x| x.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        t.rows.push(row);
    }
    Ok(t)
}

fn cmd_pca(a: PcaArgs) -> CliResult {
    let t = read_feature_csv(&a.input)?;
    let model = pca_fit(&t.rows, a.components).map_err(usage)?;
    let coords = pca_project(&model, &t.rows).map_err(usage)?;
    if let Some(p) = &a.coords {
        let mut w = csv::Writer::from_path(p).map_err(usage)?;
        let mut header = vec!["id".to_string(), "label".to_string()];
        header.extend((1..=a.components).map(|i| format!("pc{i}")));
        w.write_record(&header).map_err(usage)?;
        for ((id, l), c) in t.ids.iter().zip(&t.labels).zip(&coords) {
            let label = match l {
                Some(true) => "infected",
                Some(false) => "clean",
                None => "",
            };
            let mut row = vec![id.clone(), label.to_string()];
            row.extend(c.iter().map(|x| x.to_string()));
            w.write_record(&row).map_err(usage)?;
        }
        w.flush().map_err(usage)?;
    }
    if let Some(p) = &a.svg {
        let pts: Vec<ScatterPoint> = coords
            .iter()
            .zip(&t.labels)
            .map(|(c, &label)| ScatterPoint { coords: c.clone(), label })
            .collect();
        write(p, scatter_svg(&pts))?;
    }
    let hash = config_hash(&[&read(&a.input)?], &a.components);
    let prov = Provenance::new(hash, 0);
    if let Some(p) = &a.model {
        write(p, pretty(&with_provenance(&model, prov.clone())))?;
    }
    let ratio: Vec<f64> = model
        .explained_variance
        .iter()
        .map(|v| if model.total_variance > 0.0 { v / model.total_variance } else { 0.0 })
        .collect();
    let body = json!({
        "rows": t.rows.len(),
        "components": a.components,
        "explained_variance": model.explained_variance,
        "explained_ratio": ratio,
        "total_variance": model.total_variance,
        "degenerate": model.degenerate,
        "sweeps": model.sweeps,
    });
    emit(&with_provenance(&body, prov), None)?;
    Ok(0)
}

fn profile_from_netlists(a: &SpaceArgs) -> Result<(StrategyProfile, Vec<Vec<u8>>), CliError> {
    let mut circuits = Vec::new();
    let mut inputs = Vec::new();
    for (i, p) in a.netlists.iter().enumerate() {
        let (n, b) = load_netlist(p)?;
        inputs.push(b);
        let part = if a.metric == Metric::ScoapHard {
            let s = scoap(&n).map_err(usage)?;
            rare_nets(&n, RareSource::Scoap(&s), a.metric, a.threshold)
        } else {
            let s = if n.inputs().len() <= EXACT_PROB_BOUND.min(16) {
                exact_signal_prob(&n)
            } else {
                signal_prob(&n, a.vectors, crate::seed::derive(a.seed, "space", i as u64))
            }
            .map_err(usage)?;
            rare_nets(&n, RareSource::Stats(&s), a.metric, a.threshold)
        }
        .map_err(usage)?;
        circuits.push((part.rare.len() as u64, part.regular.len() as u64));
    }
    Ok((StrategyProfile { circuits, max_width: a.max_width }, inputs))
}

fn log10_digits(d: &str) -> f64 {
    let head = &d[..d.len().min(15)];
    head.parse::<f64>().unwrap_or(0.0).log10() + (d.len() - head.len()) as f64
}

fn cmd_space(a: SpaceArgs) -> CliResult {
    let (profile, inputs) = match &a.profile {
        Some(p) => {
            let b = read(p)?;
            let prof: StrategyProfile =
                serde_json::from_slice(&b).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            (prof, vec![b])
        }
        None => profile_from_netlists(&a)?,
    };
    let count = ht_space_size(&profile).map_err(usage)?;
    let digits = count.to_string();
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    let hash = config_hash(&refs, &(a.metric, a.threshold, a.max_width, a.vectors));
    let body = json!({
        "profile": profile,
        "count": digits,
        "digits": digits.len(),
        "log10": log10_digits(&digits),
    });
    emit(&with_provenance(&body, Provenance::new(hash, a.seed)), None)?;
    Ok(0)
}

fn cmd_game(a: GameArgs) -> CliResult {
    let budget = a.budget.unwrap_or(a.nodes.max(1) as u64);
    let stats = seek_simulate(a.nodes, a.k, a.hider.into(), a.seeker.into(), a.trials, a.seed, budget).map_err(usage)?;
    let mut body = with_provenance(&stats, Provenance::new(config_hash(&[], &a), a.seed));
    let uniform = matches!((a.hider, a.seeker), (StrategyArg::Uniform, StrategyArg::Uniform));
    if uniform && a.k >= 1 && budget >= a.nodes as u64 {
        body["expected"] = json!(expected_game_length(a.nodes, a.k));
    }
    emit(&body, None)?;
    Ok(0)
}

fn cmd_aig_export(file: &Path, out: Option<&Path>, binary: bool) -> CliResult {
    let (n, _) = load_netlist(file)?;
    let g = to_aig(&n).map_err(usage)?.strash();
    match (out, binary) {
        (Some(p), true) => write(p, write_aiger_binary(&g))?,
        (Some(p), false) => write(p, write_aiger_ascii(&g))?,
        (None, true) => return Err(usage("--binary needs --out")),
        (None, false) => print!("{}", String::from_utf8_lossy(&write_aiger_ascii(&g))),
    }
    Ok(0)
}

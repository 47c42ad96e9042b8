use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{
    sha256_hex, AnswerKey, BenchError, BenchmarkSet, ForgeConfig, Infection, KeyEntry, Manifest,
    ManifestEntry, Provenance, VariantSeeds, FORMAT_VERSION,
};
use crate::equiv::check_trojan_semantics;
use crate::netlist::{write_netlist, Netlist};
use crate::restructure::apply_recipe;
use crate::seed;
use crate::trojan::{insert_trojan, TrojanRecord, TrojanSpec};

/// Insertion attempts per infected variant, each with a fresh seed.
const INSERT_TRIES: u64 = 8;

struct Variant {
    golden_index: usize,
    variant: usize,
    recipe: u32,
    trojan: Option<TrojanRecord>,
    seeds: VariantSeeds,
    netlist: Netlist,
}

fn infection_plan(cfg: &ForgeConfig) -> Vec<bool> {
    let nb = cfg.variants_per_golden;
    let mut plan = vec![false; cfg.goldens.len() * nb];
    match &cfg.infection {
        Infection::Rate(r) => {
            for (idx, slot) in plan.iter_mut().enumerate() {
                *slot = seed::rng(cfg.seed, "infect", idx as u64).gen_bool(*r);
            }
        }
        Infection::Counts(counts) => {
            for (i, &c) in counts.iter().enumerate() {
                let mut slots: Vec<usize> = (0..nb).collect();
                slots.shuffle(&mut seed::rng(cfg.seed, "infect-slots", i as u64));
                for &j in &slots[..c] {
                    plan[i * nb + j] = true;
                }
            }
        }
    }
    plan
}

fn insert(
    cfg: &ForgeConfig,
    golden: &Netlist,
    vseed: u64,
    what: impl Fn(String) -> BenchError,
) -> Result<(Netlist, TrojanRecord, u64), BenchError> {
    let mut last = String::new();
    for t in 0..INSERT_TRIES {
        let tseed = seed::derive(vseed, "trojan", t);
        let d = &cfg.trojans;
        let q = d.q[seed::rng(tseed, "width", 0).gen_range(0..d.q.len())];
        let spec = TrojanSpec {
            p: d.p.unwrap_or(q).min(q),
            metric: d.metric,
            threshold: d.threshold,
            ..TrojanSpec::new(q, tseed)
        };
        match insert_trojan(golden, &spec) {
            Ok((n, rec)) if rec.is_proven() => return Ok((n, rec, tseed)),
            Ok(_) => last = "witness search ran out of budget".into(),
            Err(e) => last = e.to_string(),
        }
        log::info!(
            "{}: insertion attempt {t} failed ({last}); retrying with the next seed",
            golden.name()
        );
    }
    Err(what(last))
}

fn make_variant(cfg: &ForgeConfig, idx: usize, infected: bool) -> Result<Variant, BenchError> {
    let nb = cfg.variants_per_golden;
    let (gi, vj) = (idx / nb, idx % nb);
    let golden = &cfg.goldens[gi];
    let gen_err = |detail: String| BenchError::Generation {
        golden: golden.name().into(),
        variant: vj,
        detail,
    };
    let vseed = seed::derive(cfg.seed, "variant", idx as u64);
    // the recipe draw uses its own stream, so it carries no information about infection
    let recipe = &cfg.recipes[seed::rng(vseed, "recipe", 0).gen_range(0..cfg.recipes.len())];
    let rseed = seed::derive(vseed, "restructure", 0);

    let (pre, trojan, tseed) = if infected {
        let ins_err = |detail| BenchError::Insertion {
            golden: golden.name().into(),
            variant: vj,
            detail,
        };
        let (n, rec, t) = insert(cfg, golden, vseed, ins_err)?;
        (n, Some(rec), Some(t))
    } else {
        (golden.clone(), None, None)
    };
    let out = apply_recipe(&pre, recipe, rseed, &cfg.equiv).map_err(|e| gen_err(e.to_string()))?;
    if let Some(rec) = &trojan {
        let v = check_trojan_semantics(golden, &out.netlist, rec, &cfg.equiv)
            .map_err(|e| gen_err(e.to_string()))?;
        if let Some(f) = v.failure {
            return Err(gen_err(format!("trojan semantics: {f}")));
        }
    }
    Ok(Variant {
        golden_index: gi,
        variant: vj,
        recipe: recipe.id,
        trojan,
        seeds: VariantSeeds {
            variant: vseed,
            recipe: rseed,
            trojan: tseed,
        },
        netlist: out.netlist,
    })
}

/// Forges a benchmark set and its answer key. The result is a pure function
/// of `cfg`; variants are generated in parallel.
pub fn forge_benchmark(cfg: &ForgeConfig) -> Result<(BenchmarkSet, AnswerKey), BenchError> {
    cfg.validate()?;
    let plan = infection_plan(cfg);
    let variants: Vec<Variant> = plan
        .par_iter()
        .enumerate()
        .map(|(idx, &inf)| make_variant(cfg, idx, inf))
        .collect::<Result<_, _>>()?;

    let total = variants.len();
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(&mut seed::rng(cfg.seed, "ids", 0));
    let width = total.saturating_sub(1).to_string().len().max(3);

    let mut rows: Vec<(String, String, KeyEntry)> = variants
        .into_iter()
        .zip(&perm)
        .map(|(v, &p)| {
            let id = format!("c{p:0width$}");
            let scrubbed = v
                .netlist
                .reindexed(&id)
                .expect("restructured netlists are acyclic");
            let text = write_netlist(&scrubbed);
            let entry = KeyEntry {
                id: id.clone(),
                golden: cfg.goldens[v.golden_index].name().to_string(),
                golden_index: v.golden_index,
                variant: v.variant,
                recipe: v.recipe,
                k: v.trojan.is_some() as u8,
                trojan: v.trojan,
                seeds: v.seeds,
            };
            (id, text, entry)
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));

    let provenance = Provenance::new(cfg.config_hash.clone(), cfg.seed);
    let manifest = Manifest {
        set_name: cfg.set_name.clone(),
        format_version: FORMAT_VERSION,
        entry_count: total,
        release: cfg.release,
        expiry: cfg.expiry(),
        entries: rows
            .iter()
            .map(|(id, text, _)| ManifestEntry {
                id: id.clone(),
                file: format!("circuits/{id}.v"),
                sha256: sha256_hex(text.as_bytes()),
            })
            .collect(),
        provenance: provenance.clone(),
    };
    let key = AnswerKey {
        set_name: cfg.set_name.clone(),
        format_version: FORMAT_VERSION,
        manifest_checksum: manifest.checksum(),
        release: cfg.release,
        expiry: cfg.expiry(),
        expired: false,
        entries: rows.iter().map(|r| r.2.clone()).collect(),
        provenance,
    };
    let set = BenchmarkSet {
        manifest,
        circuits: rows.into_iter().map(|(id, text, _)| (id, text)).collect(),
    };
    Ok((set, key))
}

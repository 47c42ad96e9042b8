//! Forges a small benchmark set from a JSON configuration, writes it with
//! its sealed key, then scores three detectors against the key.
//!
//!     cargo run --example forge_and_judge

use std::path::Path;

use chrono::NaiveDate;
use trojan_forge::bench::{
    export_key, forge_benchmark, judge_window, load_forge_config, read_manifest, score_submission,
    write_set, Judged, Label, Submission, WindowPolicy,
};

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/bench_small.json");
    let cfg = load_forge_config(&config, None).expect("valid config");
    let (set, key) = forge_benchmark(&cfg).expect("forging succeeds");

    let dir = tempfile::tempdir().unwrap();
    let set_dir = dir.path().join("set");
    let key_path = dir.path().join("set.key.json");
    write_set(&set_dir, &set, &key, &key_path).unwrap();
    let manifest = read_manifest(&set_dir).unwrap();
    println!(
        "forged {} entries into {}; manifest {}",
        manifest.entry_count,
        set_dir.display(),
        &manifest.checksum()[..16]
    );
    println!("key binds to {}, {} infected, expires {}", &key.manifest_checksum[..16], key.infected_count(), key.expiry);

    // three detectors: an oracle, a paranoid one and a coin flipper
    let truth = |k: u8| if k > 0 { Label::Infected } else { Label::Clean };
    let detectors: [(&str, Box<dyn Fn(usize, u8) -> Label>); 3] = [
        ("oracle", Box::new(move |_, k| truth(k))),
        ("paranoid", Box::new(|_, _| Label::Infected)),
        ("alternating", Box::new(|i, _| if i % 2 == 0 { Label::Infected } else { Label::Clean })),
    ];
    for (name, f) in &detectors {
        let rows = key.entries.iter().enumerate().map(|(i, e)| (e.id.clone(), f(i, e.k)));
        let sub = Submission::from_rows(&key.set_name, *name, rows).unwrap();
        let r = score_submission(&sub, &key, 10.0).unwrap();
        println!(
            "{name:<12} TP {} TN {} FP {} FN {}  FP-rate {:.3} FN-rate {:.3}  Conf.Val {:.3}",
            r.tp, r.tn, r.fp, r.fn_, r.fp_rate, r.fn_rate, r.conf_val
        );
    }

    // scores are released on the first of each month
    let sub = Submission::from_rows(&key.set_name, "late", key.entries.iter().map(|e| (e.id.clone(), Label::Clean))).unwrap();
    let day = NaiveDate::from_ymd_opt(2026, 10, 16).unwrap();
    match judge_window(&WindowPolicy::of(&key), &sub, &key, 10.0, day).unwrap() {
        Judged::Deferred { release, .. } => println!("submitted {day}: report released {release}"),
        Judged::Released { report } => println!("released now: {}", report.conf_val),
    }
    let after = key.expiry.succ_opt().unwrap();
    let public = export_key(&key, after).unwrap();
    println!("after {} the key is public (expired = {})", key.expiry, public.expired);
}

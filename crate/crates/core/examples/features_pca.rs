//! Feature vectors for every circuit of a forged set, a four-component PCA
//! and an SVG scatter of PC1/PC2 and PC3/PC4 with infected (+) and clean (−)
//! markers.
//!
//!     cargo run --example features_pca -- [scatter.svg]

use std::path::Path;

use trojan_forge::analytics::{extract_features, pca_fit, pca_project, scatter_svg, ScatterPoint, FEATURE_NAMES};
use trojan_forge::bench::{forge_benchmark, load_forge_config};
use trojan_forge::netlist::parse_netlist;

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/bench_small.json");
    let cfg = load_forge_config(&config, None).unwrap();
    let (set, key) = forge_benchmark(&cfg).unwrap();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for ((id, text), entry) in set.circuits.iter().zip(&key.entries) {
        assert_eq!(id, &entry.id);
        let n = parse_netlist(text).unwrap();
        rows.push(extract_features(&n).unwrap().0);
        labels.push(Some(entry.k > 0));
    }
    let model = pca_fit(&rows, 4).unwrap();
    let total = model.total_variance;
    for (i, v) in model.explained_variance.iter().enumerate() {
        let c = &model.components[i];
        let lead = (0..c.len()).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap();
        println!("PC{}: {:5.1}% of variance, led by {}", i + 1, 100.0 * v / total, FEATURE_NAMES[lead]);
    }
    let coords = pca_project(&model, &rows).unwrap();
    for ((id, c), l) in set.circuits.iter().map(|(id, _)| id).zip(&coords).zip(&labels) {
        let mark = if l == &Some(true) { '+' } else { '-' };
        println!("{id} {mark} {:9.3} {:9.3} {:9.3} {:9.3}", c[0], c[1], c[2], c[3]);
    }
    let points: Vec<ScatterPoint> = coords.into_iter().zip(labels).map(|(coords, label)| ScatterPoint { coords, label }).collect();
    let svg = scatter_svg(&points);
    match std::env::args().nth(1) {
        Some(p) => std::fs::write(&p, svg).unwrap(),
        None => println!("({} bytes of SVG; pass a path to save it)", svg.len()),
    }
}

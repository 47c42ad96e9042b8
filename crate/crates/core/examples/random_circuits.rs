//! Generates seeded random netlists and prints their statistics, or writes
//! them as Verilog into a directory.
//!
//!     cargo run --example random_circuits -- [out_dir]

use trojan_forge::analysis::exact_signal_prob;
use trojan_forge::generate::{random_netlist, RandomSpec};
use trojan_forge::netlist::write_netlist;

fn main() {
    let out = std::env::args().nth(1);
    let specs = [
        ("ctrl12", RandomSpec::control(12, 90), 11),
        ("ctrl14", RandomSpec::control(14, 120), 12),
        ("mixed10", RandomSpec::mixed(10, 60), 13),
    ];
    for (name, spec, seed) in specs {
        let mut n = random_netlist(&spec, seed);
        n.set_name(name);
        let depth = n.net_levels().expect("acyclic").into_iter().max().unwrap_or(0);
        let p = exact_signal_prob(&n).expect("few inputs");
        let rare = p.p.iter().filter(|&&x| x > 0.0 && x < 0.05).count();
        println!(
            "{name}: {} PIs, {} POs, {} gates, depth {depth}, {rare} nets with 0 < p < 0.05",
            n.inputs().len(),
            n.outputs().len(),
            n.gate_count()
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).expect("create output directory");
            let path = std::path::Path::new(dir).join(format!("{name}.v"));
            std::fs::write(&path, write_netlist(&n)).expect("write netlist");
        }
    }
}

//! Equivalence checking: a restructured circuit against its original, and a
//! single-gate mutation that the miter catches with a counterexample.
//!
//!     cargo run --example equivalence_check

use trojan_forge::equiv::{build_miter, check_equivalence, EquivConfig};
use trojan_forge::netlist::{parse_netlist, GateKind, NetlistBuilder};
use trojan_forge::restructure::{apply_recipe, builtin_recipe};

fn main() {
    let n = parse_netlist(include_str!("../data/ctrl14.v")).expect("data parses");
    let cfg = EquivConfig::default();

    let r = apply_recipe(&n, &builtin_recipe(18).unwrap(), 5, &cfg).unwrap();
    let v = check_equivalence(&n, &r.netlist, &cfg).unwrap();
    println!("original vs recipe 18: {}", serde_json::to_string(&v).unwrap());

    // swap the first AND gate for an OR
    let mut b = NetlistBuilder::from_netlist(n.clone());
    let g = b.gates_mut().iter_mut().find(|g| g.kind == GateKind::And).expect("an AND gate");
    println!("mutating gate {}", g.name);
    g.kind = GateKind::Or;
    let m = b.build().unwrap();

    let miter = build_miter(&n, &m).unwrap();
    println!("miter: {} gates, one output", miter.gate_count());
    let v = check_equivalence(&n, &m, &cfg).unwrap();
    let cex = v.counterexample().expect("the mutation is observable");
    let pis: Vec<bool> = n.input_names().iter().map(|i| cex.get(i).unwrap()).collect();
    println!("counterexample {}", serde_json::to_string(cex).unwrap());
    println!("  original outputs {:?}", n.eval_outputs(&pis).unwrap());
    println!("  mutated outputs  {:?}", m.eval_outputs(&pis).unwrap());

    // above the exhaustive bound the check samples, then optionally searches
    let sampled = EquivConfig { exhaustive_bound: 8, vectors: 4096, search: true, ..cfg };
    let v = check_equivalence(&n, &m, &sampled).unwrap();
    println!("sampled/search mode: {:?}, exit code {}", v.mode, v.exit_code());
}

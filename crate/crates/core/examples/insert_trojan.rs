//! Inserts a rare-triggered Trojan, proves it can fire and checks that it is
//! silent otherwise.
//!
//!     cargo run --example insert_trojan

use trojan_forge::equiv::{check_trojan_semantics, EquivConfig};
use trojan_forge::netlist::{parse_netlist, write_netlist};
use trojan_forge::trojan::{activation_estimate, insert_trojan, TrojanSpec};

fn main() {
    let golden = parse_netlist(include_str!("../data/ctrl14.v")).unwrap();
    let spec = TrojanSpec::new(3, 17);
    let (infected, rec) = insert_trojan(&golden, &spec).expect("enough rare nets");

    println!("trigger:");
    for t in &rec.trigger {
        println!("  {} must be {}", t.net, t.polarity as u8);
    }
    println!("victim {} via {} ({} gates added)", rec.victim, rec.payload_gate, rec.added_gates.len());

    let rate = activation_estimate(&infected, &rec, 100_000, 1).unwrap();
    println!("trigger fires on {:.3}% of random vectors", 100.0 * rate);

    let w = rec.witness.as_ref().expect("witness found");
    let pis: Vec<bool> = golden.input_names().iter().map(|i| w.get(i).unwrap()).collect();
    println!("witness {}", serde_json::to_string(w).unwrap());
    println!("  golden   {:?}", golden.eval_outputs(&pis).unwrap());
    println!("  infected {:?}", infected.eval_outputs(&pis).unwrap());

    let v = check_trojan_semantics(&golden, &infected, &rec, &EquivConfig::default()).unwrap();
    println!("semantics check: {:?}, passed = {}", v.mode, v.passed());

    let text = write_netlist(&infected);
    let lines: Vec<&str> = text.lines().filter(|l| l.contains("ht_")).collect();
    println!("Trojan gates in the netlist:\n{}", lines.join("\n"));
}

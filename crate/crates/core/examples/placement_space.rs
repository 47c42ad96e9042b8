//! How many distinct trigger choices an attacker has across a benchmark
//! suite, counted exactly with arbitrary-precision integers.
//!
//!     cargo run --example placement_space

use trojan_forge::analysis::{exact_signal_prob, rare_nets, Metric, RareSource};
use trojan_forge::analytics::{binomial, ht_space_size, StrategyProfile};
use trojan_forge::netlist::parse_netlist;

fn main() {
    let small = StrategyProfile { circuits: vec![(3, 2)], max_width: 3 };
    println!("r=3, g=2, M=3: {}", ht_space_size(&small).unwrap());

    let mut circuits = Vec::new();
    for text in [include_str!("../data/c17.v"), include_str!("../data/ctrl12.v"), include_str!("../data/ctrl14.v")] {
        let n = parse_netlist(text).unwrap();
        let p = exact_signal_prob(&n).unwrap();
        let part = rare_nets(&n, RareSource::Stats(&p), Metric::SignalProbLow, 0.05).unwrap();
        println!("{:>8}: {:3} rare, {:3} regular nets", n.name(), part.rare.len(), part.regular.len());
        circuits.push((part.rare.len() as u64, part.regular.len() as u64));
    }
    for m in [2, 4, 8, 16] {
        let count = ht_space_size(&StrategyProfile { circuits: circuits.clone(), max_width: m }).unwrap();
        println!("M = {m:2}: {count}");
    }
    // for a single circuit the inner sum collapses to C(r + g, q)
    let (r, g) = circuits[2];
    println!("C({}, 4) = {}", r + g, binomial(r + g, 4));
}

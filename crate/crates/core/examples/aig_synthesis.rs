//! Converts a netlist to an and-inverter graph, runs the individual
//! synthesis passes and exports AIGER.
//!
//!     cargo run --example aig_synthesis

use trojan_forge::aig::{from_aig, to_aig, write_aiger_ascii, FromAigOptions};
use trojan_forge::equiv::{check_equivalence, EquivConfig};
use trojan_forge::generate::{random_netlist, RandomSpec};
use trojan_forge::restructure::{balance, fraig, refactor, resub, rewrite};

fn main() {
    let n = random_netlist(&RandomSpec::mixed(10, 80), 42);
    let g = to_aig(&n).expect("valid netlist").strash();
    println!("{:<10} {:>6} {:>6}", "pass", "ands", "depth");
    println!("{:<10} {:>6} {:>6}", "strash", g.and_count(), g.depth());

    let passes: Vec<(&str, trojan_forge::aig::Aig)> = vec![
        ("balance", balance(&g, 1)),
        ("rewrite", rewrite(&g, 1)),
        ("refactor", refactor(&g, 10, 1).expect("valid bound")),
        ("resub", resub(&g, 50, 1)),
        ("fraig", fraig(&g, 8, 1, 10_000)),
    ];
    for (name, h) in &passes {
        println!("{name:<10} {:>6} {:>6}", h.and_count(), h.depth());
        let back = from_aig(h, FromAigOptions::default());
        let v = check_equivalence(&n, &back, &EquivConfig::default()).expect("same interface");
        assert!(v.is_equivalent(), "{name} changed the function");
    }

    // a small AIG in AIGER ASCII form
    let fa = trojan_forge::netlist::parse_netlist(include_str!("../data/full_adder.v")).unwrap();
    let aag = write_aiger_ascii(&to_aig(&fa).unwrap().strash());
    print!("{}", String::from_utf8(aag).unwrap());
}

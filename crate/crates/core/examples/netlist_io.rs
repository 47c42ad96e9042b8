//! Parses the ISCAS-85 c17 netlist, simulates it on a few vectors and with
//! bit-parallel words, and writes it back out.
//!
//!     cargo run --example netlist_io

use trojan_forge::netlist::{parse_netlist, write_netlist, Assignment, PackedSim};

const C17: &str = include_str!("../data/c17.v");

fn main() {
    let n = parse_netlist(C17).expect("c17 parses");
    println!(
        "{}: inputs {:?}, outputs {:?}, {} gates",
        n.name(),
        n.input_names(),
        n.output_names(),
        n.gate_count()
    );

    for v in [0b00000u32, 0b10101, 0b11111] {
        let pis: Vec<bool> = (0..5).map(|i| v >> i & 1 == 1).collect();
        let out = n.eval_outputs(&pis).expect("valid netlist");
        println!("  {pis:?} -> {out:?}");
    }

    // every net under one stimulus, by name
    let mut stim = Assignment::new();
    for name in n.input_names() {
        stim.set(name, true);
    }
    let all = n.simulate(&stim).expect("complete stimulus");
    println!("  N16 under all-ones: {}", all.get("N16").unwrap());

    // 64 vectors per word: word bit j of input i is input i in vector j
    let sim = PackedSim::new(&n).expect("valid netlist");
    let words: Vec<u64> = (1..=5u64).map(|i| 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i)).collect();
    let mut values = Vec::new();
    sim.eval_into(&words, &mut values).expect("one word per input");
    println!("  packed N22 word: {:016x}", values[n.find("N22").unwrap().index()]);

    let text = write_netlist(&n);
    let back = parse_netlist(&text).expect("round trip");
    assert_eq!(back, n);
    print!("{text}");
}

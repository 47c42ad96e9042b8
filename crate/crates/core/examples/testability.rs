//! SCOAP controllability/observability, signal probabilities and rare-net
//! selection on c17 and a larger control circuit.
//!
//!     cargo run --example testability

use trojan_forge::analysis::{exact_signal_prob, rare_nets, scoap, signal_prob, Metric, RareSource};
use trojan_forge::netlist::parse_netlist;

fn main() {
    let c17 = parse_netlist(include_str!("../data/c17.v")).unwrap();
    let sc = scoap(&c17).unwrap();
    let p = exact_signal_prob(&c17).unwrap();
    println!("{:<5} {:>4} {:>4} {:>4} {:>8}", "net", "CC0", "CC1", "CO", "p");
    for (i, net) in c17.nets().iter().enumerate() {
        println!("{:<5} {:>4} {:>4} {:>4} {:>8.4}", net.name, sc.cc0[i], sc.cc1[i], sc.co[i], p.p[i]);
    }

    let n = parse_netlist(include_str!("../data/ctrl14.v")).unwrap();
    let exact = exact_signal_prob(&n).unwrap();
    let sampled = signal_prob(&n, 100_000, 9).unwrap();
    let worst = exact.p.iter().zip(&sampled.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("\n{}: largest |exact - sampled| over {} nets: {worst:.4}", n.name(), n.net_count());

    for (metric, threshold) in [(Metric::SignalProbLow, 0.05), (Metric::SignalProbHigh, 0.05)] {
        let part = rare_nets(&n, RareSource::Stats(&exact), metric, threshold).unwrap();
        let top: Vec<String> = part
            .rare
            .iter()
            .take(5)
            .map(|r| format!("{}={:.4}", n.net_name(r.net), r.score))
            .collect();
        println!("{metric} at {threshold}: {} rare, e.g. {}", part.rare.len(), top.join(", "));
    }
    let sc = scoap(&n).unwrap();
    let part = rare_nets(&n, RareSource::Scoap(&sc), Metric::ScoapHard, 60.0).unwrap();
    println!("scoap-hard at 60: {} rare", part.rare.len());
}

use std::collections::HashMap;

use super::rewrite::guard;
use super::window::Rebuild;
use crate::aig::{Aig, Lit, Node};
use crate::equiv::random_words;
use crate::search::{satisfy, Outcome, SearchConfig};

/// Cones with at most this many inputs are compared exhaustively.
pub const FRAIG_EXHAUSTIVE_BOUND: usize = 20;
/// Representatives tried per node before giving up on merging it.
const MAX_TRIES: usize = 4;

/// Functionally reduces the graph: nodes proven equivalent (up to
/// complement) to an earlier node are merged into it.
///
/// Candidates come from random simulation; each merge is proven on the new
/// graph, exhaustively when the pair's support is small and by bounded
/// search otherwise. Pairs left undecided within `exact_budget` stay
/// separate. Counterexamples found along the way refine later candidates.
pub fn fraig(g: &Aig, sim_words: usize, seed: u64, exact_budget: u64) -> Aig {
    let words = sim_words.max(1);
    let stim = random_words(seed, 0, g.input_count(), words);
    let sigs = g.simulate(&stim).expect("stimulus matches inputs");
    let reach = g.reachable();

    // phase-normalized signature classes; node 0 anchors the constant class
    let phase: Vec<bool> = (0..g.len() as u32)
        .map(|n| sigs.node(n)[0] & 1 == 1)
        .collect();
    let key = |n: u32| -> Vec<u64> {
        let flip = if phase[n as usize] { !0 } else { 0 };
        sigs.node(n).iter().map(|w| w ^ flip).collect()
    };
    let mut classes: HashMap<Vec<u64>, Vec<u32>> = HashMap::new();

    // per-node bits under the counterexamples collected so far
    let mut cex_bits: Vec<Vec<u64>> = vec![Vec::new(); g.len()];
    let mut cex_count = 0usize;

    let cfg = SearchConfig {
        exhaustive_bound: FRAIG_EXHAUSTIVE_BOUND,
        budget: exact_budget,
        seed,
    };
    let mut rb = Rebuild::new(g);
    for n in 0..g.len() as u32 {
        if !reach[n as usize] && n != 0 {
            continue;
        }
        let own = match g.node(n) {
            Node::And(..) => rb.copy_and(g, n),
            _ => rb.map[n as usize],
        };
        rb.map[n as usize] = own;
        let k = key(n);
        let members = classes.entry(k).or_default();
        let mut merged = None;
        if g.is_and(n) {
            for &r in members.iter().take(MAX_TRIES) {
                let flip = phase[n as usize] != phase[r as usize];
                let cand = rb.map[r as usize] ^ flip;
                if cand == own {
                    merged = Some(cand);
                    break;
                }
                let distinguished = (0..cex_count).any(|i| {
                    let (w, b) = (i / 64, i % 64);
                    ((cex_bits[n as usize][w] >> b) & 1)
                        != (((cex_bits[r as usize][w] >> b) & 1) ^ flip as u64)
                });
                if distinguished {
                    continue;
                }
                match prove(&rb.h, own, cand, &cfg) {
                    Proof::Equal => {
                        merged = Some(cand);
                        break;
                    }
                    Proof::Differ(v) => {
                        record_cex(g, &v, &mut cex_bits, cex_count);
                        cex_count += 1;
                    }
                    Proof::Unknown => {}
                }
            }
        }
        match merged {
            Some(l) => rb.map[n as usize] = l,
            None => members.push(n),
        }
    }
    guard(g, rb.finish(g))
}

enum Proof {
    Equal,
    Differ(Vec<bool>),
    Unknown,
}

fn prove(h: &Aig, x: Lit, y: Lit, cfg: &SearchConfig) -> Proof {
    for targets in [[x, !y], [!x, y]] {
        match satisfy(h, &targets, cfg) {
            Outcome::Found(v) => return Proof::Differ(v),
            Outcome::NotFound(crate::search::NotFound::Budget) => return Proof::Unknown,
            Outcome::NotFound(crate::search::NotFound::Exhausted) => {}
        }
    }
    Proof::Equal
}

fn record_cex(g: &Aig, v: &[bool], bits: &mut [Vec<u64>], index: usize) {
    let words: Vec<u64> = v.iter().map(|&b| if b { !0 } else { 0 }).collect();
    let mut vals = Vec::new();
    g.eval_word_into(&words, &mut vals);
    let (w, b) = (index / 64, index % 64);
    for (n, row) in bits.iter_mut().enumerate() {
        if row.len() <= w {
            row.push(0);
        }
        row[w] |= (vals[n] & 1) << b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_two_ways() -> Aig {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x1 = g.xor(a, b);
        // (a | b) & !(a & b)
        let o = g.or(a, b);
        let n = g.and(a, b);
        let x2 = g.and(o, !n);
        g.add_output("x1", x1);
        g.add_output("x2", x2);
        g
    }

    #[test]
    fn merges_two_xor_builds() {
        let g = xor_two_ways();
        let r = fraig(&g, 4, 1, 1000);
        assert!(r.and_count() < g.and_count());
        assert_eq!(r.outputs()[0].1, r.outputs()[1].1);
    }

    #[test]
    fn merges_complement_equivalent_nodes() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let x = g.and(a, b);
        // !(a&c&b) & !(a&!c&b) is NAND(a, b) as a single AND node
        let ac = g.and(a, c);
        let t1 = g.and(ac, b);
        let anc = g.and(a, !c);
        let t2 = g.and(anc, b);
        let y = g.and(!t1, !t2);
        g.add_output("x", x);
        g.add_output("y", y);
        let r = fraig(&g, 4, 1, 1000);
        assert_eq!(r.outputs()[0].1, !r.outputs()[1].1);
    }

    #[test]
    fn distinct_functions_untouched() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let x = g.and(a, b);
        let y = g.and(x, c);
        let z = g.and(!a, c);
        g.add_output("y", y);
        g.add_output("z", z);
        assert_eq!(fraig(&g, 4, 3, 1000), g.strash());
    }
}

use std::collections::HashSet;

use super::rewrite::guard;
use super::window::{cone_nodes, dying_images, mffc, reconv_cut, Rebuild};
use crate::aig::{cone_truth, Aig, AndSink, DryRun, Lit};
use crate::equiv::random_words;
use crate::tt::TruthTable;

/// Window size used to compute exact local functions.
const WINDOW_LEAVES: usize = 8;
/// Random simulation words used to pre-filter candidates.
const SIG_WORDS: usize = 4;

fn fanouts(g: &Aig) -> Vec<Vec<u32>> {
    let mut f = vec![Vec::new(); g.len()];
    for n in 0..g.len() as u32 {
        if let Some((a, b)) = g.fanins(n) {
            f[a.node() as usize].push(n);
            if b.node() != a.node() {
                f[b.node() as usize].push(n);
            }
        }
    }
    f
}

/// Resubstitution: re-expresses a node as an existing divisor (0-resub) or
/// as one new AND of two divisors (1-resub) when that strictly shrinks the
/// graph. Candidates are filtered by simulation signatures and confirmed
/// against the exact function over a window cut.
pub fn resub(g: &Aig, max_divisors: usize, seed: u64) -> Aig {
    let stim = random_words(seed, 0, g.input_count(), SIG_WORDS);
    let sigs = g.simulate(&stim).expect("stimulus matches inputs");
    let sig = |l: Lit| -> [u64; SIG_WORDS] {
        let mut out = [0u64; SIG_WORDS];
        out.copy_from_slice(sigs.node(l.node()));
        if l.is_complemented() {
            out.iter_mut().for_each(|w| *w = !*w);
        }
        out
    };
    let fo = fanouts(g);
    let mut refs = g.ref_counts();
    let reach = g.reachable();
    let mut rb = Rebuild::new(g);

    for n in 0..g.len() as u32 {
        if !g.is_and(n) || !reach[n as usize] {
            continue;
        }
        let leaves = reconv_cut(g, n, WINDOW_LEAVES);
        let dead = mffc(g, n, &leaves, &mut refs);
        let dead_set: HashSet<u32> = dead.iter().copied().collect();

        let mut divs: Vec<u32> = leaves.clone();
        divs.extend(
            cone_nodes(g, n, &leaves)
                .into_iter()
                .filter(|m| !dead_set.contains(m)),
        );
        let mut in_divs: HashSet<u32> = divs.iter().copied().collect();
        let mut k = 0;
        while k < divs.len() && divs.len() < max_divisors {
            for &m in &fo[divs[k] as usize] {
                if m >= n || in_divs.contains(&m) || dead_set.contains(&m) || !reach[m as usize] {
                    continue;
                }
                let (a, b) = g.fanins(m).unwrap();
                if in_divs.contains(&a.node()) && in_divs.contains(&b.node()) {
                    in_divs.insert(m);
                    divs.push(m);
                    if divs.len() >= max_divisors {
                        break;
                    }
                }
            }
            k += 1;
        }
        divs.truncate(max_divisors.max(1));

        let target_sig = sig(Lit::new(n, false));
        let target_tt = cone_truth(g, Lit::new(n, false), &leaves).expect("window");
        let div_tt: Vec<Option<TruthTable>> = divs
            .iter()
            .map(|&d| cone_truth(g, Lit::new(d, false), &leaves))
            .collect();

        // 0-resub: an existing divisor already computes the node.
        let mut done = false;
        for (i, &d) in divs.iter().enumerate() {
            let Some(t) = &div_tt[i] else { continue };
            for c in [false, true] {
                let dl = Lit::new(d, c);
                if sig(dl) != target_sig {
                    continue;
                }
                let exact = if c { !t == target_tt } else { *t == target_tt };
                if exact {
                    rb.map[n as usize] = rb.lit(dl);
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
        if done {
            continue;
        }

        // 1-resub: one new AND (or OR) of two divisors; only worth it when
        // at least two nodes die.
        let mut best: Option<(i64, Lit, Lit, bool)> = None;
        if dead.len() >= 2 {
            let dying = dying_images(&rb, &dead, n);
            'pairs: for i in 0..divs.len() {
                let Some(ti) = &div_tt[i] else { continue };
                for j in i + 1..divs.len() {
                    let Some(tj) = &div_tt[j] else { continue };
                    for (ci, cj) in [(false, false), (false, true), (true, false), (true, true)] {
                        let (li, lj) = (Lit::new(divs[i], ci), Lit::new(divs[j], cj));
                        let (si, sj) = (sig(li), sig(lj));
                        for out_c in [false, true] {
                            let s: Vec<u64> = si
                                .iter()
                                .zip(&sj)
                                .map(|(a, b)| (a & b) ^ if out_c { !0 } else { 0 })
                                .collect();
                            if s[..] != target_sig[..] {
                                continue;
                            }
                            let xi = if ci { !ti } else { ti.clone() };
                            let xj = if cj { !tj } else { tj.clone() };
                            let f = &xi & &xj;
                            let f = if out_c { !f } else { f };
                            if f != target_tt {
                                continue;
                            }
                            let (hi, hj) = (rb.lit(li), rb.lit(lj));
                            let mut dry = DryRun::new(&rb.h, &dying);
                            dry.and(hi, hj);
                            let gain = dead.len() as i64 - dry.added as i64;
                            if gain > 0 && best.map_or(true, |b| gain > b.0) {
                                best = Some((gain, hi, hj, out_c));
                                if gain as usize == dead.len() {
                                    break 'pairs;
                                }
                            }
                        }
                    }
                }
            }
        }
        rb.map[n as usize] = match best {
            Some((_, a, b, c)) => rb.h.and(a, b) ^ c,
            None => rb.copy_and(g, n),
        };
    }
    guard(g, rb.finish(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reuses_existing_conjunction() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let d = g.and(a, b);
        let ac = g.and(a, c);
        let f = g.and(ac, b);
        g.add_output("d", d);
        g.add_output("f", f);
        assert_eq!(g.and_count(), 3);
        let r = resub(&g, 16, 0);
        assert_eq!(r.and_count(), 2);
        for m in 0..8u32 {
            let ins: Vec<bool> = (0..3).map(|i| m >> i & 1 == 1).collect();
            assert_eq!(r.eval_outputs(&ins), g.eval_outputs(&ins));
        }
    }

    #[test]
    fn no_divisors_leaves_graph_alone() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, b);
        g.add_output("x", x);
        assert_eq!(resub(&g, 16, 0), g.strash());
    }

    #[test]
    fn equal_divisor_becomes_alias() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        // (a & b) & c and a & (b & c): same function, different structure
        let ab = g.and(a, b);
        let x = g.and(ab, c);
        let bc = g.and(b, c);
        let y = g.and(a, bc);
        g.add_output("x", x);
        g.add_output("y", y);
        g.add_output("ab", ab);
        let r = resub(&g, 16, 0);
        assert!(r.and_count() < g.and_count());
        assert_eq!(r.outputs()[0].1, r.outputs()[1].1);
    }
}

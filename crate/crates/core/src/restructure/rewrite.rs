use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::window::{dying_images, mffc, reconv_cut, Rebuild};
use super::RestructureError;
use crate::aig::{build_expr, cone_truth, enumerate_cuts, Aig, DryRun, Lit, CUT_SIZE};
use crate::sop::{factor_function, Expr};
use crate::tt::TruthTable;

/// Largest cone refactoring will collapse into a truth table.
pub const MAX_REFACTOR_INPUTS: usize = 16;

struct Candidate {
    gain: i64,
    expr: Expr,
    complemented: bool,
    leaves: Vec<Lit>,
}

/// Cost of building `expr` into the new graph, given the old nodes that
/// die when the root is replaced.
fn evaluate(rb: &Rebuild, mffc: &[u32], root: u32, expr: &Expr, leaves: &[Lit]) -> i64 {
    let dying = dying_images(rb, mffc, root);
    let mut dry = DryRun::new(&rb.h, &dying);
    build_expr(&mut dry, expr, leaves);
    mffc.len() as i64 - dry.added as i64
}

/// Accepts positive gains always and zero gains on a seeded coin flip, so
/// different seeds perturb the structure differently.
fn accept(best: &Option<Candidate>, rng: &mut ChaCha8Rng) -> bool {
    match best {
        Some(c) if c.gain > 0 => true,
        Some(c) if c.gain == 0 => rng.gen_bool(0.5),
        _ => false,
    }
}

fn commit(rb: &mut Rebuild, n: u32, c: Candidate) {
    let r = build_expr(&mut rb.h, &c.expr, &c.leaves);
    rb.map[n as usize] = r ^ c.complemented;
}

/// Cut-based rewriting: each node is re-expressed from the truth table of
/// one of its 6-input cuts when that does not grow the graph.
pub fn rewrite(g: &Aig, seed: u64) -> Aig {
    let cuts = enumerate_cuts(g, CUT_SIZE);
    let mut refs = g.ref_counts();
    let reach = g.reachable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache: HashMap<(usize, u64), (Expr, bool)> = HashMap::new();
    let mut rb = Rebuild::new(g);
    for n in 0..g.len() as u32 {
        if !g.is_and(n) || !reach[n as usize] {
            continue;
        }
        let mut best: Option<Candidate> = None;
        for cut in cuts.of(n) {
            if cut.leaves.len() < 2 || cut.leaves == [n] {
                continue;
            }
            let k = cut.leaves.len();
            let (expr, complemented) = cache
                .entry((k, cut.truth))
                .or_insert_with(|| factor_function(&TruthTable::from_u64(k, cut.truth)))
                .clone();
            let leaves: Vec<Lit> = cut
                .leaves
                .iter()
                .map(|&l| rb.lit(Lit::new(l, false)))
                .collect();
            let m = mffc(g, n, &cut.leaves, &mut refs);
            let gain = evaluate(&rb, &m, n, &expr, &leaves);
            if best.as_ref().map_or(true, |b| gain > b.gain) {
                best = Some(Candidate {
                    gain,
                    expr,
                    complemented,
                    leaves,
                });
            }
        }
        if accept(&best, &mut rng) {
            commit(&mut rb, n, best.unwrap());
        } else {
            rb.map[n as usize] = rb.copy_and(g, n);
        }
    }
    guard(g, rb.finish(g))
}

/// Collapses each node's reconvergence-driven cone (up to `max_inputs`
/// leaves) and resynthesizes it from an irredundant factored cover.
pub fn refactor(g: &Aig, max_inputs: usize, seed: u64) -> Result<Aig, RestructureError> {
    if !(2..=MAX_REFACTOR_INPUTS).contains(&max_inputs) {
        return Err(RestructureError::Param(format!(
            "refactor max_cone_inputs must be in 2..={MAX_REFACTOR_INPUTS}, got {max_inputs}"
        )));
    }
    let mut refs = g.ref_counts();
    let reach = g.reachable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rb = Rebuild::new(g);
    for n in 0..g.len() as u32 {
        if !g.is_and(n) || !reach[n as usize] {
            continue;
        }
        let cut = reconv_cut(g, n, max_inputs);
        let tt = cone_truth(g, Lit::new(n, false), &cut).expect("cut bounds its cone");
        let (expr, complemented) = factor_function(&tt);
        let leaves: Vec<Lit> = cut.iter().map(|&l| rb.lit(Lit::new(l, false))).collect();
        let m = mffc(g, n, &cut, &mut refs);
        let gain = evaluate(&rb, &m, n, &expr, &leaves);
        let best = Some(Candidate {
            gain,
            expr,
            complemented,
            leaves,
        });
        if accept(&best, &mut rng) {
            commit(&mut rb, n, best.unwrap());
        } else {
            rb.map[n as usize] = rb.copy_and(g, n);
        }
    }
    Ok(guard(g, rb.finish(g)))
}

/// Local gains are estimates; never hand back a larger graph.
pub(crate) fn guard(before: &Aig, after: Aig) -> Aig {
    if after.and_count() > before.strash().and_count() {
        before.strash()
    } else {
        after
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_function(a: &Aig, b: &Aig) {
        let n = a.input_count();
        for m in 0..(1u32 << n) {
            let ins: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            assert_eq!(a.eval_outputs(&ins), b.eval_outputs(&ins));
        }
    }

    #[test]
    fn absorption_removes_a_node() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, b);
        let y = g.and(a, x);
        g.add_output("y", y);
        assert_eq!(g.and_count(), 2);
        let r = rewrite(&g, 0);
        assert_eq!(r.and_count(), 1);
        same_function(&g, &r);
    }

    #[test]
    fn duplicate_or_structures_shared() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x1 = g.or(a, b);
        // a & !b | b, the same function built differently
        let t = g.and(a, !b);
        let x2 = g.or(t, b);
        g.add_output("x1", x1);
        g.add_output("x2", x2);
        assert_eq!(g.and_count(), 3);
        let r = rewrite(&g, 0);
        assert_eq!(r.and_count(), 1);
        same_function(&g, &r);
    }

    #[test]
    fn xor_stays_three_nodes() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.xor(a, b);
        g.add_output("x", x);
        for seed in 0..8 {
            let r = rewrite(&g, seed);
            assert_eq!(r.and_count(), 3);
            same_function(&g, &r);
        }
    }

    #[test]
    fn refactor_factors_common_literal() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let ab = g.and(a, b);
        let ac = g.and(a, c);
        let f = g.or(ab, ac);
        g.add_output("f", f);
        assert_eq!(g.and_count(), 3);
        let r = refactor(&g, 8, 0).unwrap();
        assert_eq!(r.and_count(), 2);
        same_function(&g, &r);
    }

    #[test]
    fn refactor_ties_constant_cone_to_constant() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, b);
        let y = g.and(!a, b);
        let z = g.and(x, y);
        g.add_output("z", z);
        let r = refactor(&g, 8, 0).unwrap();
        assert_eq!(r.outputs()[0].1, Lit::FALSE);
        assert_eq!(r.and_count(), 0);
    }

    #[test]
    fn refactor_rejects_wide_cones() {
        let g = Aig::new("t");
        assert!(refactor(&g, 17, 0).is_err());
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aig::{Aig, Lit};

/// Rebuilds every AND supergate as a delay-optimal tree.
///
/// A supergate grows through uncomplemented edges into single-fanout AND
/// nodes. Its leaves are combined two at a time, shallowest first; the seed
/// breaks ties between equally deep leaves.
pub fn balance(g: &Aig, seed: u64) -> Aig {
    let refs = g.ref_counts();
    let reach = g.reachable();
    let n = g.len();

    let leaves_of = |root: u32| -> Vec<Lit> {
        let (a, b) = g.fanins(root).unwrap();
        let mut out = Vec::new();
        let mut stack = vec![b, a];
        while let Some(l) = stack.pop() {
            let m = l.node();
            if !l.is_complemented() && g.is_and(m) && refs[m as usize] == 1 {
                let (x, y) = g.fanins(m).unwrap();
                stack.push(y);
                stack.push(x);
            } else {
                out.push(l);
            }
        }
        out
    };

    // Only supergate roots and their leaves need images in the new graph.
    let mut needed = vec![false; n];
    for (_, l) in g.outputs() {
        needed[l.node() as usize] = true;
    }
    let mut supergates: Vec<Option<Vec<Lit>>> = vec![None; n];
    for i in (0..n as u32).rev() {
        if !needed[i as usize] || !reach[i as usize] || !g.is_and(i) {
            continue;
        }
        let leaves = leaves_of(i);
        for l in &leaves {
            needed[l.node() as usize] = true;
        }
        supergates[i as usize] = Some(leaves);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = g.with_inputs_of();
    let mut map = vec![Lit::TRUE; n];
    for (k, (_, id)) in g.inputs().iter().enumerate() {
        map[*id as usize] = h.input_lit(k);
    }
    for i in 0..n {
        let Some(leaves) = supergates[i].take() else {
            continue;
        };
        let mut lits: Vec<Lit> = leaves
            .iter()
            .map(|l| map[l.node() as usize] ^ l.is_complemented())
            .collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) || lits.contains(&Lit::FALSE) {
            map[i] = Lit::FALSE;
            continue;
        }
        lits.retain(|&l| l != Lit::TRUE);
        let mut keyed: Vec<(u32, u64, Lit)> = lits
            .into_iter()
            .map(|l| (h.level(l.node()), rng.gen(), l))
            .collect();
        while keyed.len() > 1 {
            keyed.sort_unstable_by(|x, y| (y.0, y.1).cmp(&(x.0, x.1)));
            let (_, _, a) = keyed.pop().unwrap();
            let (_, _, b) = keyed.pop().unwrap();
            let r = h.and(a, b);
            keyed.push((h.level(r.node()), rng.gen(), r));
        }
        map[i] = keyed.pop().map_or(Lit::TRUE, |k| k.2);
    }
    for (name, l) in g.outputs() {
        h.add_output(name, map[l.node() as usize] ^ l.is_complemented());
    }
    let out = h.strash();
    if out.depth() > g.depth() {
        return g.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Aig {
        let mut g = Aig::new("t");
        let ins: Vec<Lit> = (0..n).map(|i| g.add_input(&format!("i{i}"))).collect();
        let mut acc = ins[0];
        for &i in &ins[1..] {
            acc = g.and(acc, i);
        }
        g.add_output("y", acc);
        g
    }

    #[test]
    fn chain_of_eight_becomes_depth_three() {
        let g = chain(8);
        assert_eq!((g.and_count(), g.depth()), (7, 7));
        let b = balance(&g, 0);
        assert_eq!((b.and_count(), b.depth()), (7, 3));
        for m in 0..256u32 {
            let ins: Vec<bool> = (0..8).map(|i| m >> i & 1 == 1).collect();
            assert_eq!(b.eval_outputs(&ins), g.eval_outputs(&ins));
        }
    }

    #[test]
    fn balanced_input_is_a_fixed_point() {
        let b = balance(&chain(8), 0);
        assert_eq!(balance(&b, 5).depth(), 3);
        let one = chain(2);
        assert_eq!(balance(&one, 1), one);
    }
}

//! Shared machinery for the node-by-node resynthesis passes.

use std::collections::HashSet;

use crate::aig::{Aig, Lit, Node};

/// Rebuilds an AIG in topological order while passes decide, per node, what
/// the new graph should compute for it.
pub(crate) struct Rebuild {
    pub h: Aig,
    pub map: Vec<Lit>,
}

impl Rebuild {
    pub fn new(g: &Aig) -> Self {
        let h = g.with_inputs_of();
        let mut map = vec![Lit::TRUE; g.len()];
        for (k, (_, id)) in g.inputs().iter().enumerate() {
            map[*id as usize] = h.input_lit(k);
        }
        Rebuild { h, map }
    }

    /// Image of an old literal in the new graph.
    #[inline]
    pub fn lit(&self, l: Lit) -> Lit {
        self.map[l.node() as usize] ^ l.is_complemented()
    }

    /// Default copy of an old AND node.
    pub fn copy_and(&mut self, g: &Aig, n: u32) -> Lit {
        let (a, b) = g.fanins(n).expect("AND node");
        let (a, b) = (self.lit(a), self.lit(b));
        self.h.and(a, b)
    }

    pub fn finish(mut self, g: &Aig) -> Aig {
        for (name, l) in g.outputs() {
            let nl = self.lit(*l);
            self.h.add_output(name, nl);
        }
        self.h.strash()
    }
}

/// Nodes freed if `root` were removed, stopping at `leaves` (sorted). The
/// root is included. `refs` is restored before returning.
pub(crate) fn mffc(g: &Aig, root: u32, leaves: &[u32], refs: &mut [u32]) -> Vec<u32> {
    let is_leaf = |n: u32| leaves.binary_search(&n).is_ok();
    let mut out = vec![root];
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        let (a, b) = g.fanins(n).expect("AND node");
        for f in [a.node(), b.node()] {
            if is_leaf(f) || !g.is_and(f) {
                continue;
            }
            refs[f as usize] -= 1;
            if refs[f as usize] == 0 {
                out.push(f);
                stack.push(f);
            }
        }
    }
    for &n in &out {
        let (a, b) = g.fanins(n).unwrap();
        for f in [a.node(), b.node()] {
            if !is_leaf(f) && g.is_and(f) {
                refs[f as usize] += 1;
            }
        }
    }
    out
}

/// Reconvergence-driven cut of at most `max_leaves` leaves: starting from
/// the fanins, repeatedly expands the leaf that adds the fewest new leaves.
pub(crate) fn reconv_cut(g: &Aig, root: u32, max_leaves: usize) -> Vec<u32> {
    let (a, b) = g.fanins(root).expect("AND node");
    let mut visited: HashSet<u32> = [root, a.node(), b.node()].into_iter().collect();
    let mut leaves: Vec<u32> = vec![a.node(), b.node()];
    leaves.sort_unstable();
    leaves.dedup();
    loop {
        let mut best: Option<(usize, u32, usize)> = None;
        for (k, &l) in leaves.iter().enumerate() {
            let Node::And(x, y) = g.node(l) else { continue };
            let cost = [x.node(), y.node()]
                .iter()
                .filter(|f| !visited.contains(f))
                .count()
                - usize::from(x.node() == y.node() && !visited.contains(&x.node()));
            let better = match best {
                None => true,
                Some((c, bl, _)) => cost < c || (cost == c && g.level(l) > g.level(bl)),
            };
            if better {
                best = Some((cost, l, k));
            }
        }
        let Some((cost, l, k)) = best else { break };
        if leaves.len() - 1 + cost > max_leaves {
            break;
        }
        leaves.swap_remove(k);
        let (x, y) = g.fanins(l).unwrap();
        for f in [x.node(), y.node()] {
            if visited.insert(f) {
                leaves.push(f);
            }
        }
    }
    leaves.sort_unstable();
    leaves
}

/// AND nodes between `root` and `leaves`, in increasing index order.
pub(crate) fn cone_nodes(g: &Aig, root: u32, leaves: &[u32]) -> Vec<u32> {
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    let mut out = Vec::new();
    while let Some(n) = stack.pop() {
        if leaves.binary_search(&n).is_ok() || !g.is_and(n) || !seen.insert(n) {
            continue;
        }
        out.push(n);
        let (a, b) = g.fanins(n).unwrap();
        stack.push(a.node());
        stack.push(b.node());
    }
    out.sort_unstable();
    out
}

/// Images of the dying old nodes in the new graph, excluding the root
/// (not yet built) and non-AND images.
pub(crate) fn dying_images(rb: &Rebuild, mffc: &[u32], root: u32) -> HashSet<u32> {
    mffc.iter()
        .filter(|&&m| m != root)
        .map(|&m| rb.map[m as usize].node())
        .filter(|&m| rb.h.is_and(m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mffc_stops_at_shared_nodes() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let x = g.and(a, b);
        let y = g.and(x, c);
        let z = g.and(y, a);
        g.add_output("z", z);
        g.add_output("x", x);
        let mut refs = g.ref_counts();
        let before = refs.clone();
        let m = mffc(&g, z.node(), &[1, 2, 3], &mut refs);
        assert_eq!(refs, before);
        assert_eq!(m.len(), 2);
        assert!(!m.contains(&x.node()));
    }

    #[test]
    fn reconv_cut_respects_limit() {
        let mut g = Aig::new("t");
        let ins: Vec<Lit> = (0..8).map(|i| g.add_input(&format!("i{i}"))).collect();
        let mut acc = ins[0];
        for &i in &ins[1..] {
            acc = g.and(acc, i);
        }
        g.add_output("y", acc);
        for k in 2..=8 {
            let cut = reconv_cut(&g, acc.node(), k);
            assert!(cut.len() <= k);
            assert!(crate::aig::cone_truth(&g, acc, &cut).is_some());
        }
        assert_eq!(reconv_cut(&g, acc.node(), 8).len(), 8);
    }
}

//! K-feasible cut enumeration.

use std::collections::HashMap;

use super::{Aig, Lit, Node};
use crate::tt::TruthTable;

/// Maximum leaves per cut.
pub const CUT_SIZE: usize = 6;
/// Maximum cuts stored per node.
pub const CUT_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    /// Sorted leaf node indices.
    pub leaves: Vec<u32>,
    /// Function of the root over the leaves (leaf `i` is variable `i`).
    pub truth: u64,
}

#[derive(Debug, Clone)]
pub struct CutSet {
    cuts: Vec<Vec<Cut>>,
}

impl CutSet {
    pub fn of(&self, node: u32) -> &[Cut] {
        &self.cuts[node as usize]
    }
}

/// Truth table of `root` over `leaves`, or `None` if the cone escapes them.
pub fn cone_truth(g: &Aig, root: Lit, leaves: &[u32]) -> Option<TruthTable> {
    let vars = leaves.len();
    let mut memo: HashMap<u32, TruthTable> = HashMap::new();
    for (i, &l) in leaves.iter().enumerate() {
        memo.insert(l, TruthTable::var(vars, i));
    }
    let mut stack = vec![root.node()];
    let mut cone = Vec::new();
    let mut seen = std::collections::HashSet::new();
    while let Some(n) = stack.pop() {
        if memo.contains_key(&n) || !seen.insert(n) {
            continue;
        }
        match g.node(n) {
            Node::Const => {
                memo.insert(n, TruthTable::one(vars));
            }
            Node::Input(_) => return None,
            Node::And(a, b) => {
                cone.push(n);
                stack.push(a.node());
                stack.push(b.node());
            }
        }
    }
    cone.sort_unstable();
    for n in cone {
        let (a, b) = g.fanins(n).unwrap();
        let ta = memo[&a.node()].clone();
        let tb = memo[&b.node()].clone();
        let ta = if a.is_complemented() { !ta } else { ta };
        let tb = if b.is_complemented() { !tb } else { tb };
        memo.insert(n, &ta & &tb);
    }
    let t = memo.remove(&root.node()).unwrap();
    Some(if root.is_complemented() { !t } else { t })
}

fn merge(a: &[u32], b: &[u32], k: usize) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(k);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.len() == k {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

fn dominates(small: &[u32], big: &[u32]) -> bool {
    small.len() <= big.len() && small.iter().all(|x| big.binary_search(x).is_ok())
}

/// Enumerates up to [`CUT_LIMIT`] cuts of at most `k` leaves for every node,
/// preferring cuts with fewer leaves. The trivial cut `{n}` is always kept
/// last.
pub fn enumerate_cuts(g: &Aig, k: usize) -> CutSet {
    let k = k.min(CUT_SIZE);
    let mut cuts: Vec<Vec<Cut>> = vec![Vec::new(); g.len()];
    for i in 0..g.len() as u32 {
        let trivial = Cut {
            leaves: vec![i],
            truth: 0b10,
        };
        match g.node(i) {
            Node::Const => {
                cuts[i as usize] = vec![Cut {
                    leaves: vec![],
                    truth: 1,
                }]
            }
            Node::Input(_) => cuts[i as usize] = vec![trivial],
            Node::And(a, b) => {
                let mut cand: Vec<Vec<u32>> = Vec::new();
                let ca = cuts_with_trivial(&cuts, a.node());
                let cb = cuts_with_trivial(&cuts, b.node());
                for x in &ca {
                    for y in &cb {
                        if let Some(m) = merge(x, y, k) {
                            if !cand.iter().any(|c| dominates(c, &m)) {
                                cand.retain(|c| !dominates(&m, c));
                                cand.push(m);
                            }
                        }
                    }
                }
                cand.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
                cand.truncate(CUT_LIMIT - 1);
                let mut list: Vec<Cut> = cand
                    .into_iter()
                    .map(|leaves| {
                        let t = cone_truth(g, Lit::new(i, false), &leaves)
                            .expect("cut bounds its cone");
                        Cut {
                            truth: t.as_u64(),
                            leaves,
                        }
                    })
                    .collect();
                list.push(trivial);
                cuts[i as usize] = list;
            }
        }
    }
    CutSet { cuts }
}

fn cuts_with_trivial(cuts: &[Vec<Cut>], n: u32) -> Vec<Vec<u32>> {
    let mut v: Vec<Vec<u32>> = cuts[n as usize].iter().map(|c| c.leaves.clone()).collect();
    if !v.iter().any(|c| c.len() == 1 && c[0] == n) && n != 0 {
        v.push(vec![n]);
    }
    v
}

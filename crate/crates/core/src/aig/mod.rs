//! And-inverter graphs with complemented edges.
//!
//! Node 0 is the constant-true node, so [`Lit::TRUE`] is the uncomplemented
//! edge to it and [`Lit::FALSE`] the complemented one. Every AND node's fanins
//! point to strictly smaller node indices.

mod aiger;
mod convert;
mod cuts;
mod sim;

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::sop::Expr;

pub use aiger::{write_aiger_ascii, write_aiger_binary};
pub use convert::{from_aig, to_aig, to_aig_mapped, FromAigOptions};
pub use cuts::{cone_truth, enumerate_cuts, Cut, CutSet, CUT_LIMIT, CUT_SIZE};
pub use sim::Signatures;

#[derive(Debug, Error)]
pub enum AigError {
    #[error("expected {expected} stimulus rows, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("stimulus rows have unequal word counts")]
    RaggedStimulus,
    #[error(transparent)]
    Netlist(#[from] crate::netlist::NetlistError),
}

/// An edge: node index in the upper bits, complement flag in bit 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub const TRUE: Lit = Lit(0);
    pub const FALSE: Lit = Lit(1);

    #[inline]
    pub fn new(node: u32, complemented: bool) -> Lit {
        Lit(node << 1 | complemented as u32)
    }

    #[inline]
    pub fn node(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }

    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn from_raw(raw: u32) -> Lit {
        Lit(raw)
    }

    #[inline]
    pub fn is_const(self) -> bool {
        self.node() == 0
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl std::ops::BitXor<bool> for Lit {
    type Output = Lit;
    #[inline]
    fn bitxor(self, c: bool) -> Lit {
        Lit(self.0 ^ c as u32)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!{}", self.node())
        } else {
            write!(f, "{}", self.node())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Const,
    Input(u32),
    And(Lit, Lit),
}

#[derive(Debug, Clone)]
pub struct Aig {
    name: String,
    nodes: Vec<Node>,
    levels: Vec<u32>,
    inputs: Vec<(String, u32)>,
    outputs: Vec<(String, Lit)>,
    hash: HashMap<(Lit, Lit), u32>,
    and_count: usize,
    depth: u32,
}

impl PartialEq for Aig {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.inputs == other.inputs && self.outputs == other.outputs
    }
}

impl Eq for Aig {}

/// Orders a fanin pair so the lower literal comes first.
#[inline]
pub fn normalize(a: Lit, b: Lit) -> (Lit, Lit) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Aig {
    pub fn new(name: impl Into<String>) -> Aig {
        Aig {
            name: name.into(),
            nodes: vec![Node::Const],
            levels: vec![0],
            inputs: Vec::new(),
            outputs: Vec::new(),
            hash: HashMap::new(),
            and_count: 0,
            depth: 0,
        }
    }

    /// Empty graph with the same name and inputs as `self`.
    pub fn with_inputs_of(&self) -> Aig {
        let mut g = Aig::new(self.name.clone());
        for (name, _) in &self.inputs {
            g.add_input(name);
        }
        g
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_input(&mut self, name: &str) -> Lit {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node::Input(self.inputs.len() as u32));
        self.levels.push(0);
        self.inputs.push((name.to_string(), id));
        Lit::new(id, false)
    }

    pub fn add_output(&mut self, name: &str, lit: Lit) {
        self.depth = self.depth.max(self.levels[lit.node() as usize]);
        self.outputs.push((name.to_string(), lit));
    }

    pub fn set_output(&mut self, index: usize, lit: Lit) {
        self.outputs[index].1 = lit;
        self.depth = self
            .outputs
            .iter()
            .map(|(_, l)| self.levels[l.node() as usize])
            .max()
            .unwrap_or(0);
    }

    /// Hashed AND with constant propagation and trivial-case folding.
    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if let Some(l) = self.lookup(a, b) {
            return l;
        }
        self.push_and(normalize(a, b))
    }

    /// Result of `and(a, b)` if it needs no new node.
    pub fn lookup(&self, a: Lit, b: Lit) -> Option<Lit> {
        if a == Lit::FALSE || b == Lit::FALSE || a == !b {
            return Some(Lit::FALSE);
        }
        if a == Lit::TRUE || a == b {
            return Some(b);
        }
        if b == Lit::TRUE {
            return Some(a);
        }
        self.hash.get(&normalize(a, b)).map(|&n| Lit::new(n, false))
    }

    /// Appends an AND node without hashing or simplification.
    pub fn and_raw(&mut self, a: Lit, b: Lit) -> Lit {
        let key = normalize(a, b);
        self.push_and(key)
    }

    fn push_and(&mut self, key: (Lit, Lit)) -> Lit {
        let id = self.nodes.len() as u32;
        debug_assert!(key.0.node() < id && key.1.node() < id);
        self.nodes.push(Node::And(key.0, key.1));
        let lv = 1 + self.levels[key.0.node() as usize].max(self.levels[key.1.node() as usize]);
        self.levels.push(lv);
        self.hash.entry(key).or_insert(id);
        self.and_count += 1;
        Lit::new(id, false)
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    /// Three-node XOR.
    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let t1 = self.and(a, !b);
        let t2 = self.and(!a, b);
        self.or(t1, t2)
    }

    pub fn mux(&mut self, s: Lit, t: Lit, e: Lit) -> Lit {
        let x = self.and(s, t);
        let y = self.and(!s, e);
        self.or(x, y)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: u32) -> Node {
        self.nodes[i as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.and_count == 0
    }

    /// Number of AND nodes.
    pub fn and_count(&self) -> usize {
        self.and_count
    }

    /// Maximum output level.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn level(&self, node: u32) -> u32 {
        self.levels[node as usize]
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn inputs(&self) -> &[(String, u32)] {
        &self.inputs
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn input_lit(&self, pos: usize) -> Lit {
        Lit::new(self.inputs[pos].1, false)
    }

    pub fn outputs(&self) -> &[(String, Lit)] {
        &self.outputs
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn fanins(&self, node: u32) -> Option<(Lit, Lit)> {
        match self.nodes[node as usize] {
            Node::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_and(&self, node: u32) -> bool {
        matches!(self.nodes[node as usize], Node::And(..))
    }

    /// Fanout reference counts (AND fanins plus outputs).
    pub fn ref_counts(&self) -> Vec<u32> {
        let mut r = vec![0u32; self.nodes.len()];
        for n in &self.nodes {
            if let Node::And(a, b) = n {
                r[a.node() as usize] += 1;
                r[b.node() as usize] += 1;
            }
        }
        for (_, l) in &self.outputs {
            r[l.node() as usize] += 1;
        }
        r
    }

    /// Marks nodes in the transitive fanin of the outputs.
    pub fn reachable(&self) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        for (_, l) in &self.outputs {
            mark[l.node() as usize] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if mark[i] {
                if let Node::And(a, b) = self.nodes[i] {
                    mark[a.node() as usize] = true;
                    mark[b.node() as usize] = true;
                }
            }
        }
        mark
    }

    /// Primary-input positions in the cone of `roots`.
    pub fn support(&self, roots: &[Lit]) -> Vec<usize> {
        let mut mark = vec![false; self.nodes.len()];
        for r in roots {
            mark[r.node() as usize] = true;
        }
        let mut out = Vec::new();
        for i in (0..self.nodes.len()).rev() {
            if !mark[i] {
                continue;
            }
            match self.nodes[i] {
                Node::And(a, b) => {
                    mark[a.node() as usize] = true;
                    mark[b.node() as usize] = true;
                }
                Node::Input(p) => out.push(p as usize),
                Node::Const => {}
            }
        }
        out.sort_unstable();
        out
    }

    /// Builds `expr` over `leaves` (variable `i` maps to `leaves[i]`).
    pub fn build_expr(&mut self, expr: &Expr, leaves: &[Lit]) -> Lit {
        build_expr(self, expr, leaves)
    }

    /// Rebuilds the outputs' cones through the hash table, dropping dangling
    /// nodes, folding constants and merging structural duplicates.
    pub fn strash(&self) -> Aig {
        let mut g = self.with_inputs_of();
        let reach = self.reachable();
        let mut map: Vec<Lit> = vec![Lit::FALSE; self.nodes.len()];
        map[0] = Lit::TRUE;
        for (k, (_, id)) in self.inputs.iter().enumerate() {
            map[*id as usize] = g.input_lit(k);
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::And(a, b) = *n {
                if reach[i] {
                    let fa = map[a.node() as usize] ^ a.is_complemented();
                    let fb = map[b.node() as usize] ^ b.is_complemented();
                    map[i] = g.and(fa, fb);
                }
            }
        }
        for (name, l) in &self.outputs {
            g.add_output(name, map[l.node() as usize] ^ l.is_complemented());
        }
        g
    }

    /// Recomputes the level of every node from its fanins.
    pub fn recompute_levels(&self) -> Vec<u32> {
        let mut lv = vec![0u32; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::And(a, b) = n {
                lv[i] = 1 + lv[a.node() as usize].max(lv[b.node() as usize]);
            }
        }
        lv
    }
}

/// Anything that can create AND nodes; lets synthesis run for real or as a dry run.
pub trait AndSink {
    fn and(&mut self, a: Lit, b: Lit) -> Lit;
    fn level_of(&self, l: Lit) -> u32;
}

impl AndSink for Aig {
    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        Aig::and(self, a, b)
    }

    fn level_of(&self, l: Lit) -> u32 {
        self.levels[l.node() as usize]
    }
}

/// Counts the nodes a construction would add to `base` without modifying it.
///
/// Hash hits on nodes in `dying` are charged, since reusing them keeps them
/// alive.
pub struct DryRun<'a> {
    base: &'a Aig,
    dying: &'a HashSet<u32>,
    virt: HashMap<(Lit, Lit), u32>,
    virt_levels: Vec<u32>,
    revived: HashSet<u32>,
    pub added: usize,
}

impl<'a> DryRun<'a> {
    pub fn new(base: &'a Aig, dying: &'a HashSet<u32>) -> Self {
        DryRun {
            base,
            dying,
            virt: HashMap::new(),
            virt_levels: Vec::new(),
            revived: HashSet::new(),
            added: 0,
        }
    }
}

impl AndSink for DryRun<'_> {
    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let real = self.base.len() as u32;
        let is_virtual = |l: Lit| l.node() >= real;
        if !is_virtual(a) && !is_virtual(b) {
            if let Some(l) = self.base.lookup(a, b) {
                if self.dying.contains(&l.node()) && self.revived.insert(l.node()) {
                    self.added += 1;
                }
                return l;
            }
        } else {
            if a == Lit::FALSE || b == Lit::FALSE || a == !b {
                return Lit::FALSE;
            }
            if a == Lit::TRUE || a == b {
                return b;
            }
            if b == Lit::TRUE {
                return a;
            }
        }
        let key = normalize(a, b);
        if let Some(&v) = self.virt.get(&key) {
            return Lit::new(v, false);
        }
        let id = real + self.virt_levels.len() as u32;
        let lv = 1 + self.level_of(a).max(self.level_of(b));
        self.virt_levels.push(lv);
        self.virt.insert(key, id);
        self.added += 1;
        Lit::new(id, false)
    }

    fn level_of(&self, l: Lit) -> u32 {
        let real = self.base.len() as u32;
        if l.node() < real {
            self.base.level(l.node())
        } else {
            self.virt_levels[(l.node() - real) as usize]
        }
    }
}

/// Builds a factored form, combining operands shallowest-first.
pub fn build_expr<S: AndSink>(sink: &mut S, expr: &Expr, leaves: &[Lit]) -> Lit {
    match expr {
        Expr::Const(v) => {
            if *v {
                Lit::TRUE
            } else {
                Lit::FALSE
            }
        }
        Expr::Lit(l) => leaves[l.var as usize] ^ l.neg,
        Expr::And(xs) => {
            let lits: Vec<Lit> = xs.iter().map(|x| build_expr(sink, x, leaves)).collect();
            and_many(sink, lits)
        }
        Expr::Or(xs) => {
            let lits: Vec<Lit> = xs.iter().map(|x| !build_expr(sink, x, leaves)).collect();
            !and_many(sink, lits)
        }
    }
}

/// Balanced AND of many literals (pairs the two shallowest operands first).
pub fn and_many<S: AndSink>(sink: &mut S, mut lits: Vec<Lit>) -> Lit {
    if lits.is_empty() {
        return Lit::TRUE;
    }
    while lits.len() > 1 {
        lits.sort_by_key(|&l| (std::cmp::Reverse(sink.level_of(l)), l));
        let a = lits.pop().unwrap();
        let b = lits.pop().unwrap();
        let r = sink.and(a, b);
        lits.push(r);
    }
    lits[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_and_merged_by_strash() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and_raw(a, b);
        let y = g.and_raw(a, b);
        g.add_output("x", x);
        g.add_output("y", y);
        assert_eq!(g.and_count(), 2);
        let s = g.strash();
        assert_eq!(s.and_count(), 1);
        assert_eq!(s.strash(), s);
    }

    #[test]
    fn commuted_fanins_merged() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and_raw(a, b);
        let y = g.and_raw(b, a);
        g.add_output("x", x);
        g.add_output("y", !y);
        let s = g.strash();
        assert_eq!(s.and_count(), 1);
        assert_eq!(s.outputs()[0].1, !s.outputs()[1].1);
    }

    #[test]
    fn constant_folding() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        assert_eq!(g.and(a, Lit::FALSE), Lit::FALSE);
        assert_eq!(g.and(a, Lit::TRUE), a);
        assert_eq!(g.and(a, !a), Lit::FALSE);
        assert_eq!(g.and(a, a), a);
        assert_eq!(g.and_count(), 0);
    }

    #[test]
    fn levels_and_depth() {
        let mut g = Aig::new("t");
        let ins: Vec<Lit> = (0..4).map(|i| g.add_input(&format!("i{i}"))).collect();
        let mut acc = ins[0];
        for &l in &ins[1..] {
            acc = g.and(acc, l);
        }
        g.add_output("y", acc);
        assert_eq!(g.depth(), 3);
        assert_eq!(g.recompute_levels(), g.levels().to_vec());
    }
}

//! Satisfying-assignment search over an AIG.
//!
//! Given target literals that must all be true, finds a primary-input
//! assignment or proves none exists. Small supports are enumerated
//! bit-parallel; larger ones go through a PODEM-style backtracking search
//! with three-valued implication and restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aig::{Aig, Lit, Node};

/// Supports at or below this size are enumerated exhaustively by default.
pub const EXHAUSTIVE_BOUND: usize = 24;
/// Default backtrack budget for the guided search.
pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotFound {
    /// The whole space was explored; no assignment exists.
    Exhausted,
    /// The backtrack budget ran out first.
    Budget,
}

impl std::fmt::Display for NotFound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotFound::Exhausted => f.write_str("exhausted search space"),
            NotFound::Budget => f.write_str("search budget exhausted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// One value per primary input, in port order.
    Found(Vec<bool>),
    NotFound(NotFound),
}

impl Outcome {
    pub fn found(&self) -> Option<&[bool]> {
        match self {
            Outcome::Found(v) => Some(v),
            Outcome::NotFound(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub exhaustive_bound: usize,
    pub budget: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exhaustive_bound: EXHAUSTIVE_BOUND,
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

/// Backend that can decide whether all `targets` can be true at once.
///
/// The built-in [`Builtin`] engine is used unless an external decision
/// procedure is plugged in.
pub trait Solver: Sync {
    fn solve(&self, g: &Aig, targets: &[Lit], cfg: &SearchConfig) -> Outcome;
}

pub struct Builtin;

impl Solver for Builtin {
    fn solve(&self, g: &Aig, targets: &[Lit], cfg: &SearchConfig) -> Outcome {
        satisfy(g, targets, cfg)
    }
}

/// Finds an input assignment under which every target literal is true.
///
/// A returned assignment has been re-checked by simulation; inputs outside
/// the targets' support are set to 0.
pub fn satisfy(g: &Aig, targets: &[Lit], cfg: &SearchConfig) -> Outcome {
    if targets.contains(&Lit::FALSE) || targets.iter().any(|t| targets.contains(&!*t)) {
        return Outcome::NotFound(NotFound::Exhausted);
    }
    let support = g.support(targets);
    let out = if support.len() <= cfg.exhaustive_bound.min(32) {
        enumerate(g, targets, &support)
    } else {
        Podem::new(g, targets, cfg.seed).run(cfg.budget)
    };
    if let Outcome::Found(v) = &out {
        assert!(
            holds(g, targets, v),
            "search returned an assignment that does not satisfy its targets"
        );
    }
    out
}

/// Whether every target is true under the assignment.
pub fn holds(g: &Aig, targets: &[Lit], assignment: &[bool]) -> bool {
    let words: Vec<u64> = assignment.iter().map(|&b| if b { !0 } else { 0 }).collect();
    let mut vals = Vec::new();
    g.eval_word_into(&words, &mut vals);
    targets
        .iter()
        .all(|t| (vals[t.node() as usize] & 1 == 1) ^ t.is_complemented())
}

fn cone(g: &Aig, roots: &[Lit]) -> Vec<u32> {
    let mut mark = vec![false; g.len()];
    for r in roots {
        mark[r.node() as usize] = true;
    }
    let mut out = Vec::new();
    for i in (0..g.len()).rev() {
        if mark[i] {
            if let Node::And(a, b) = g.node(i as u32) {
                mark[a.node() as usize] = true;
                mark[b.node() as usize] = true;
            }
            out.push(i as u32);
        }
    }
    out.reverse();
    out
}

const MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Words processed sequentially by each parallel task.
const WORDS_PER_TASK: u64 = 256;

fn enumerate(g: &Aig, targets: &[Lit], support: &[usize]) -> Outcome {
    let s = support.len();
    let nodes = cone(g, targets);
    let mut slot = vec![u32::MAX; g.len()];
    for (k, &n) in nodes.iter().enumerate() {
        slot[n as usize] = k as u32;
    }
    let mut var_of_input = vec![usize::MAX; g.input_count()];
    for (v, &p) in support.iter().enumerate() {
        var_of_input[p] = v;
    }
    let total_words: u64 = if s <= 6 { 1 } else { 1u64 << (s - 6) };
    let valid: u64 = if s >= 6 {
        !0
    } else {
        (1u64 << (1u32 << s)) - 1
    };
    let tasks = total_words.div_ceil(WORDS_PER_TASK);

    let hit = (0..tasks).into_par_iter().find_map_first(|t| {
        let mut vals = vec![0u64; nodes.len()];
        let lit = |vals: &[u64], l: Lit| {
            vals[slot[l.node() as usize] as usize] ^ if l.is_complemented() { !0 } else { 0 }
        };
        let end = ((t + 1) * WORDS_PER_TASK).min(total_words);
        for w in t * WORDS_PER_TASK..end {
            for (k, &n) in nodes.iter().enumerate() {
                vals[k] = match g.node(n) {
                    Node::Const => !0,
                    Node::Input(p) => {
                        let v = var_of_input[p as usize];
                        if v < 6 {
                            MASKS[v]
                        } else if (w >> (v - 6)) & 1 == 1 {
                            !0
                        } else {
                            0
                        }
                    }
                    Node::And(a, b) => lit(&vals, a) & lit(&vals, b),
                };
            }
            let mut acc = valid;
            for &t in targets {
                acc &= lit(&vals, t);
            }
            if acc != 0 {
                return Some(w * 64 + acc.trailing_zeros() as u64);
            }
        }
        None
    });
    match hit {
        Some(m) => {
            let mut a = vec![false; g.input_count()];
            for (v, &p) in support.iter().enumerate() {
                a[p] = (m >> v) & 1 == 1;
            }
            Outcome::Found(a)
        }
        None => Outcome::NotFound(NotFound::Exhausted),
    }
}

const X: u8 = 2;

#[inline]
fn lit3(vals: &[u8], l: Lit) -> u8 {
    let v = vals[l.node() as usize];
    if v == X {
        X
    } else {
        v ^ l.is_complemented() as u8
    }
}

struct Podem<'a> {
    g: &'a Aig,
    targets: Vec<Lit>,
    cone: Vec<u32>,
    vals: Vec<u8>,
    assign: Vec<u8>,
    rng: ChaCha8Rng,
    randomize: bool,
}

impl<'a> Podem<'a> {
    fn new(g: &'a Aig, targets: &[Lit], seed: u64) -> Self {
        // hardest (deepest) targets are justified first
        let mut targets = targets.to_vec();
        targets.sort_by_key(|t| (std::cmp::Reverse(g.level(t.node())), *t));
        Podem {
            g,
            cone: cone(g, &targets),
            targets,
            vals: vec![X; g.len()],
            assign: vec![X; g.input_count()],
            rng: ChaCha8Rng::seed_from_u64(seed),
            randomize: false,
        }
    }

    fn imply(&mut self) {
        self.vals[0] = 1;
        for &n in &self.cone {
            let v = match self.g.node(n) {
                Node::Const => 1,
                Node::Input(p) => self.assign[p as usize],
                Node::And(a, b) => {
                    let (x, y) = (lit3(&self.vals, a), lit3(&self.vals, b));
                    if x == 0 || y == 0 {
                        0
                    } else if x == 1 && y == 1 {
                        1
                    } else {
                        X
                    }
                }
            };
            self.vals[n as usize] = v;
        }
    }

    /// Walks from an unjustified objective to an unassigned input.
    fn backtrace(&mut self, mut node: u32, mut want: u8) -> (usize, u8) {
        loop {
            match self.g.node(node) {
                Node::Input(p) => return (p as usize, want),
                Node::Const => unreachable!("constant node is never unknown"),
                Node::And(a, b) => {
                    let xa = lit3(&self.vals, a) == X;
                    let xb = lit3(&self.vals, b) == X;
                    let pick = match (xa, xb) {
                        (true, false) => a,
                        (false, true) => b,
                        _ => {
                            let (la, lb) = (self.g.level(a.node()), self.g.level(b.node()));
                            let prefer_a = if self.randomize && self.rng.gen_bool(0.3) {
                                self.rng.gen_bool(0.5)
                            } else if want == 1 {
                                // all fanins must be 1: take the hardest first
                                la >= lb
                            } else {
                                // any fanin at 0 suffices: take the easiest
                                la <= lb
                            };
                            if prefer_a {
                                a
                            } else {
                                b
                            }
                        }
                    };
                    node = pick.node();
                    want ^= pick.is_complemented() as u8;
                }
            }
        }
    }

    fn run(mut self, budget: u64) -> Outcome {
        let mut backtracks = 0u64;
        let mut restart_limit = 64u64;
        loop {
            // one complete PODEM run; a restart abandons it early
            let mut stack: Vec<(usize, bool)> = Vec::new();
            self.assign.iter_mut().for_each(|a| *a = X);
            let mut run_backtracks = 0u64;
            loop {
                self.imply();
                let mut conflict = None;
                let mut open = None;
                for &t in &self.targets {
                    match lit3(&self.vals, t) {
                        0 => {
                            conflict = Some(t);
                            break;
                        }
                        X if open.is_none() => open = Some(t),
                        _ => {}
                    }
                }
                if conflict.is_some() {
                    backtracks += 1;
                    run_backtracks += 1;
                    if backtracks > budget {
                        return Outcome::NotFound(NotFound::Budget);
                    }
                    loop {
                        match stack.pop() {
                            None => return Outcome::NotFound(NotFound::Exhausted),
                            Some((p, true)) => self.assign[p] = X,
                            Some((p, false)) => {
                                self.assign[p] ^= 1;
                                stack.push((p, true));
                                break;
                            }
                        }
                    }
                    if run_backtracks > restart_limit {
                        break;
                    }
                    continue;
                }
                match open {
                    None => {
                        let a = self.assign.iter().map(|&v| v == 1).collect();
                        return Outcome::Found(a);
                    }
                    Some(t) => {
                        let (p, v) = self.backtrace(t.node(), 1 ^ t.is_complemented() as u8);
                        self.assign[p] = v;
                        stack.push((p, false));
                    }
                }
            }
            restart_limit = restart_limit.saturating_mul(2);
            self.randomize = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide_and(n: usize) -> (Aig, Lit) {
        let mut g = Aig::new("t");
        let ins: Vec<Lit> = (0..n).map(|i| g.add_input(&format!("i{i}"))).collect();
        let mut acc = Lit::TRUE;
        for &i in &ins {
            acc = g.and(acc, i);
        }
        g.add_output("y", acc);
        (g, acc)
    }

    #[test]
    fn forced_all_ones() {
        let (g, y) = wide_and(8);
        let out = satisfy(&g, &[y], &SearchConfig::default());
        assert_eq!(out, Outcome::Found(vec![true; 8]));
    }

    #[test]
    fn contradiction_is_exhausted() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, b);
        let y = g.and(!a, b);
        assert_eq!(
            satisfy(&g, &[x, y], &SearchConfig::default()),
            Outcome::NotFound(NotFound::Exhausted)
        );
        assert_eq!(
            satisfy(&g, &[a, !a], &SearchConfig::default()),
            Outcome::NotFound(NotFound::Exhausted)
        );
    }

    #[test]
    fn guided_search_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for round in 0..40 {
            let mut g = Aig::new("t");
            let mut pool: Vec<Lit> = (0..10).map(|i| g.add_input(&format!("i{i}"))).collect();
            for _ in 0..30 {
                let a = pool[rng.gen_range(0..pool.len())] ^ rng.gen_bool(0.5);
                let b = pool[rng.gen_range(0..pool.len())] ^ rng.gen_bool(0.5);
                let n = g.and(a, b);
                pool.push(n);
            }
            let targets: Vec<Lit> = (0..3)
                .map(|_| pool[rng.gen_range(10..pool.len())] ^ rng.gen_bool(0.5))
                .collect();
            let exact = satisfy(&g, &targets, &SearchConfig::default());
            let guided = satisfy(
                &g,
                &targets,
                &SearchConfig {
                    exhaustive_bound: 0,
                    budget: 1 << 20,
                    seed: round,
                },
            );
            assert_eq!(
                exact.found().is_some(),
                guided.found().is_some(),
                "round {round}"
            );
            if let Some(v) = guided.found() {
                assert!(holds(&g, &targets, v));
            }
        }
    }

    #[test]
    fn wide_cone_uses_guided_search() {
        let (g, y) = wide_and(40);
        let out = satisfy(&g, &[y], &SearchConfig::default());
        assert_eq!(out, Outcome::Found(vec![true; 40]));
    }

    #[test]
    fn lowest_index_hit_is_deterministic() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.or(a, b);
        // minterm 1 (a=1, b=0) is the first satisfying row
        assert_eq!(
            satisfy(&g, &[x], &SearchConfig::default()),
            Outcome::Found(vec![true, false])
        );
    }
}

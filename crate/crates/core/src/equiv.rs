//! Miter-based combinational equivalence checking.
//!
//! Circuits with at most `exhaustive_bound` primary inputs are compared on
//! every input vector, which is definitive. Wider circuits are compared on a
//! seeded random sample, which can only ever report "no mismatch found"; the
//! optional search mode then hands the miter to a [`Solver`] that may still
//! prove equivalence.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aig::{and_many, to_aig, to_aig_mapped, Aig, AigError, Lit, Node};
use crate::netlist::{Assignment, GateKind, NetId, Netlist, NetlistBuilder};
use crate::search::{self, Builtin, NotFound, Outcome, SearchConfig, Solver};
use crate::trojan::{trigger_lits, TrojanRecord};

/// Name of the miter's single output.
pub const MITER_OUTPUT: &str = "miter";

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("interfaces differ: {0}")]
    Interface(String),
    #[error("trojan record does not match the netlist: {0}")]
    Record(String),
    #[error(transparent)]
    Aig(#[from] AigError),
    #[error(transparent)]
    Netlist(#[from] crate::netlist::NetlistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivConfig {
    /// Circuits with at most this many inputs are checked exhaustively.
    pub exhaustive_bound: usize,
    /// Random vectors used above the bound.
    pub vectors: u64,
    pub seed: u64,
    /// Run the search engine on the miter after an inconclusive sample.
    pub search: bool,
    /// Backtrack budget for search mode.
    pub search_budget: u64,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            exhaustive_bound: search::EXHAUSTIVE_BOUND,
            vectors: 100_000,
            seed: 0,
            search: false,
            search_budget: search::DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EquivResult {
    Equivalent,
    /// Non-definitive: the sampled vectors all agreed.
    NoMismatchFound {
        vectors: u64,
    },
    Counterexample {
        inputs: Assignment,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivVerdict {
    pub mode: Mode,
    #[serde(flatten)]
    pub result: EquivResult,
    pub seed: u64,
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        self.result == EquivResult::Equivalent
    }

    pub fn counterexample(&self) -> Option<&Assignment> {
        match &self.result {
            EquivResult::Counterexample { inputs } => Some(inputs),
            _ => None,
        }
    }

    /// Process exit code: 0 equivalent, 1 counterexample, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.result {
            EquivResult::Equivalent => 0,
            EquivResult::Counterexample { .. } => 1,
            EquivResult::NoMismatchFound { .. } => 2,
        }
    }
}

fn check_ports(kind: &str, a: &[&str], b: &[&str]) -> Result<(), String> {
    if a == b {
        return Ok(());
    }
    let only_a: Vec<&str> = a.iter().filter(|x| !b.contains(x)).copied().collect();
    let only_b: Vec<&str> = b.iter().filter(|x| !a.contains(x)).copied().collect();
    if only_a.is_empty() && only_b.is_empty() {
        Err(format!("{kind} order differs"))
    } else {
        Err(format!(
            "{kind} only in first: [{}]; only in second: [{}]",
            only_a.join(", "),
            only_b.join(", ")
        ))
    }
}

fn interface(
    a_in: &[&str],
    a_out: &[&str],
    b_in: &[&str],
    b_out: &[&str],
) -> Result<(), EquivError> {
    let mut errs = Vec::new();
    if let Err(e) = check_ports("inputs", a_in, b_in) {
        errs.push(e);
    }
    if let Err(e) = check_ports("outputs", a_out, b_out) {
        errs.push(e);
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(EquivError::Interface(errs.join("; ")))
    }
}

fn names<T>(xs: &[(String, T)]) -> Vec<&str> {
    xs.iter().map(|(n, _)| n.as_str()).collect()
}

/// Builds the miter netlist: shared inputs, one XOR per output pair and an
/// OR chain reducing the differences to the single output `miter`.
pub fn build_miter(a: &Netlist, b: &Netlist) -> Result<Netlist, EquivError> {
    interface(
        &a.input_names(),
        &a.output_names(),
        &b.input_names(),
        &b.output_names(),
    )?;
    let mut m = NetlistBuilder::new(format!("miter_{}_{}", a.name(), b.name()));
    for &i in a.inputs() {
        m.add_input(a.net_name(i))
            .map_err(|e| EquivError::Interface(e.to_string()))?;
    }
    let copy = |src: &Netlist, prefix: &str, m: &mut NetlistBuilder| -> Vec<NetId> {
        let map: Vec<NetId> = (0..src.net_count())
            .map(|k| {
                let id = NetId(k as u32);
                if src.inputs().contains(&id) {
                    m.find(src.net_name(id)).expect("shared input")
                } else if let Some(v) = src.is_const(id) {
                    m.constant(v)
                } else {
                    m.net(&format!("{prefix}{}", src.net_name(id)))
                }
            })
            .collect();
        for g in src.gates() {
            let ins = g.inputs.iter().map(|i| map[i.index()]).collect();
            m.add_gate(
                g.kind,
                ins,
                map[g.output.index()],
                format!("{prefix}{}", g.name),
            );
        }
        src.outputs().iter().map(|o| map[o.index()]).collect()
    };
    let oa = copy(a, "a$", &mut m);
    let ob = copy(b, "b$", &mut m);
    let count = oa.len();
    let mut diffs = Vec::with_capacity(count);
    for (k, (x, y)) in oa.into_iter().zip(ob).enumerate() {
        let d = if count == 1 {
            m.net(MITER_OUTPUT)
        } else {
            m.net(&format!("diff${k}"))
        };
        m.add_gate(GateKind::Xor, vec![x, y], d, format!("xor${k}"));
        diffs.push(d);
    }
    let out = match diffs.len() {
        0 => {
            let z = m.constant(false);
            let o = m.net(MITER_OUTPUT);
            m.add_gate(GateKind::Buf, vec![z], o, "or$0");
            o
        }
        1 => diffs[0],
        n => {
            let mut acc = diffs[0];
            for (k, &d) in diffs[1..].iter().enumerate() {
                let o = if k + 2 == n {
                    m.net(MITER_OUTPUT)
                } else {
                    m.net(&format!("or${k}"))
                };
                m.add_gate(GateKind::Or, vec![acc, d], o, format!("or${k}"));
                acc = o;
            }
            acc
        }
    };
    m.mark_output(out);
    m.build().map_err(|e| EquivError::Interface(e.to_string()))
}

/// Miter of two AIGs with matching interfaces; the single output is 1 where
/// they disagree.
pub fn miter_aig(a: &Aig, b: &Aig) -> Result<Aig, EquivError> {
    interface(
        &names(a.inputs()),
        &names(a.outputs()),
        &names(b.inputs()),
        &names(b.outputs()),
    )?;
    let mut m = a.with_inputs_of();
    let mut diffs = Vec::new();
    let oa = copy_into(&mut m, a);
    let ob = copy_into(&mut m, b);
    for (x, y) in oa.into_iter().zip(ob) {
        diffs.push(m.xor(x, y));
    }
    let out = diffs.into_iter().fold(Lit::FALSE, |acc, d| m.or(acc, d));
    m.add_output(MITER_OUTPUT, out);
    Ok(m)
}

/// Copies `src` into `dst` (whose inputs match `src` by position) and
/// returns the literals of `src`'s outputs.
pub fn copy_into(dst: &mut Aig, src: &Aig) -> Vec<Lit> {
    let map = copy_nodes(dst, src);
    src.outputs()
        .iter()
        .map(|(_, l)| map[l.node() as usize] ^ l.is_complemented())
        .collect()
}

/// Copies every node of `src` into `dst`; returns the node map.
pub fn copy_nodes(dst: &mut Aig, src: &Aig) -> Vec<Lit> {
    let mut map = vec![Lit::TRUE; src.len()];
    for (i, n) in src.nodes().iter().enumerate() {
        map[i] = match *n {
            Node::Const => Lit::TRUE,
            Node::Input(p) => dst.input_lit(p as usize),
            Node::And(x, y) => {
                let fx = map[x.node() as usize] ^ x.is_complemented();
                let fy = map[y.node() as usize] ^ y.is_complemented();
                dst.and(fx, fy)
            }
        };
    }
    map
}

/// Decides whether the single miter output can be 1.
fn decide(m: &Aig, cfg: &EquivConfig, solver: &dyn Solver) -> (Mode, Result<bool, Vec<bool>>) {
    let target = m.outputs()[0].1;
    if m.input_count() <= cfg.exhaustive_bound {
        let scfg = SearchConfig {
            exhaustive_bound: cfg.exhaustive_bound,
            budget: cfg.search_budget,
            seed: cfg.seed,
        };
        return match search::satisfy(m, &[target], &scfg) {
            Outcome::Found(v) => (Mode::Exhaustive, Err(v)),
            Outcome::NotFound(_) => (Mode::Exhaustive, Ok(true)),
        };
    }
    if let Some(cex) = sample(m, target, cfg.vectors, cfg.seed) {
        return (Mode::Sampled, Err(cex));
    }
    if cfg.search {
        let scfg = SearchConfig {
            exhaustive_bound: 0,
            budget: cfg.search_budget,
            seed: cfg.seed,
        };
        return match solver.solve(m, &[target], &scfg) {
            Outcome::Found(v) => (Mode::Search, Err(v)),
            Outcome::NotFound(NotFound::Exhausted) => (Mode::Search, Ok(true)),
            Outcome::NotFound(NotFound::Budget) => (Mode::Search, Ok(false)),
        };
    }
    (Mode::Sampled, Ok(false))
}

/// Words of random stimulus generated from one RNG stream.
const STREAM_WORDS: u64 = 64;

/// Uniform random vectors for stream `s`; independent of thread scheduling.
pub fn random_words(seed: u64, stream: u64, inputs: usize, words: usize) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut rows = vec![vec![0u64; words]; inputs];
    for w in 0..words {
        for row in rows.iter_mut() {
            row[w] = rng.next_u64();
        }
    }
    rows
}

/// Looks for a vector setting `target` among `vectors` seeded random ones;
/// returns the first such vector in stream order.
pub fn sample(g: &Aig, target: Lit, vectors: u64, seed: u64) -> Option<Vec<bool>> {
    let words = vectors.div_ceil(64);
    let streams = words.div_ceil(STREAM_WORDS);
    (0..streams).into_par_iter().find_map_first(|s| {
        let first = s * STREAM_WORDS;
        let n = STREAM_WORDS.min(words - first) as usize;
        let rows = random_words(seed, s, g.input_count(), n);
        let mut scratch = Vec::new();
        let mut ins = vec![0u64; g.input_count()];
        for w in 0..n {
            for (k, row) in rows.iter().enumerate() {
                ins[k] = row[w];
            }
            g.eval_word_into(&ins, &mut scratch);
            let mut hit =
                scratch[target.node() as usize] ^ if target.is_complemented() { !0 } else { 0 };
            let index = (first + w as u64) * 64;
            if index + 64 > vectors {
                hit &= (1u64 << (vectors - index)) - 1;
            }
            if hit != 0 {
                let bit = hit.trailing_zeros();
                return Some(ins.iter().map(|x| (x >> bit) & 1 == 1).collect());
            }
        }
        None
    })
}

/// Counts the vectors, among `vectors` seeded random ones, that set `target`.
/// Uses the same stimulus streams as [`sample`].
pub fn count_true(g: &Aig, target: Lit, vectors: u64, seed: u64) -> u64 {
    let words = vectors.div_ceil(64);
    let streams = words.div_ceil(STREAM_WORDS);
    (0..streams)
        .into_par_iter()
        .map(|s| {
            let first = s * STREAM_WORDS;
            let n = STREAM_WORDS.min(words - first) as usize;
            let rows = random_words(seed, s, g.input_count(), n);
            let mut scratch = Vec::new();
            let mut ins = vec![0u64; g.input_count()];
            let mut count = 0u64;
            for w in 0..n {
                for (k, row) in rows.iter().enumerate() {
                    ins[k] = row[w];
                }
                g.eval_word_into(&ins, &mut scratch);
                let mut hit =
                    scratch[target.node() as usize] ^ if target.is_complemented() { !0 } else { 0 };
                let index = (first + w as u64) * 64;
                if index + 64 > vectors {
                    hit &= (1u64 << (vectors - index)) - 1;
                }
                count += hit.count_ones() as u64;
            }
            count
        })
        .sum()
}

fn verdict(
    mode: Mode,
    r: Result<bool, Vec<bool>>,
    cfg: &EquivConfig,
    names: &[&str],
) -> EquivVerdict {
    let result = match r {
        Ok(true) => EquivResult::Equivalent,
        Ok(false) => EquivResult::NoMismatchFound {
            vectors: cfg.vectors,
        },
        Err(v) => EquivResult::Counterexample {
            inputs: names
                .iter()
                .zip(v)
                .map(|(n, b)| (n.to_string(), b))
                .collect(),
        },
    };
    EquivVerdict {
        mode,
        result,
        seed: cfg.seed,
    }
}

/// Equivalence of two AIGs with the same interface.
pub fn check_aigs(a: &Aig, b: &Aig, cfg: &EquivConfig) -> Result<EquivVerdict, EquivError> {
    let m = miter_aig(a, b)?;
    let (mode, r) = decide(&m, cfg, &Builtin);
    if let Err(v) = &r {
        assert_ne!(
            a.eval_outputs(v),
            b.eval_outputs(v),
            "counterexample does not re-simulate to a mismatch"
        );
    }
    Ok(verdict(mode, r, cfg, &names(a.inputs())))
}

pub fn check_equivalence(
    a: &Netlist,
    b: &Netlist,
    cfg: &EquivConfig,
) -> Result<EquivVerdict, EquivError> {
    check_equivalence_with(a, b, cfg, &Builtin)
}

/// [`check_equivalence`] with a caller-supplied decision procedure for
/// search mode.
pub fn check_equivalence_with(
    a: &Netlist,
    b: &Netlist,
    cfg: &EquivConfig,
    solver: &dyn Solver,
) -> Result<EquivVerdict, EquivError> {
    interface(
        &a.input_names(),
        &a.output_names(),
        &b.input_names(),
        &b.output_names(),
    )?;
    let m = miter_aig(&to_aig(a)?, &to_aig(b)?)?;
    let (mode, r) = decide(&m, cfg, solver);
    if let Err(v) = &r {
        let (x, y) = (
            a.eval_outputs(v).expect("valid"),
            b.eval_outputs(v).expect("valid"),
        );
        assert_ne!(x, y, "counterexample does not re-simulate to a mismatch");
    }
    Ok(verdict(mode, r, cfg, &a.input_names()))
}

/// Why an infected netlist fails its Trojan record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum TrojanFailure {
    /// The circuits disagree on an input that leaves the trigger dormant.
    DormantDivergence { inputs: Assignment },
    /// The stored witness does not fire the trigger.
    WitnessInactive { inputs: Assignment },
    /// The stored witness fires the trigger but the outputs agree.
    WitnessAgrees { inputs: Assignment },
    /// No witness is stored.
    UnprovenHt,
}

impl std::fmt::Display for TrojanFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrojanFailure::DormantDivergence { .. } => {
                f.write_str("outputs differ while the trigger is dormant")
            }
            TrojanFailure::WitnessInactive { .. } => {
                f.write_str("witness does not fire the trigger")
            }
            TrojanFailure::WitnessAgrees { .. } => f.write_str("witness shows agreement"),
            TrojanFailure::UnprovenHt => f.write_str("unproven HT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrojanVerdict {
    /// How the dormant-agreement half was checked.
    pub mode: Mode,
    /// `false` when the dormant check was sampled and found nothing.
    pub definitive: bool,
    pub failure: Option<TrojanFailure>,
}

impl TrojanVerdict {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that `infected` matches `golden` whenever the trigger of `rec` is
/// dormant, and that the stored witness fires the trigger and flips an
/// output. The trigger condition is evaluated on `golden`, so a Trojan
/// whose trigger gate has been rewired shows up as dormant divergence.
pub fn check_trojan_semantics(
    golden: &Netlist,
    infected: &Netlist,
    rec: &TrojanRecord,
    cfg: &EquivConfig,
) -> Result<TrojanVerdict, EquivError> {
    interface(
        &golden.input_names(),
        &golden.output_names(),
        &infected.input_names(),
        &infected.output_names(),
    )?;
    let (ga, map) = to_aig_mapped(golden)?;
    let trig_lits =
        trigger_lits(golden, &map, rec).map_err(|e| EquivError::Record(e.to_string()))?;
    let mut m = miter_aig(&ga, &to_aig(infected)?)?;
    let diff = m.outputs()[0].1;
    // the miter's inputs match golden's, so golden's nodes copy over by position
    let gmap = copy_nodes(&mut m, &ga);
    let trig_in_m: Vec<Lit> = trig_lits
        .iter()
        .map(|l| gmap[l.node() as usize] ^ l.is_complemented())
        .collect();
    let fired = and_many(&mut m, trig_in_m);
    let dormant_diff = m.and(diff, !fired);
    let mut q = m.with_inputs_of();
    let mq = copy_nodes(&mut q, &m);
    q.add_output(
        "dormant_diff",
        mq[dormant_diff.node() as usize] ^ dormant_diff.is_complemented(),
    );

    let (mode, r) = decide(&q, cfg, &Builtin);
    let verdict = |failure, definitive| {
        Ok(TrojanVerdict {
            mode,
            definitive,
            failure,
        })
    };
    if let Err(v) = r {
        let (x, y) = (golden.eval_outputs(&v)?, infected.eval_outputs(&v)?);
        assert_ne!(
            x, y,
            "dormant counterexample does not re-simulate to a mismatch"
        );
        return verdict(
            Some(TrojanFailure::DormantDivergence {
                inputs: golden.stimulus(&v),
            }),
            true,
        );
    }
    let definitive = r == Ok(true);
    let Some(w) = &rec.witness else {
        return verdict(Some(TrojanFailure::UnprovenHt), definitive);
    };
    let g_vals = golden.simulate(w)?;
    if !rec
        .trigger
        .iter()
        .all(|t| g_vals.get(&t.net) == Some(t.polarity))
    {
        return verdict(
            Some(TrojanFailure::WitnessInactive { inputs: w.clone() }),
            definitive,
        );
    }
    let i_vals = infected.simulate(w)?;
    let differs = golden
        .output_names()
        .iter()
        .any(|o| g_vals.get(o) != i_vals.get(o));
    if !differs {
        return verdict(
            Some(TrojanFailure::WitnessAgrees { inputs: w.clone() }),
            definitive,
        );
    }
    verdict(None, definitive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    const FA: &str = "module fa(a, b, cin, sum, cout); input a, b, cin; output sum, cout; wire t1, t2, t3;
        xor x1(t1, a, b); xor x2(sum, t1, cin); and a1(t2, a, b); and a2(t3, t1, cin); or o1(cout, t2, t3); endmodule";

    #[test]
    fn miter_gate_count() {
        let a = parse_netlist(FA).unwrap();
        let m = build_miter(&a, &a).unwrap();
        assert_eq!(m.gate_count(), 5 + 5 + 2 + 1);
        assert_eq!(m.output_names(), vec![MITER_OUTPUT]);
        for v in 0..8u32 {
            let ins: Vec<bool> = (0..3).map(|i| v >> i & 1 == 1).collect();
            assert_eq!(m.eval_outputs(&ins).unwrap(), vec![false]);
        }
    }

    #[test]
    fn swapped_gate_is_caught() {
        let a = parse_netlist(FA).unwrap();
        let b = parse_netlist(&FA.replace("or o1", "and o1")).unwrap();
        let v = check_equivalence(&a, &b, &EquivConfig::default()).unwrap();
        assert_eq!(v.mode, Mode::Exhaustive);
        let cex = v.counterexample().unwrap();
        assert_ne!(
            a.simulate(cex).unwrap().get("cout"),
            b.simulate(cex).unwrap().get("cout")
        );
        assert_eq!(v.exit_code(), 1);
        assert!(check_equivalence(&a, &a, &EquivConfig::default())
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn renamed_port_is_interface_error() {
        let a = parse_netlist(FA).unwrap();
        let b = parse_netlist(&FA.replace("cout", "carry")).unwrap();
        let e = check_equivalence(&a, &b, &EquivConfig::default()).unwrap_err();
        assert!(e.to_string().contains("carry"), "{e}");
    }

    #[test]
    fn sampled_mode_above_bound() {
        let a = parse_netlist(FA).unwrap();
        let cfg = EquivConfig {
            exhaustive_bound: 2,
            vectors: 1000,
            ..Default::default()
        };
        let v = check_equivalence(&a, &a, &cfg).unwrap();
        assert_eq!(v.mode, Mode::Sampled);
        assert_eq!(v.result, EquivResult::NoMismatchFound { vectors: 1000 });
        let v = check_equivalence(
            &a,
            &a,
            &EquivConfig {
                search: true,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!((v.mode, v.is_equivalent()), (Mode::Search, true));
    }
}

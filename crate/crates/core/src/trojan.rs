//! Combinational hardware-Trojan insertion.
//!
//! A Trojan is a trigger (an AND over `q` existing nets, each inverted as
//! needed so the gate fires on the nets' rare values) and a payload that XORs
//! the trigger into one victim net. Every insertion is certified by a
//! witness: an input vector that fires the trigger and makes the flip visible
//! at a primary output.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aig::{and_many, to_aig, to_aig_mapped, AigError, Lit};
use crate::analysis::{
    exact_signal_prob, rare_nets, scoap, signal_prob, AnalysisError, Metric, RareSource,
};
use crate::equiv::{count_true, miter_aig};
use crate::netlist::{Assignment, Driver, GateKind, NetId, Netlist, NetlistBuilder, NetlistError};
use crate::search::{satisfy, NotFound, Outcome, SearchConfig};
use crate::seed;

/// Below this many inputs rarity is computed exactly instead of sampled.
const EXACT_RARITY_INPUTS: usize = 16;

#[derive(Debug, Error)]
pub enum TrojanError {
    #[error("invalid trojan spec: {0}")]
    Spec(String),
    #[error("need {needed} rare nets under {metric} but only {available} qualify")]
    InsufficientRare {
        needed: usize,
        available: usize,
        metric: Metric,
    },
    #[error("trigger width {q} exceeds the {nets} usable nets")]
    TooFewNets { q: usize, nets: usize },
    #[error("victim `{0}` is in the trigger's fanin: combinational loop")]
    CombinationalLoop(String),
    #[error("no loop-free victim with a path to an output")]
    NoVictim,
    #[error("no activatable trigger found in {0} attempts")]
    NotActivatable(usize),
    #[error("unknown net `{0}`")]
    UnknownNet(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Aig(#[from] AigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadKind {
    /// XOR the trigger into the victim net.
    #[default]
    XorFlip,
}

fn default_threshold() -> f64 {
    0.05
}

fn default_vectors() -> u64 {
    100_000
}

fn default_attempts() -> usize {
    32
}

fn default_budget() -> u64 {
    crate::search::DEFAULT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrojanSpec {
    /// Trigger width.
    pub q: usize,
    /// How many trigger nets come from the rare set; the rest are regular.
    pub p: usize,
    pub metric: Metric,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub payload: PayloadKind,
    pub seed: u64,
    /// Random vectors for signal-probability estimates.
    #[serde(default = "default_vectors")]
    pub vectors: u64,
    /// Trigger/victim draws tried before giving up.
    #[serde(default = "default_attempts")]
    pub attempts: usize,
    /// Backtrack budget for witness search.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Fixed trigger nets instead of a random draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<Vec<String>>,
    /// Fixed victim instead of a random draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim: Option<String>,
}

impl TrojanSpec {
    /// All trigger nets rare under `signal-prob-low` at θ = 0.05.
    pub fn new(q: usize, seed: u64) -> Self {
        TrojanSpec {
            q,
            p: q,
            metric: Metric::SignalProbLow,
            threshold: default_threshold(),
            payload: PayloadKind::XorFlip,
            seed,
            vectors: default_vectors(),
            attempts: default_attempts(),
            budget: default_budget(),
            trigger: None,
            victim: None,
        }
    }

    pub fn validate(&self) -> Result<(), TrojanError> {
        if self.q < 2 {
            return Err(TrojanError::Spec(format!(
                "trigger width q = {} must be at least 2",
                self.q
            )));
        }
        if self.p > self.q {
            return Err(TrojanError::Spec(format!(
                "rare count p = {} exceeds q = {}",
                self.p, self.q
            )));
        }
        if !self.threshold.is_finite() {
            return Err(TrojanError::Spec("threshold must be finite".into()));
        }
        if self.attempts == 0 || self.vectors == 0 {
            return Err(TrojanError::Spec(
                "attempts and vectors must be positive".into(),
            ));
        }
        if let Some(t) = &self.trigger {
            if t.len() != self.q {
                return Err(TrojanError::Spec(format!(
                    "{} trigger nets given for q = {}",
                    t.len(),
                    self.q
                )));
            }
            if t.iter().collect::<HashSet<_>>().len() != t.len() {
                return Err(TrojanError::Spec("trigger nets repeat".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerNet {
    pub net: String,
    /// Value the net must take for the trigger to fire.
    pub polarity: bool,
}

/// Everything needed to locate, re-verify and score an inserted Trojan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrojanRecord {
    pub trigger: Vec<TriggerNet>,
    /// Number of trigger nets drawn from the rare set.
    pub rare_count: usize,
    /// Net driven by the trigger AND.
    pub trigger_output: String,
    pub victim: String,
    pub payload_gate: String,
    /// Net that now carries the victim's original function.
    pub payload_input: String,
    /// Fires the trigger and makes the flip visible at an output.
    pub witness: Option<Assignment>,
    pub added_gates: Vec<String>,
    /// `(from net, to gate)` for every pin of an added gate.
    pub added_edges: Vec<(String, String)>,
}

impl TrojanRecord {
    pub fn is_proven(&self) -> bool {
        self.witness.is_some()
    }
}

/// Outcome of a witness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Found(Assignment),
    NotFound(NotFound),
}

/// Trigger-condition literals of `rec` in an AIG built from `n`.
pub(crate) fn trigger_lits(
    n: &Netlist,
    map: &[Lit],
    rec: &TrojanRecord,
) -> Result<Vec<Lit>, TrojanError> {
    rec.trigger
        .iter()
        .map(|t| {
            let id = n
                .find(&t.net)
                .ok_or_else(|| TrojanError::UnknownNet(t.net.clone()))?;
            Ok(map[id.index()] ^ !t.polarity)
        })
        .collect()
}

fn assignment(n: &Netlist, bits: &[bool]) -> Assignment {
    n.stimulus(bits)
}

/// Searches for inputs that drive every trigger net of `rec` to its
/// polarity: exhaustively when the trigger cone has at most 24 inputs,
/// otherwise by guided backtracking within `budget`.
pub fn find_trigger_witness(
    n: &Netlist,
    rec: &TrojanRecord,
    budget: u64,
) -> Result<Witness, TrojanError> {
    let (g, map) = to_aig_mapped(n)?;
    let targets = trigger_lits(n, &map, rec)?;
    let cfg = SearchConfig {
        budget,
        ..SearchConfig::default()
    };
    Ok(match satisfy(&g, &targets, &cfg) {
        Outcome::Found(v) => Witness::Found(assignment(n, &v)),
        Outcome::NotFound(r) => Witness::NotFound(r),
    })
}

/// Fraction of seeded random vectors that fire the trigger of `rec` in `n`.
pub fn activation_estimate(
    n: &Netlist,
    rec: &TrojanRecord,
    vectors: u64,
    seed: u64,
) -> Result<f64, TrojanError> {
    if vectors == 0 {
        return Err(TrojanError::Spec("at least one vector is required".into()));
    }
    let (mut g, map) = to_aig_mapped(n)?;
    let lits = trigger_lits(n, &map, rec)?;
    let t = and_many(&mut g, lits);
    Ok(count_true(&g, t, vectors, seed) as f64 / vectors as f64)
}

struct Rarity {
    rare: Vec<NetId>,
    regular: Vec<NetId>,
    rare_value: Vec<bool>,
}

fn rarity(n: &Netlist, spec: &TrojanSpec) -> Result<Rarity, TrojanError> {
    let usable =
        |id: &NetId| matches!(n.nets()[id.index()].driver, Driver::Input | Driver::Gate(_));
    match spec.metric {
        Metric::ScoapHard => {
            let sc = scoap(n)?;
            let part = rare_nets(n, RareSource::Scoap(&sc), spec.metric, spec.threshold)?;
            Ok(Rarity {
                rare: part.rare.iter().map(|r| r.net).filter(usable).collect(),
                regular: part.regular.into_iter().filter(usable).collect(),
                rare_value: (0..n.net_count()).map(|i| sc.cc1[i] >= sc.cc0[i]).collect(),
            })
        }
        _ => {
            let st = if n.inputs().len() <= EXACT_RARITY_INPUTS {
                exact_signal_prob(n)?
            } else {
                signal_prob(n, spec.vectors, seed::derive(spec.seed, "signal-prob", 0))?
            };
            // exactly constant functions can never fire on their rare value
            let live = |id: &NetId| !st.exact || (st.p[id.index()] > 0.0 && st.p[id.index()] < 1.0);
            let part = rare_nets(n, RareSource::Stats(&st), spec.metric, spec.threshold)?;
            Ok(Rarity {
                rare: part
                    .rare
                    .iter()
                    .map(|r| r.net)
                    .filter(usable)
                    .filter(live)
                    .collect(),
                regular: part
                    .regular
                    .into_iter()
                    .filter(usable)
                    .filter(live)
                    .collect(),
                rare_value: (0..n.net_count()).map(|i| st.rare_value(i)).collect(),
            })
        }
    }
}

fn build_infected(
    n: &Netlist,
    trigger: &[(NetId, bool)],
    victim: NetId,
) -> Result<(Netlist, TrojanRecord), TrojanError> {
    let mut b = NetlistBuilder::from_netlist(n.clone());
    let mut added_gates = Vec::new();
    let mut added_edges = Vec::new();
    let mut and_ins = Vec::with_capacity(trigger.len());
    for &(net, pol) in trigger {
        if pol {
            and_ins.push(net);
        } else {
            let w = b.fresh_wire("ht_n");
            let name = b.fresh_gate_name("ht_inv");
            b.add_gate(GateKind::Not, vec![net], w, name.clone());
            added_edges.push((n.net_name(net).to_string(), name.clone()));
            added_gates.push(name);
            and_ins.push(w);
        }
    }
    let trig = b.fresh_wire("ht_trig");
    let and_name = b.fresh_gate_name("ht_and");
    for &i in &and_ins {
        added_edges.push((b.netlist().net_name(i).to_string(), and_name.clone()));
    }
    b.add_gate(GateKind::And, and_ins, trig, and_name.clone());
    added_gates.push(and_name);

    let pre_name = b.fresh_net_name("ht_pre");
    let pre = b.split_driver(victim, &pre_name)?;
    let xor_name = b.fresh_gate_name("ht_xor");
    b.add_gate(GateKind::Xor, vec![pre, trig], victim, xor_name.clone());
    let trig_name = b.netlist().net_name(trig).to_string();
    let pre_name = b.netlist().net_name(pre).to_string();
    added_edges.push((pre_name.clone(), xor_name.clone()));
    added_edges.push((trig_name.clone(), xor_name.clone()));
    added_gates.push(xor_name.clone());
    let infected = b.build()?;
    let rec = TrojanRecord {
        trigger: trigger
            .iter()
            .map(|&(id, pol)| TriggerNet {
                net: n.net_name(id).to_string(),
                polarity: pol,
            })
            .collect(),
        rare_count: 0,
        trigger_output: trig_name,
        victim: n.net_name(victim).to_string(),
        payload_gate: xor_name,
        payload_input: pre_name,
        witness: None,
        added_gates,
        added_edges,
    };
    Ok((infected, rec))
}

/// Inserts one Trojan into `n`.
///
/// Draws `p` trigger nets from the rare set and `q - p` from the regular
/// set, then a victim outside the trigger's fanin that reaches an output.
/// Draws whose trigger cannot fire, or whose flip can never reach an output,
/// are discarded and redrawn. When the witness search runs out of budget the
/// Trojan is returned unproven (`witness: None`).
pub fn insert_trojan(
    n: &Netlist,
    spec: &TrojanSpec,
) -> Result<(Netlist, TrojanRecord), TrojanError> {
    spec.validate()?;
    let usable = n
        .nets()
        .iter()
        .filter(|net| matches!(net.driver, Driver::Input | Driver::Gate(_)))
        .count();
    if spec.q >= usable {
        return Err(TrojanError::TooFewNets {
            q: spec.q,
            nets: usable,
        });
    }
    let r = rarity(n, spec)?;
    let fixed: Option<Vec<NetId>> = match &spec.trigger {
        Some(names) => Some(
            names
                .iter()
                .map(|s| n.find(s).ok_or_else(|| TrojanError::UnknownNet(s.clone())))
                .collect::<Result<_, _>>()?,
        ),
        None => {
            if r.rare.len() < spec.p {
                return Err(TrojanError::InsufficientRare {
                    needed: spec.p,
                    available: r.rare.len(),
                    metric: spec.metric,
                });
            }
            if r.regular.len() < spec.q - spec.p {
                return Err(TrojanError::TooFewNets {
                    q: spec.q,
                    nets: r.rare.len() + r.regular.len(),
                });
            }
            None
        }
    };
    let fixed_victim = spec
        .victim
        .as_ref()
        .map(|s| n.find(s).ok_or_else(|| TrojanError::UnknownNet(s.clone())))
        .transpose()?;

    let golden = to_aig(n)?;
    let (gm, map) = to_aig_mapped(n)?;
    let reach = n.reaches_output();
    let rare_set: HashSet<NetId> = r.rare.iter().copied().collect();
    let mut unproven = None;
    let mut victim_missing = false;
    for attempt in 0..spec.attempts {
        let mut rng = seed::rng(spec.seed, "trojan", attempt as u64);
        let mut nets: Vec<NetId> = match &fixed {
            Some(f) => f.clone(),
            None => {
                let mut v: Vec<NetId> = r.rare.choose_multiple(&mut rng, spec.p).copied().collect();
                v.extend(
                    r.regular
                        .choose_multiple(&mut rng, spec.q - spec.p)
                        .copied(),
                );
                v
            }
        };
        nets.sort();
        let trigger: Vec<(NetId, bool)> = nets
            .iter()
            .map(|&id| (id, r.rare_value[id.index()]))
            .collect();
        let cfg = SearchConfig {
            budget: spec.budget,
            seed: seed::derive(spec.seed, "witness", attempt as u64),
            ..Default::default()
        };
        let targets: Vec<Lit> = trigger
            .iter()
            .map(|&(id, pol)| map[id.index()] ^ !pol)
            .collect();
        match satisfy(&gm, &targets, &cfg) {
            Outcome::NotFound(NotFound::Exhausted) if fixed.is_none() => continue,
            Outcome::NotFound(NotFound::Exhausted) => return Err(TrojanError::NotActivatable(1)),
            _ => {}
        }

        let tfi = n.transitive_fanin(&nets);
        let victim = match fixed_victim {
            Some(v) if tfi[v.index()] => {
                return Err(TrojanError::CombinationalLoop(n.net_name(v).to_string()))
            }
            Some(v)
                if !matches!(n.nets()[v.index()].driver, Driver::Gate(_)) || !reach[v.index()] =>
            {
                return Err(TrojanError::NoVictim)
            }
            Some(v) => v,
            None => {
                let cands: Vec<NetId> = (0..n.net_count())
                    .map(|i| NetId(i as u32))
                    .filter(|id| {
                        !tfi[id.index()]
                            && reach[id.index()]
                            && matches!(n.nets()[id.index()].driver, Driver::Gate(_))
                    })
                    .collect();
                match cands.choose(&mut rng) {
                    Some(&v) => v,
                    None => {
                        victim_missing = true;
                        continue;
                    }
                }
            }
        };

        let (infected, mut rec) = build_infected(n, &trigger, victim)?;
        rec.rare_count = nets.iter().filter(|id| rare_set.contains(id)).count();
        let m = miter_aig(&golden, &to_aig(&infected)?).expect("insertion keeps the interface");
        match satisfy(&m, &[m.outputs()[0].1], &cfg) {
            Outcome::Found(v) => {
                rec.witness = Some(assignment(n, &v));
                return Ok((infected, rec));
            }
            Outcome::NotFound(NotFound::Budget) => {
                if unproven.is_none() {
                    unproven = Some((infected, rec));
                }
            }
            Outcome::NotFound(NotFound::Exhausted) => {}
        }
        if fixed.is_some() && fixed_victim.is_some() {
            break;
        }
    }
    match unproven {
        Some(u) => Ok(u),
        None if victim_missing => Err(TrojanError::NoVictim),
        None => Err(TrojanError::NotActivatable(spec.attempts)),
    }
}

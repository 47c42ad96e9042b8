//! Seeded random combinational netlists for tests, examples and stress runs.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netlist::{eval_gate_word, GateKind, NetId, Netlist, NetlistBuilder};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub inputs: usize,
    pub gates: usize,
    /// Upper bound on primary outputs; sinks are promoted first.
    pub outputs: usize,
    pub max_fanin: usize,
    /// Relative weight of each gate kind.
    pub weights: Vec<(GateKind, u32)>,
    /// Chance that a fanin is drawn from the eight most recent nets rather
    /// than uniformly. High values give deep, chained logic.
    #[serde(default = "default_recent_bias")]
    pub recent_bias: f64,
}

fn default_recent_bias() -> f64 {
    0.5
}

impl RandomSpec {
    /// All eight kinds, two- and three-input gates.
    pub fn mixed(inputs: usize, gates: usize) -> Self {
        RandomSpec {
            inputs,
            gates,
            outputs: 8,
            max_fanin: 3,
            weights: vec![
                (GateKind::And, 4),
                (GateKind::Or, 4),
                (GateKind::Nand, 3),
                (GateKind::Nor, 3),
                (GateKind::Xor, 2),
                (GateKind::Xnor, 1),
                (GateKind::Not, 2),
                (GateKind::Buf, 1),
            ],
            recent_bias: default_recent_bias(),
        }
    }

    /// AND/OR-dominated logic, which produces many low-probability nets.
    pub fn control(inputs: usize, gates: usize) -> Self {
        RandomSpec {
            inputs,
            gates,
            outputs: 16,
            max_fanin: 3,
            weights: vec![
                (GateKind::And, 5),
                (GateKind::Or, 3),
                (GateKind::Nor, 2),
                (GateKind::Nand, 2),
                (GateKind::Not, 1),
                (GateKind::Xor, 1),
            ],
            recent_bias: default_recent_bias(),
        }
    }

    /// Shallow AND-heavy logic over many inputs with uniformly drawn
    /// fanins, so rare nets tend to sit in separate cones.
    pub fn wide(inputs: usize, gates: usize) -> Self {
        RandomSpec {
            inputs,
            gates,
            outputs: 32,
            max_fanin: 3,
            weights: vec![
                (GateKind::And, 6),
                (GateKind::Nor, 2),
                (GateKind::Or, 2),
                (GateKind::Nand, 1),
                (GateKind::Not, 1),
            ],
            recent_bias: 0.0,
        }
    }
}

/// Random vectors used to steer away from constant gates.
const SIG_WORDS: usize = 4;
const REDRAWS: usize = 8;

pub fn random_netlist(spec: &RandomSpec, seed: u64) -> Netlist {
    let mut rng = seed::rng(seed, "random-netlist", 0);
    let mut b = NetlistBuilder::new(format!("rand{seed}"));
    let mut nets: Vec<NetId> = (0..spec.inputs)
        .map(|i| b.add_input(&format!("x{i}")).expect("fresh"))
        .collect();
    let mut used = vec![false; spec.inputs];
    let mut sigs: Vec<[u64; SIG_WORDS]> = (0..spec.inputs)
        .map(|_| std::array::from_fn(|_| rng.gen::<u64>()))
        .collect();
    let total: u32 = spec.weights.iter().map(|w| w.1).sum();
    for k in 0..spec.gates {
        let mut pick = rng.gen_range(0..total);
        let kind = spec
            .weights
            .iter()
            .find(|(_, w)| {
                if pick < *w {
                    true
                } else {
                    pick -= w;
                    false
                }
            })
            .expect("weights sum")
            .0;
        let arity = if kind.is_unary() {
            1
        } else {
            rng.gen_range(2..=spec.max_fanin.max(2))
        };
        let mut ins = Vec::with_capacity(arity);
        let mut value = [0u64; SIG_WORDS];
        // redraw fanins a few times when the gate would be constant on the
        // sampled vectors
        for _ in 0..REDRAWS {
            ins.clear();
            while ins.len() < arity {
                // favour recent nets so the circuit gains depth
                let idx = if rng.gen_bool(spec.recent_bias) {
                    nets.len() - 1 - rng.gen_range(0..nets.len().min(8))
                } else {
                    rng.gen_range(0..nets.len())
                };
                if !ins.contains(&idx) || nets.len() < arity {
                    ins.push(idx);
                }
            }
            for (w, v) in value.iter_mut().enumerate() {
                let words: Vec<u64> = ins.iter().map(|&i| sigs[i][w]).collect();
                *v = eval_gate_word(kind, &words);
            }
            if value.iter().any(|&v| v != 0) && value.iter().any(|&v| v != !0) {
                break;
            }
        }
        for &i in &ins {
            used[i] = true;
        }
        sigs.push(value);
        let ins: Vec<NetId> = ins.into_iter().map(|i| nets[i]).collect();
        let out = b.add_wire(&format!("w{k}")).expect("fresh");
        b.add_gate(kind, ins, out, format!("u{k}"));
        nets.push(out);
        used.push(false);
    }
    let mut sinks: Vec<NetId> = (spec.inputs..nets.len())
        .filter(|&i| !used[i])
        .map(|i| nets[i])
        .collect();
    sinks.reverse();
    sinks.truncate(spec.outputs.max(1));
    if sinks.is_empty() {
        sinks.push(*nets.last().expect("nonempty"));
    }
    let mut extra: Vec<NetId> = nets[spec.inputs..].to_vec();
    extra.shuffle(&mut rng);
    for n in extra {
        if sinks.len() >= spec.outputs.min(2).max(1) {
            break;
        }
        if !sinks.contains(&n) {
            sinks.push(n);
        }
    }
    for (k, o) in sinks.into_iter().enumerate() {
        let name = format!("y{k}");
        let y = b.add_wire(&name).expect("fresh");
        b.add_gate(GateKind::Buf, vec![o], y, format!("ob{k}"));
        b.mark_output(y);
    }
    b.build().expect("generator produces valid netlists")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_and_deterministic() {
        for s in 0..20 {
            let spec = RandomSpec::mixed(6 + s as usize % 6, 20 + 9 * s as usize);
            let a = random_netlist(&spec, s);
            assert!(a.is_valid());
            assert_eq!(a, random_netlist(&spec, s));
            assert_eq!(a.inputs().len(), spec.inputs);
        }
    }
}

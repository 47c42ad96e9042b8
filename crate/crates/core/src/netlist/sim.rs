//! Bit-parallel netlist evaluation: 64 stimuli per `u64` word.

use super::{Driver, GateKind, Netlist, NetlistError};

/// Scalar gate semantics. Multi-input gates are left folds of the 2-input function.
pub fn eval_gate(kind: GateKind, inputs: &[bool]) -> bool {
    let w: Vec<u64> = inputs.iter().map(|&b| b as u64).collect();
    eval_gate_word(kind, &w) & 1 == 1
}

/// Word-level gate semantics.
pub fn eval_gate_word(kind: GateKind, inputs: &[u64]) -> u64 {
    let fold = |f: fn(u64, u64) -> u64| inputs[1..].iter().fold(inputs[0], |acc, &x| f(acc, x));
    match kind {
        GateKind::Buf => inputs[0],
        GateKind::Not => !inputs[0],
        GateKind::And => fold(|a, b| a & b),
        GateKind::Or => fold(|a, b| a | b),
        GateKind::Xor => fold(|a, b| a ^ b),
        GateKind::Nand => !fold(|a, b| a & b),
        GateKind::Nor => !fold(|a, b| a | b),
        GateKind::Xnor => !fold(|a, b| a ^ b),
    }
}

#[derive(Debug, Clone)]
struct Op {
    kind: GateKind,
    out: u32,
    ins: std::ops::Range<u32>,
}

/// A netlist compiled into a topologically ordered op list.
#[derive(Debug, Clone)]
pub struct PackedSim {
    net_count: usize,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    consts: Vec<(u32, bool)>,
    ops: Vec<Op>,
    pins: Vec<u32>,
}

impl PackedSim {
    pub fn new(n: &Netlist) -> Result<PackedSim, NetlistError> {
        let order = n.topo_gates()?;
        let mut ops = Vec::with_capacity(order.len());
        let mut pins = Vec::new();
        for gi in order {
            let g = &n.gates()[gi];
            let start = pins.len() as u32;
            pins.extend(g.inputs.iter().map(|i| i.0));
            ops.push(Op {
                kind: g.kind,
                out: g.output.0,
                ins: start..pins.len() as u32,
            });
        }
        let consts = n
            .nets()
            .iter()
            .enumerate()
            .filter_map(|(i, net)| match net.driver {
                Driver::Const(v) => Some((i as u32, v)),
                _ => None,
            })
            .collect();
        Ok(PackedSim {
            net_count: n.net_count(),
            inputs: n.inputs().iter().map(|i| i.0).collect(),
            outputs: n.outputs().iter().map(|i| i.0).collect(),
            consts,
            ops,
            pins,
        })
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn net_count(&self) -> usize {
        self.net_count
    }

    /// Evaluates one word per input into `values` (one word per net).
    /// Undriven nets evaluate to 0.
    pub fn eval_into(&self, inputs: &[u64], values: &mut Vec<u64>) -> Result<(), NetlistError> {
        if inputs.len() != self.inputs.len() {
            return Err(NetlistError::WidthMismatch {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        values.clear();
        values.resize(self.net_count, 0);
        for (&i, &w) in self.inputs.iter().zip(inputs) {
            values[i as usize] = w;
        }
        for &(i, v) in &self.consts {
            values[i as usize] = if v { !0 } else { 0 };
        }
        let mut buf: Vec<u64> = Vec::with_capacity(8);
        for op in &self.ops {
            let pins = &self.pins[op.ins.start as usize..op.ins.end as usize];
            let r = match (op.kind, pins) {
                (GateKind::Buf, [a]) => values[*a as usize],
                (GateKind::Not, [a]) => !values[*a as usize],
                (GateKind::And, [a, b]) => values[*a as usize] & values[*b as usize],
                (GateKind::Or, [a, b]) => values[*a as usize] | values[*b as usize],
                (GateKind::Xor, [a, b]) => values[*a as usize] ^ values[*b as usize],
                (GateKind::Nand, [a, b]) => !(values[*a as usize] & values[*b as usize]),
                (GateKind::Nor, [a, b]) => !(values[*a as usize] | values[*b as usize]),
                (GateKind::Xnor, [a, b]) => !(values[*a as usize] ^ values[*b as usize]),
                (kind, pins) => {
                    buf.clear();
                    buf.extend(pins.iter().map(|&p| values[p as usize]));
                    eval_gate_word(kind, &buf)
                }
            };
            values[op.out as usize] = r;
        }
        Ok(())
    }

    pub fn eval_word(&self, inputs: &[u64]) -> Result<Vec<u64>, NetlistError> {
        let mut v = Vec::new();
        self.eval_into(inputs, &mut v)?;
        Ok(v)
    }

    /// Output words by port position.
    pub fn outputs_of(&self, values: &[u64]) -> Vec<u64> {
        self.outputs.iter().map(|&o| values[o as usize]).collect()
    }
}

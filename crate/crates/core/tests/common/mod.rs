//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigUint;
use trojan_forge::analysis::{scoap, SCOAP_CAP};
use trojan_forge::netlist::{eval_gate, Driver, GateKind, NetId, Netlist, NetlistBuilder, PackedSim};
use trojan_forge::trojan::TrojanRecord;

pub const CAP: u64 = SCOAP_CAP as u64;

pub const MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Every net's value on every input vector, one row of words per net.
pub fn all_vectors(n: &Netlist) -> Vec<Vec<u64>> {
    let pis = n.inputs().len();
    assert!(pis <= 16);
    let sim = PackedSim::new(n).unwrap();
    let mut rows = vec![Vec::new(); n.net_count()];
    for w in 0..1u64 << pis.saturating_sub(6) {
        let ins: Vec<u64> = (0..pis)
            .map(|i| {
                if i < 6 {
                    MASKS[i]
                } else if (w >> (i - 6)) & 1 == 1 {
                    !0
                } else {
                    0
                }
            })
            .collect();
        for (r, v) in rows.iter_mut().zip(sim.eval_word(&ins).unwrap()) {
            r.push(v);
        }
    }
    rows
}

/// SCOAP from the definitions: a gate input may be left unassigned (cost 0)
/// when the output value does not depend on it; CO requires every other
/// input of the gate to hold a value that lets the pin through.
pub struct Oracle<'a> {
    n: &'a Netlist,
    cc: HashMap<usize, (u64, u64)>,
    co: HashMap<usize, u64>,
    loads: Vec<Vec<(usize, usize)>>,
}

impl<'a> Oracle<'a> {
    pub fn new(n: &'a Netlist) -> Self {
        let mut loads = vec![Vec::new(); n.net_count()];
        for (gi, g) in n.gates().iter().enumerate() {
            for (pin, i) in g.inputs.iter().enumerate() {
                loads[i.index()].push((gi, pin));
            }
        }
        Oracle { n, cc: HashMap::new(), co: HashMap::new(), loads }
    }

    pub fn cc(&mut self, net: usize) -> (u64, u64) {
        if let Some(&v) = self.cc.get(&net) {
            return v;
        }
        let v = match self.n.nets()[net].driver {
            Driver::Input => (1, 1),
            Driver::Const(false) => (1, CAP),
            Driver::Const(true) => (CAP, 1),
            Driver::Undriven => (CAP, CAP),
            Driver::Gate(gi) => {
                let g = self.n.gates()[gi].clone();
                let ins: Vec<(u64, u64)> = g.inputs.iter().map(|i| self.cc(i.index())).collect();
                let k = ins.len();
                let mut best = [CAP, CAP];
                // each input 0, 1 or unassigned
                for code in 0..3usize.pow(k as u32) {
                    let mut c = code;
                    let mut cost = 0u64;
                    let mut free = Vec::new();
                    let mut vals = vec![false; k];
                    for (j, &(c0, c1)) in ins.iter().enumerate() {
                        match c % 3 {
                            0 => cost += c0,
                            1 => {
                                cost += c1;
                                vals[j] = true
                            }
                            _ => free.push(j),
                        }
                        c /= 3;
                    }
                    let outs: Vec<bool> = (0..1usize << free.len())
                        .map(|m| {
                            let mut v = vals.clone();
                            for (b, &j) in free.iter().enumerate() {
                                v[j] = m >> b & 1 == 1;
                            }
                            eval_gate(g.kind, &v)
                        })
                        .collect();
                    if outs.iter().all(|&o| o == outs[0]) {
                        let slot = &mut best[outs[0] as usize];
                        *slot = (*slot).min(cost);
                    }
                }
                ((best[0] + 1).min(CAP), (best[1] + 1).min(CAP))
            }
        };
        self.cc.insert(net, v);
        v
    }

    pub fn co(&mut self, net: usize) -> u64 {
        if let Some(&v) = self.co.get(&net) {
            return v;
        }
        let mut best = if self.n.outputs().contains(&NetId(net as u32)) { 0 } else { CAP };
        for (gi, pin) in self.loads[net].clone() {
            let g = self.n.gates()[gi].clone();
            let out = self.co(g.output.index());
            if out >= CAP {
                continue;
            }
            let others: Vec<usize> = (0..g.inputs.len()).filter(|&j| j != pin).collect();
            let mut side = CAP;
            for m in 0..1usize << others.len() {
                let mut v = vec![false; g.inputs.len()];
                let mut cost = 0;
                for (b, &j) in others.iter().enumerate() {
                    v[j] = m >> b & 1 == 1;
                    let (c0, c1) = self.cc(g.inputs[j].index());
                    cost += if v[j] { c1 } else { c0 };
                }
                v[pin] = false;
                let lo = eval_gate(g.kind, &v);
                v[pin] = true;
                if eval_gate(g.kind, &v) != lo {
                    side = side.min(cost);
                }
            }
            best = best.min((out + side + 1).min(CAP));
        }
        self.co.insert(net, best);
        best
    }
}

pub fn assert_matches_oracle(n: &Netlist) {
    let s = scoap(n).unwrap();
    let mut o = Oracle::new(n);
    for i in 0..n.net_count() {
        let (c0, c1) = o.cc(i);
        let name = n.net_name(NetId(i as u32));
        assert_eq!((s.cc0[i] as u64, s.cc1[i] as u64), (c0, c1), "controllability of {name}");
        assert_eq!(s.co[i] as u64, o.co(i), "observability of {name}");
    }
}

/// Counts trigger choices by listing every subset of the nets of each
/// circuit with 2..=M members.
pub fn brute_force_space(circuits: &[(u64, u64)], m: u64) -> u64 {
    let mut total = 0;
    for &(r, g) in circuits {
        let nets = r + g;
        for mask in 0u64..1 << nets {
            let size = mask.count_ones() as u64;
            if (2..=m).contains(&size) {
                total += 1;
            }
        }
    }
    total
}

/// E[L] by listing every hiding set and every query order.
pub fn brute_force_game(n: usize, k: usize) -> f64 {
    fn perms(items: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
        if at == items.len() {
            out.push(items.clone());
            return;
        }
        for i in at..items.len() {
            items.swap(at, i);
            perms(items, at + 1, out);
            items.swap(at, i);
        }
    }
    let mut orders = Vec::new();
    perms(&mut (0..n).collect(), 0, &mut orders);
    let (mut sum, mut count) = (0u64, 0u64);
    for hide in 0u32..1 << n {
        if hide.count_ones() as usize != k {
            continue;
        }
        for o in &orders {
            let mut left = k;
            for (step, &q) in o.iter().enumerate() {
                if hide >> q & 1 == 1 {
                    left -= 1;
                    if left == 0 {
                        sum += step as u64 + 1;
                        break;
                    }
                }
            }
            count += 1;
        }
    }
    sum as f64 / count as f64
}

pub fn pascal(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u32)]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![BigUint::from(1u32); i + 1];
        for k in 1..i {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// Golden with the victim unconditionally inverted.
pub fn flipped(n: &Netlist, victim: &str) -> Netlist {
    let mut b = NetlistBuilder::from_netlist(n.clone());
    let v = b.find(victim).unwrap();
    let pre = b.split_driver(v, "oracle_pre").unwrap();
    b.add_gate(GateKind::Not, vec![pre], v, "oracle_not");
    b.build().unwrap()
}

pub fn trigger_word(n: &Netlist, vals: &[Vec<u64>], rec: &TrojanRecord, w: usize) -> u64 {
    rec.trigger.iter().fold(!0, |acc, t| {
        let x = vals[n.find(&t.net).unwrap().index()][w];
        acc & if t.polarity { x } else { !x }
    })
}

pub fn outputs(n: &Netlist, vals: &[Vec<u64>], w: usize) -> Vec<u64> {
    n.outputs().iter().map(|o| vals[o.index()][w]).collect()
}

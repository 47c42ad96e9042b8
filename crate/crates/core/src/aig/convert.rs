//! Netlist <-> AIG conversion.

use std::collections::{HashMap, HashSet};

use super::{Aig, AigError, Lit, Node};
use crate::netlist::{Driver, GateKind, NetId, Netlist, NetlistBuilder};

/// Converts a netlist into a hashed AIG with the same port names and order.
pub fn to_aig(n: &Netlist) -> Result<Aig, AigError> {
    Ok(to_aig_mapped(n)?.0)
}

/// Like [`to_aig`], also returning the literal computing each net.
pub fn to_aig_mapped(n: &Netlist) -> Result<(Aig, Vec<Lit>), AigError> {
    let order = n.topo_gates()?;
    let mut g = Aig::new(n.name());
    let mut map = vec![Lit::FALSE; n.net_count()];
    for &i in n.inputs() {
        map[i.index()] = g.add_input(n.net_name(i));
    }
    for (i, net) in n.nets().iter().enumerate() {
        if let Driver::Const(v) = net.driver {
            map[i] = if v { Lit::TRUE } else { Lit::FALSE };
        }
    }
    for gi in order {
        let gate = &n.gates()[gi];
        let ins: Vec<Lit> = gate.inputs.iter().map(|i| map[i.index()]).collect();
        let fold_and =
            |g: &mut Aig, xs: &[Lit]| xs[1..].iter().fold(xs[0], |acc, &x| g.and(acc, x));
        let fold_xor =
            |g: &mut Aig, xs: &[Lit]| xs[1..].iter().fold(xs[0], |acc, &x| g.xor(acc, x));
        let negs: Vec<Lit> = ins.iter().map(|&l| !l).collect();
        let out = match gate.kind {
            GateKind::Buf => ins[0],
            GateKind::Not => !ins[0],
            GateKind::And => fold_and(&mut g, &ins),
            GateKind::Nand => !fold_and(&mut g, &ins),
            GateKind::Or => !fold_and(&mut g, &negs),
            GateKind::Nor => fold_and(&mut g, &negs),
            GateKind::Xor => fold_xor(&mut g, &ins),
            GateKind::Xnor => !fold_xor(&mut g, &ins),
        };
        map[gate.output.index()] = out;
    }
    for &o in n.outputs() {
        g.add_output(n.net_name(o), map[o.index()]);
    }
    Ok((g, map))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FromAigOptions {
    /// Collapse single-fanout AND trees into multi-input gates.
    pub group_ands: bool,
    /// Fanin cap for grouped gates; 0 means unbounded.
    #[serde(default)]
    pub max_fanin: usize,
    /// Recognize the three-node XOR/XNOR pattern.
    pub match_xor: bool,
    /// Use NAND/NOR/OR instead of AND plus inverters where possible.
    pub complement_gates: bool,
}

impl Default for FromAigOptions {
    fn default() -> Self {
        FromAigOptions {
            group_ands: false,
            max_fanin: 0,
            match_xor: true,
            complement_gates: true,
        }
    }
}

#[derive(Debug, Clone)]
struct Form {
    pos_kind: GateKind,
    neg_kind: Option<GateKind>,
    inputs: Vec<Lit>,
}

/// Writes an AIG as a gate-level netlist over the eight-gate set.
pub fn from_aig(g: &Aig, opts: FromAigOptions) -> Netlist {
    let reach = g.reachable();
    let n = g.len();
    let mut refs = vec![0u32; n];
    for (i, node) in g.nodes().iter().enumerate() {
        if let (true, Node::And(a, b)) = (reach[i], node) {
            refs[a.node() as usize] += 1;
            refs[b.node() as usize] += 1;
        }
    }
    for (_, l) in g.outputs() {
        refs[l.node() as usize] += 1;
    }

    // Decide the gate form of every emitted node, top-down.
    let mut absorbed = vec![false; n];
    let mut forms: Vec<Option<Form>> = vec![None; n];
    for i in (0..n).rev() {
        if !reach[i] || absorbed[i] {
            continue;
        }
        let Node::And(a, b) = g.node(i as u32) else {
            continue;
        };
        if opts.match_xor {
            if let Some((x, y, inv)) = match_xor(g, a, b, &refs) {
                absorbed[a.node() as usize] = true;
                absorbed[b.node() as usize] = true;
                let (pk, nk) = if inv {
                    (GateKind::Xnor, GateKind::Xor)
                } else {
                    (GateKind::Xor, GateKind::Xnor)
                };
                forms[i] = Some(Form {
                    pos_kind: pk,
                    neg_kind: Some(nk),
                    inputs: vec![x, y],
                });
                continue;
            }
        }
        let mut leaves = Vec::new();
        let mut stack = vec![b, a];
        while let Some(l) = stack.pop() {
            let m = l.node() as usize;
            let room = opts.max_fanin == 0 || leaves.len() + stack.len() + 2 <= opts.max_fanin;
            if opts.group_ands
                && room
                && !l.is_complemented()
                && g.is_and(m as u32)
                && refs[m] == 1
                && !absorbed[m]
            {
                absorbed[m] = true;
                let (fa, fb) = g.fanins(m as u32).unwrap();
                stack.push(fb);
                stack.push(fa);
            } else {
                leaves.push(l);
            }
        }
        let form = if opts.complement_gates && leaves.iter().all(|l| l.is_complemented()) {
            Form {
                pos_kind: GateKind::Nor,
                neg_kind: Some(GateKind::Or),
                inputs: leaves.iter().map(|&l| !l).collect(),
            }
        } else {
            Form {
                pos_kind: GateKind::And,
                neg_kind: opts.complement_gates.then_some(GateKind::Nand),
                inputs: leaves,
            }
        };
        forms[i] = Some(form);
    }

    // Which polarities of each node are consumed.
    let mut want_pos = vec![false; n];
    let mut want_neg = vec![false; n];
    let demand = |l: Lit, want_pos: &mut Vec<bool>, want_neg: &mut Vec<bool>| {
        if l.is_complemented() {
            want_neg[l.node() as usize] = true;
        } else {
            want_pos[l.node() as usize] = true;
        }
    };
    for f in forms.iter().flatten() {
        for &l in &f.inputs {
            demand(l, &mut want_pos, &mut want_neg);
        }
    }
    for (_, l) in g.outputs() {
        demand(*l, &mut want_pos, &mut want_neg);
    }

    let mut b = NetlistBuilder::new(g.name());
    let mut pos_net: Vec<Option<NetId>> = vec![None; n];
    let mut neg_net: Vec<Option<NetId>> = vec![None; n];
    for (k, (name, id)) in g.inputs().iter().enumerate() {
        let _ = k;
        pos_net[*id as usize] = Some(b.add_input(name).expect("unique input names"));
    }
    let mut po_nets = Vec::with_capacity(g.output_count());
    let mut named: HashSet<(u32, bool)> = HashSet::new();
    let mut po_bufs: Vec<(Lit, NetId)> = Vec::new();
    for (name, l) in g.outputs() {
        let id = b.add_wire(name).expect("unique output names");
        po_nets.push(id);
        let node = l.node() as usize;
        let pol = l.is_complemented();
        if forms[node].is_some() && named.insert((node as u32, pol)) {
            if pol {
                neg_net[node] = Some(id);
            } else {
                pos_net[node] = Some(id);
            }
        } else {
            po_bufs.push((*l, id));
        }
    }
    for id in &po_nets {
        b.mark_output(*id);
    }

    let taken: HashSet<String> = g
        .inputs()
        .iter()
        .map(|(s, _)| s.clone())
        .chain(g.outputs().iter().map(|(s, _)| s.clone()))
        .collect();
    let wire = |b: &mut NetlistBuilder, base: String| -> NetId {
        let mut name = base.clone();
        let mut k = 0;
        while taken.contains(&name) || b.find(&name).is_some() {
            k += 1;
            name = format!("{base}_{k}");
        }
        b.add_wire(&name).expect("fresh")
    };
    let mut gate_no = 0usize;
    let mut next_gate = || {
        let s = format!("g{gate_no}");
        gate_no += 1;
        s
    };

    // Inverted primary inputs.
    for (_, id) in g.inputs() {
        let i = *id as usize;
        if want_neg[i] {
            let out = wire(&mut b, format!("n{i}_n"));
            b.add_gate(GateKind::Not, vec![pos_net[i].unwrap()], out, next_gate());
            neg_net[i] = Some(out);
        }
    }

    let lit_net = |b: &mut NetlistBuilder,
                   l: Lit,
                   pos_net: &[Option<NetId>],
                   neg_net: &[Option<NetId>]|
     -> NetId {
        if l.is_const() {
            return b.constant(!l.is_complemented());
        }
        let i = l.node() as usize;
        if l.is_complemented() {
            neg_net[i].expect("negative net emitted before use")
        } else {
            pos_net[i].expect("positive net emitted before use")
        }
    };

    for i in 0..n {
        let Some(form) = forms[i].clone() else {
            continue;
        };
        let ins: Vec<NetId> = form
            .inputs
            .iter()
            .map(|&l| lit_net(&mut b, l, &pos_net, &neg_net))
            .collect();
        let only_neg = want_neg[i] && !want_pos[i] && form.neg_kind.is_some();
        if only_neg {
            let out = neg_net[i].unwrap_or_else(|| wire(&mut b, format!("n{i}_n")));
            b.add_gate(form.neg_kind.unwrap(), ins, out, next_gate());
            neg_net[i] = Some(out);
        } else {
            let out = pos_net[i].unwrap_or_else(|| wire(&mut b, format!("n{i}")));
            b.add_gate(form.pos_kind, ins, out, next_gate());
            pos_net[i] = Some(out);
            if want_neg[i] {
                let nout = neg_net[i].unwrap_or_else(|| wire(&mut b, format!("n{i}_n")));
                b.add_gate(GateKind::Not, vec![out], nout, next_gate());
                neg_net[i] = Some(nout);
            }
        }
    }
    for (l, po) in po_bufs {
        let src = lit_net(&mut b, l, &pos_net, &neg_net);
        b.add_gate(GateKind::Buf, vec![src], po, next_gate());
    }
    b.build_unchecked()
}

/// Detects `node = !x & !y` with `x = u & v`, `y = !u & !v` over two nodes.
/// Returns the two positive operand literals and whether the node is XNOR.
fn match_xor(g: &Aig, a: Lit, b: Lit, refs: &[u32]) -> Option<(Lit, Lit, bool)> {
    if !a.is_complemented() || !b.is_complemented() {
        return None;
    }
    let (xa, xb) = g.fanins(a.node())?;
    let (ya, yb) = g.fanins(b.node())?;
    if refs[a.node() as usize] != 1 || refs[b.node() as usize] != 1 || a.node() == b.node() {
        return None;
    }
    let x: HashMap<u32, bool> = [
        (xa.node(), xa.is_complemented()),
        (xb.node(), xb.is_complemented()),
    ]
    .into();
    if x.len() != 2 || xa.is_const() || xb.is_const() {
        return None;
    }
    for (l, other) in [(ya, yb), (yb, ya)] {
        let _ = other;
        match x.get(&l.node()) {
            Some(&c) if c != l.is_complemented() => {}
            _ => return None,
        }
    }
    if ya.node() == yb.node() {
        return None;
    }
    // node = XOR(u, v) where x = u & v, y = !u & !v
    let inv = xa.is_complemented() ^ xb.is_complemented();
    Some((xa.regular(), xb.regular(), inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    fn exhaustive_equal(a: &Netlist, b: &Netlist) -> bool {
        let k = a.inputs().len();
        (0..1u32 << k).all(|m| {
            let v: Vec<bool> = (0..k).map(|i| (m >> i) & 1 == 1).collect();
            a.eval_outputs(&v).unwrap() == b.eval_outputs(&v).unwrap()
        })
    }

    #[test]
    fn not_gate_is_complemented_edge() {
        let n = parse_netlist("module m(a, y); input a; output y; not g(y, a); endmodule").unwrap();
        let g = to_aig(&n).unwrap();
        assert_eq!(g.and_count(), 0);
        assert_eq!(g.outputs()[0].1, !g.input_lit(0));
    }

    #[test]
    fn or_gate_is_one_node() {
        let n = parse_netlist("module m(a, b, y); input a, b; output y; or g(y, a, b); endmodule")
            .unwrap();
        let g = to_aig(&n).unwrap();
        assert_eq!(g.and_count(), 1);
        let y = g.outputs()[0].1;
        assert!(y.is_complemented());
        let (f0, f1) = g.fanins(y.node()).unwrap();
        assert!(f0.is_complemented() && f1.is_complemented());
    }

    #[test]
    fn xor_gate_is_three_nodes() {
        let n = parse_netlist("module m(a, b, y); input a, b; output y; xor g(y, a, b); endmodule")
            .unwrap();
        let g = to_aig(&n).unwrap();
        assert_eq!(g.and_count(), 3);
        let back = from_aig(&g, FromAigOptions::default());
        assert!(exhaustive_equal(&n, &back));
        assert_eq!(back.gates().len(), 1);
        assert_eq!(back.gates()[0].kind, GateKind::Xor);
        let plain = from_aig(
            &g,
            FromAigOptions {
                match_xor: false,
                complement_gates: false,
                group_ands: false,
                max_fanin: 0,
            },
        );
        assert!(exhaustive_equal(&n, &plain));
        assert!(plain
            .gates()
            .iter()
            .all(|g| matches!(g.kind, GateKind::And | GateKind::Not | GateKind::Buf)));
    }

    #[test]
    fn and_chain_grouping() {
        let n = parse_netlist(
            "module m(a,b,c,d,y); input a,b,c,d; output y; wire t1,t2; and g1(t1,a,b); and g2(t2,t1,c); and g3(y,t2,d); endmodule",
        )
        .unwrap();
        let g = to_aig(&n).unwrap();
        assert_eq!(g.and_count(), 3);
        let grouped = from_aig(
            &g,
            FromAigOptions {
                group_ands: true,
                ..Default::default()
            },
        );
        assert_eq!(grouped.gates().len(), 1);
        assert_eq!(grouped.gates()[0].kind, GateKind::And);
        assert_eq!(grouped.gates()[0].inputs.len(), 4);
        let flat = from_aig(&g, FromAigOptions::default());
        assert_eq!(flat.gates().len(), 3);
        assert!(flat
            .gates()
            .iter()
            .all(|g| g.kind == GateKind::And && g.inputs.len() == 2));
        assert!(exhaustive_equal(&n, &grouped) && exhaustive_equal(&n, &flat));
        let capped = from_aig(
            &g,
            FromAigOptions {
                group_ands: true,
                max_fanin: 3,
                ..Default::default()
            },
        );
        assert!(capped.gates().iter().all(|g| g.inputs.len() <= 3));
        assert_eq!(capped.gates().len(), 2);
        assert!(exhaustive_equal(&n, &capped));
    }

    #[test]
    fn k_input_gates_use_k_minus_one_nodes() {
        for k in 2..7 {
            for kind in ["and", "or", "nand", "nor"] {
                let ins: Vec<String> = (0..k).map(|i| format!("i{i}")).collect();
                let src = format!(
                    "module m({0}, y); input {0}; output y; {1} g(y, {0}); endmodule",
                    ins.join(", "),
                    kind
                );
                let g = to_aig(&parse_netlist(&src).unwrap()).unwrap();
                assert_eq!(g.and_count(), k - 1, "{kind}{k}");
            }
        }
    }

    #[test]
    fn constant_and_passthrough_outputs() {
        let n = parse_netlist(
            "module m(a, y, z, w, v); input a; output y, z, w, v; and g(y, a, 1'b0); buf h(z, a); not k(w, a); buf q(v, a); endmodule",
        )
        .unwrap();
        let g = to_aig(&n).unwrap();
        let back = from_aig(&g, FromAigOptions::default());
        assert!(back.validate().is_empty());
        assert!(exhaustive_equal(&n, &back));
    }
}

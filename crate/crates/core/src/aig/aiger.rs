//! AIGER export (`aag` ASCII and `aig` binary, combinational only).
//!
//! AIGER literal 0 is constant false, so the constant-true node maps to
//! literal 1. Inputs take variables `1..=I` in port order and AND nodes follow
//! in topological order.

use std::fmt::Write as _;

use super::{Aig, Lit, Node};

struct Numbering {
    var: Vec<u32>,
    ands: Vec<u32>,
}

fn layout(g: &Aig) -> Numbering {
    let reach = g.reachable();
    let mut var = vec![0u32; g.len()];
    let mut next = 1u32;
    for (_, id) in g.inputs() {
        var[*id as usize] = next;
        next += 1;
    }
    let mut ands = Vec::new();
    for i in 0..g.len() as u32 {
        if reach[i as usize] && g.is_and(i) {
            var[i as usize] = next;
            next += 1;
            ands.push(i);
        }
    }
    Numbering { var, ands }
}

fn lit(num: &Numbering, l: Lit) -> u32 {
    if l.is_const() {
        // constant-true node: uncomplemented edge is AIGER 1
        1 ^ l.is_complemented() as u32
    } else {
        2 * num.var[l.node() as usize] + l.is_complemented() as u32
    }
}

fn symbols(g: &Aig, out: &mut Vec<u8>) {
    let mut s = String::new();
    for (k, (name, _)) in g.inputs().iter().enumerate() {
        let _ = writeln!(s, "i{k} {name}");
    }
    for (k, (name, _)) in g.outputs().iter().enumerate() {
        let _ = writeln!(s, "o{k} {name}");
    }
    let _ = writeln!(s, "c\n{}", g.name());
    out.extend_from_slice(s.as_bytes());
}

pub fn write_aiger_ascii(g: &Aig) -> Vec<u8> {
    let num = layout(g);
    let i = g.input_count();
    let a = num.ands.len();
    let mut s = format!("aag {} {} 0 {} {}\n", i + a, i, g.output_count(), a);
    for k in 0..i {
        let _ = writeln!(s, "{}", 2 * (k + 1));
    }
    for (_, l) in g.outputs() {
        let _ = writeln!(s, "{}", lit(&num, *l));
    }
    for &n in &num.ands {
        let Node::And(x, y) = g.node(n) else {
            unreachable!()
        };
        let (r0, r1) = {
            let (p, q) = (lit(&num, x), lit(&num, y));
            (p.max(q), p.min(q))
        };
        let _ = writeln!(s, "{} {} {}", 2 * num.var[n as usize], r0, r1);
    }
    let mut out = s.into_bytes();
    symbols(g, &mut out);
    out
}

fn push_delta(out: &mut Vec<u8>, mut x: u32) {
    while x & !0x7f != 0 {
        out.push((x & 0x7f) as u8 | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

pub fn write_aiger_binary(g: &Aig) -> Vec<u8> {
    let num = layout(g);
    let i = g.input_count();
    let a = num.ands.len();
    let mut out = format!("aig {} {} 0 {} {}\n", i + a, i, g.output_count(), a).into_bytes();
    for (_, l) in g.outputs() {
        out.extend_from_slice(format!("{}\n", lit(&num, *l)).as_bytes());
    }
    for &n in &num.ands {
        let Node::And(x, y) = g.node(n) else {
            unreachable!()
        };
        let lhs = 2 * num.var[n as usize];
        let (p, q) = (lit(&num, x), lit(&num, y));
        let (r0, r1) = (p.max(q), p.min(q));
        push_delta(&mut out, lhs - r0);
        push_delta(&mut out, r0 - r1);
    }
    symbols(g, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ascii(text: &str) -> (Vec<u32>, Vec<(u32, u32, u32)>) {
        let mut lines = text.lines();
        let hdr: Vec<usize> = lines
            .next()
            .unwrap()
            .split(' ')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        let (i, o, a) = (hdr[1], hdr[3], hdr[4]);
        for _ in 0..i {
            lines.next();
        }
        let outs = (0..o)
            .map(|_| lines.next().unwrap().parse().unwrap())
            .collect();
        let ands = (0..a)
            .map(|_| {
                let v: Vec<u32> = lines
                    .next()
                    .unwrap()
                    .split(' ')
                    .map(|x| x.parse().unwrap())
                    .collect();
                (v[0], v[1], v[2])
            })
            .collect();
        (outs, ands)
    }

    fn eval(outs: &[u32], ands: &[(u32, u32, u32)], ins: &[bool]) -> Vec<bool> {
        let max = ands
            .iter()
            .map(|a| a.0 / 2)
            .max()
            .unwrap_or(ins.len() as u32) as usize;
        let mut v = vec![false; max.max(ins.len()) + 1];
        for (k, &b) in ins.iter().enumerate() {
            v[k + 1] = b;
        }
        let get = |v: &Vec<bool>, l: u32| v[(l / 2) as usize] ^ (l & 1 == 1);
        for &(lhs, r0, r1) in ands {
            v[(lhs / 2) as usize] = get(&v, r0) && get(&v, r1);
        }
        outs.iter().map(|&l| get(&v, l)).collect()
    }

    #[test]
    fn ascii_export_evaluates_like_graph() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let c = g.add_input("c");
        let x = g.xor(a, b);
        let y = g.and(x, c);
        g.add_output("y", !y);
        g.add_output("t", Lit::TRUE);
        g.add_output("a", a);
        let text = String::from_utf8(write_aiger_ascii(&g)).unwrap();
        assert!(text.starts_with("aag 7 3 0 3 4\n"));
        let (outs, ands) = parse_ascii(&text);
        for m in 0..8u8 {
            let ins = [m & 1 != 0, m & 2 != 0, m & 4 != 0];
            assert_eq!(eval(&outs, &ands, &ins), g.eval_outputs(&ins));
        }
    }

    #[test]
    fn binary_header_and_deltas() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, !b);
        g.add_output("x", x);
        let bytes = write_aiger_binary(&g);
        // lhs 6, rhs 5 and 2 -> deltas 1 and 3
        assert!(bytes.starts_with(b"aig 3 2 0 1 1\n6\n\x01\x03"));
    }
}

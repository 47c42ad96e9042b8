use std::fmt::Write as _;

use super::{Driver, Netlist, CONST0_NAME, CONST1_NAME};

const KEYWORDS: &[&str] = &[
    "module",
    "endmodule",
    "input",
    "output",
    "inout",
    "wire",
    "reg",
    "assign",
    "always",
    "initial",
    "begin",
    "end",
    "buf",
    "not",
    "and",
    "or",
    "xor",
    "nand",
    "nor",
    "xnor",
    "posedge",
    "negedge",
    "supply0",
    "supply1",
];

fn is_simple(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$') && !KEYWORDS.contains(&name)
}

fn ident(name: &str) -> String {
    if name == CONST0_NAME || name == CONST1_NAME || is_simple(name) {
        name.to_string()
    } else {
        format!("\\{name} ")
    }
}

fn decl_list(out: &mut String, kw: &str, names: &[String]) {
    for chunk in names.chunks(8) {
        let _ = writeln!(out, "  {kw} {};", chunk.join(", "));
    }
}

/// Serializes a netlist as structural Verilog.
///
/// Ports are written as scalars in port order; non-simple names (including
/// bit-blasted `a[3]`) are emitted as escaped identifiers.
pub fn write_netlist(n: &Netlist) -> String {
    let mut out = String::new();
    let ports: Vec<String> = n
        .inputs()
        .iter()
        .chain(n.outputs())
        .map(|&p| ident(n.net_name(p)))
        .collect();
    let _ = writeln!(out, "module {}({});", ident(n.name()), ports.join(", "));
    let ins: Vec<String> = n.inputs().iter().map(|&p| ident(n.net_name(p))).collect();
    let outs: Vec<String> = n.outputs().iter().map(|&p| ident(n.net_name(p))).collect();
    decl_list(&mut out, "input", &ins);
    decl_list(&mut out, "output", &outs);
    let port_set: std::collections::HashSet<_> =
        n.inputs().iter().chain(n.outputs()).copied().collect();
    let wires: Vec<String> = n
        .nets()
        .iter()
        .enumerate()
        .filter(|(i, net)| {
            !port_set.contains(&super::NetId(*i as u32)) && !matches!(net.driver, Driver::Const(_))
        })
        .map(|(_, net)| ident(&net.name))
        .collect();
    decl_list(&mut out, "wire", &wires);
    for g in n.gates() {
        let mut pins = vec![ident(n.net_name(g.output))];
        pins.extend(g.inputs.iter().map(|&i| ident(n.net_name(i))));
        let _ = writeln!(
            out,
            "  {} {}({});",
            g.kind.keyword(),
            ident(&g.name),
            pins.join(", ")
        );
    }
    out.push_str("endmodule\n");
    out
}

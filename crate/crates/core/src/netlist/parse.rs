//! Structural Verilog reader.
//!
//! Accepts one `module ... endmodule` made of `input`/`output`/`wire`
//! declarations (scalars or `[msb:lsb]` vectors, bit-blasted LSB first) and
//! gate-primitive instances `kind [name] (out, in1, ..., ink);`. Escaped
//! identifiers (`\foo[3] `) are normalized to their bare text.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::{GateKind, NetId, Netlist, NetlistBuilder, NetlistError, Severity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Escaped(String),
    Number(String),
    Const(bool),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SEQUENTIAL: &[&str] = &[
    "always",
    "initial",
    "reg",
    "posedge",
    "negedge",
    "always_ff",
    "always_comb",
    "always_latch",
];
const UNSUPPORTED: &[&str] = &[
    "assign",
    "function",
    "task",
    "generate",
    "parameter",
    "localparam",
    "supply0",
    "supply1",
    "tri",
    "bufif0",
    "bufif1",
    "notif0",
    "notif1",
    "integer",
    "specify",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, m: String| ParseError {
        line,
        col,
        message: m,
    };
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(err(l0, c0, "unterminated block comment".into()));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let (l0, c0) = (line, col);
        if c == '`' {
            return Err(err(l0, c0, "compiler directives are not supported".into()));
        }
        if c == '\\' {
            bump!();
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                bump!();
            }
            if i == start {
                return Err(err(l0, c0, "empty escaped identifier".into()));
            }
            out.push(Token {
                tok: Tok::Escaped(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                bump!();
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_digit() || c == '\'' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '\'' || chars[i] == '_')
            {
                bump!();
            }
            let text: String = chars[start..i].iter().collect();
            let tok = match text.to_ascii_lowercase().as_str() {
                "1'b0" | "'b0" | "1'h0" | "1'd0" => Tok::Const(false),
                "1'b1" | "'b1" | "1'h1" | "1'd1" => Tok::Const(true),
                t if t.chars().all(|c| c.is_ascii_digit()) => Tok::Number(text),
                _ => return Err(err(l0, c0, format!("unsupported literal `{text}`"))),
            };
            out.push(Token {
                tok,
                line: l0,
                col: c0,
            });
            continue;
        }
        if "(),;[]:.#{}@=".contains(c) {
            bump!();
            out.push(Token {
                tok: Tok::Punct(c),
                line: l0,
                col: c0,
            });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Input,
    Output,
    Wire,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.eof)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            message: msg.into(),
        })
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.tok.clone())
            }
            None => self.error("unexpected end of input"),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => self.error(format!("expected `{c}`")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(p)) if *p == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.check_keyword(&s)?;
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Escaped(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("expected identifier"),
        }
    }

    fn check_keyword(&self, s: &str) -> Result<(), ParseError> {
        if SEQUENTIAL.contains(&s) {
            return self.error(format!(
                "sequential/behavioral construct `{s}` is not supported"
            ));
        }
        Ok(())
    }

    fn number(&mut self) -> Result<i64, ParseError> {
        match self.next()? {
            Tok::Number(n) => n.parse().or_else(|_| self.error("bad number")),
            _ => {
                self.pos -= 1;
                self.error("expected number")
            }
        }
    }

    fn range(&mut self) -> Result<Option<(i64, i64)>, ParseError> {
        if !self.eat('[') {
            return Ok(None);
        }
        let msb = self.number()?;
        self.expect(':')?;
        let lsb = self.number()?;
        self.expect(']')?;
        Ok(Some((msb, lsb)))
    }
}

fn expand(name: &str, range: Option<(i64, i64)>) -> Vec<String> {
    match range {
        None => vec![name.to_string()],
        Some((msb, lsb)) => {
            let (lo, hi) = if msb <= lsb { (msb, lsb) } else { (lsb, msb) };
            (lo..=hi).map(|i| format!("{name}[{i}]")).collect()
        }
    }
}

/// Parses and validates one structural Verilog module.
pub fn parse_netlist(src: &str) -> Result<Netlist, NetlistError> {
    let toks = lex(src)?;
    let eof = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, eof };

    match p.next()? {
        Tok::Ident(k) if k == "module" => {}
        Tok::Ident(k) if SEQUENTIAL.contains(&k.as_str()) => {
            p.pos -= 1;
            return Err(p
                .error::<()>(format!(
                    "sequential/behavioral construct `{k}` is not supported"
                ))
                .unwrap_err()
                .into());
        }
        _ => {
            p.pos -= 1;
            return Err(p.error::<()>("expected `module`").unwrap_err().into());
        }
    }
    let mod_name = p.ident()?;
    let mut b = NetlistBuilder::new(mod_name);

    // Port list order is kept for ANSI headers; non-ANSI ports take their
    // declaration order from the `input`/`output` statements.
    let mut header_ports: Vec<String> = Vec::new();
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut wires: Vec<String> = Vec::new();
    let mut declared: HashSet<String> = HashSet::new();

    let declare = |p: &Parser,
                   dir: Dir,
                   names: Vec<String>,
                   declared: &mut HashSet<String>,
                   inputs: &mut Vec<String>,
                   outputs: &mut Vec<String>,
                   wires: &mut Vec<String>|
     -> Result<(), ParseError> {
        for n in names {
            if dir != Dir::Wire && !declared.insert(n.clone()) {
                return p.error(format!("port `{n}` declared twice"));
            }
            match dir {
                Dir::Input => inputs.push(n),
                Dir::Output => outputs.push(n),
                Dir::Wire => wires.push(n),
            }
        }
        Ok(())
    };

    if p.eat('(') {
        if !p.eat(')') {
            let mut cur_dir: Option<Dir> = None;
            let mut cur_range = None;
            loop {
                match p.peek() {
                    Some(Tok::Ident(k)) if k == "input" || k == "output" => {
                        cur_dir = Some(if k == "input" {
                            Dir::Input
                        } else {
                            Dir::Output
                        });
                        p.pos += 1;
                        if matches!(p.peek(), Some(Tok::Ident(w)) if w == "wire") {
                            p.pos += 1;
                        }
                        cur_range = p.range()?;
                    }
                    Some(Tok::Ident(k)) if k == "inout" => {
                        return Err(p
                            .error::<()>("inout ports are not supported")
                            .unwrap_err()
                            .into())
                    }
                    _ => {}
                }
                let name = p.ident()?;
                match cur_dir {
                    Some(d) => declare(
                        &p,
                        d,
                        expand(&name, cur_range),
                        &mut declared,
                        &mut inputs,
                        &mut outputs,
                        &mut wires,
                    )?,
                    None => header_ports.push(name),
                }
                if p.eat(')') {
                    break;
                }
                p.expect(',')?;
            }
        }
    }
    p.expect(';')?;

    struct Inst {
        kind: GateKind,
        name: Option<String>,
        pins: Vec<PinRef>,
    }
    enum PinRef {
        Net(String),
        Const(bool),
    }
    let mut insts: Vec<Inst> = Vec::new();

    loop {
        let tok = p.next()?;
        let kw = match tok {
            Tok::Ident(k) => k,
            _ => {
                p.pos -= 1;
                return Err(p
                    .error::<()>("expected declaration or gate instance")
                    .unwrap_err()
                    .into());
            }
        };
        match kw.as_str() {
            "endmodule" => break,
            "input" | "output" | "wire" => {
                let dir = match kw.as_str() {
                    "input" => Dir::Input,
                    "output" => Dir::Output,
                    _ => Dir::Wire,
                };
                if dir != Dir::Wire && matches!(p.peek(), Some(Tok::Ident(w)) if w == "wire") {
                    p.pos += 1;
                }
                let range = p.range()?;
                loop {
                    let name = p.ident()?;
                    declare(
                        &p,
                        dir,
                        expand(&name, range),
                        &mut declared,
                        &mut inputs,
                        &mut outputs,
                        &mut wires,
                    )?;
                    if p.eat(';') {
                        break;
                    }
                    p.expect(',')?;
                }
            }
            k if SEQUENTIAL.contains(&k) => {
                p.pos -= 1;
                return Err(p
                    .error::<()>(format!(
                        "sequential/behavioral construct `{k}` is not supported"
                    ))
                    .unwrap_err()
                    .into());
            }
            k if UNSUPPORTED.contains(&k) || k == "module" || k == "inout" => {
                p.pos -= 1;
                return Err(p
                    .error::<()>(format!("unsupported construct `{k}`"))
                    .unwrap_err()
                    .into());
            }
            k => {
                let Some(kind) = GateKind::from_keyword(k) else {
                    p.pos -= 1;
                    let lower = k.to_ascii_lowercase();
                    let msg = if lower.contains("dff")
                        || lower.contains("latch")
                        || lower.contains("flop")
                    {
                        format!("sequential/behavioral construct: cell `{k}` looks like a storage element")
                    } else {
                        format!("unsupported construct: instance of unknown cell `{k}`")
                    };
                    return Err(p.error::<()>(msg).unwrap_err().into());
                };
                if p.eat('#') {
                    return Err(p
                        .error::<()>("unsupported construct: gate delays")
                        .unwrap_err()
                        .into());
                }
                loop {
                    let name = match p.peek() {
                        Some(Tok::Ident(_) | Tok::Escaped(_)) => Some(p.ident()?),
                        _ => None,
                    };
                    p.expect('(')?;
                    let mut pins = Vec::new();
                    loop {
                        match p.next()? {
                            Tok::Ident(n) => {
                                p.check_keyword(&n)?;
                                if p.eat('[') {
                                    let i = p.number()?;
                                    p.expect(']')?;
                                    pins.push(PinRef::Net(format!("{n}[{i}]")));
                                } else {
                                    pins.push(PinRef::Net(n));
                                }
                            }
                            Tok::Escaped(n) => pins.push(PinRef::Net(n)),
                            Tok::Const(v) => pins.push(PinRef::Const(v)),
                            Tok::Punct('.') => {
                                p.pos -= 1;
                                return Err(p
                                    .error::<()>("unsupported construct: named port connections")
                                    .unwrap_err()
                                    .into());
                            }
                            _ => {
                                p.pos -= 1;
                                return Err(p
                                    .error::<()>("expected net reference")
                                    .unwrap_err()
                                    .into());
                            }
                        }
                        if p.eat(')') {
                            break;
                        }
                        p.expect(',')?;
                    }
                    if pins.len() < 2 {
                        return Err(p
                            .error::<()>(format!(
                                "{k} instance needs an output and at least one input"
                            ))
                            .unwrap_err()
                            .into());
                    }
                    insts.push(Inst { kind, name, pins });
                    if p.eat(';') {
                        break;
                    }
                    p.expect(',')?;
                }
            }
        }
    }
    if p.pos < p.toks.len() {
        return Err(p
            .error::<()>(
                "unexpected content after `endmodule` (multi-module files are not supported)",
            )
            .unwrap_err()
            .into());
    }

    // Header-listed ports must all be declared.
    for h in &header_ports {
        let ok = inputs
            .iter()
            .chain(outputs.iter())
            .any(|n| n == h || n.starts_with(&format!("{h}[")));
        if !ok {
            return Err(ParseError {
                line: 1,
                col: 1,
                message: format!("port `{h}` has no direction declaration"),
            }
            .into());
        }
    }
    // Non-ANSI: order ports by header order, bit-blasted groups kept together.
    let order_by_header = |list: Vec<String>| -> Vec<String> {
        if header_ports.is_empty() {
            return list;
        }
        let mut out = Vec::with_capacity(list.len());
        for h in &header_ports {
            for n in &list {
                if n == h || (n.starts_with(h.as_str()) && n[h.len()..].starts_with('[')) {
                    out.push(n.clone());
                }
            }
        }
        out
    };
    let inputs = order_by_header(inputs);
    let outputs = order_by_header(outputs);

    for n in &inputs {
        b.add_input(n)?;
    }
    let mut out_ids: Vec<NetId> = Vec::new();
    for n in &outputs {
        let id = b.add_wire(n)?;
        out_ids.push(id);
    }
    for w in &wires {
        b.net(w);
    }
    let mut used_names: HashSet<String> = insts.iter().filter_map(|i| i.name.clone()).collect();
    let mut anon = 0usize;
    for inst in insts {
        let mut ids: Vec<NetId> = Vec::with_capacity(inst.pins.len());
        for pin in &inst.pins {
            ids.push(match pin {
                PinRef::Net(n) => b.net(n),
                PinRef::Const(v) => b.constant(*v),
            });
        }
        let out = ids.remove(0);
        if b.netlist().is_const(out).is_some() {
            return Err(ParseError {
                line: 0,
                col: 0,
                message: "constant literal used as gate output".into(),
            }
            .into());
        }
        let name = match inst.name {
            Some(n) => n,
            None => loop {
                let cand = format!("_g{anon}");
                anon += 1;
                if used_names.insert(cand.clone()) {
                    break cand;
                }
            },
        };
        b.add_gate(inst.kind, ids, out, name);
    }
    for id in out_ids {
        b.mark_output(id);
    }
    let nl = b.build_unchecked();
    let errors: Vec<_> = nl
        .validate()
        .into_iter()
        .filter(|d| d.severity() == Severity::Error)
        .collect();
    if !errors.is_empty() {
        return Err(NetlistError::Invalid(errors));
    }
    Ok(nl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::Diagnostic;

    #[test]
    fn two_gate_module() {
        let n = parse_netlist("module m(a, b, y); input a, b; output y; wire w; and g1(w, a, b); not g2(y, w); endmodule").unwrap();
        assert_eq!(n.gate_count(), 2);
        assert_eq!(n.input_names(), vec!["a", "b"]);
        assert_eq!(n.output_names(), vec!["y"]);
    }

    #[test]
    fn always_rejected() {
        let e = parse_netlist(
            "module m(clk, d, q); input clk, d; output q; always @(posedge clk) q = d; endmodule",
        )
        .unwrap_err();
        assert!(
            e.to_string().contains("sequential/behavioral construct"),
            "{e}"
        );
    }

    #[test]
    fn dff_cell_rejected() {
        let e = parse_netlist("module m(c, d, q); input c, d; output q; DFF r(q, c, d); endmodule")
            .unwrap_err();
        assert!(
            e.to_string().contains("sequential/behavioral construct"),
            "{e}"
        );
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_netlist("module m(a, y);\ninput a;\noutput y;\nand g(y a);\nendmodule")
            .unwrap_err();
        match e {
            NetlistError::Parse(pe) => {
                assert_eq!(pe.line, 4);
                assert!(pe.col > 1);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn multiply_driven_rejected() {
        let e = parse_netlist(
            "module m(a,b,y); input a,b; output y; buf g1(y,a); buf g2(y,b); endmodule",
        )
        .unwrap_err();
        assert!(
            matches!(e, NetlistError::Invalid(d) if matches!(d[0], Diagnostic::MultipleDrivers { .. }))
        );
    }

    #[test]
    fn undriven_input_rejected() {
        let e = parse_netlist("module m(a,y); input a; output y; and g1(y,a,ghost); endmodule")
            .unwrap_err();
        assert!(
            matches!(e, NetlistError::Invalid(d) if matches!(&d[0], Diagnostic::UndrivenInput { net, .. } if net == "ghost"))
        );
    }

    #[test]
    fn vectors_bit_blasted_lsb_first() {
        let n = parse_netlist(
            "module m(a, y); input [2:0] a; output y; and g(y, a[0], a[1], a[2]); endmodule",
        )
        .unwrap();
        assert_eq!(n.input_names(), vec!["a[0]", "a[1]", "a[2]"]);
    }

    #[test]
    fn escaped_identifiers_normalized() {
        let n = parse_netlist(
            "module m(\\a.b , y); input \\a.b ; output y; not \\g$1 (y, \\a.b );\nendmodule",
        )
        .unwrap();
        assert_eq!(n.input_names(), vec!["a.b"]);
        assert_eq!(n.gates()[0].name, "g$1");
    }

    #[test]
    fn constants_become_reserved_nets() {
        let n = parse_netlist(
            "module m(a, y, z); input a; output y, z; and g(y, a, 1'b1); buf h(z, 1'b0); endmodule",
        )
        .unwrap();
        assert_eq!(n.eval_outputs(&[true]).unwrap(), vec![true, false]);
        assert_eq!(n.is_const(n.find("1'b1").unwrap()), Some(true));
    }

    #[test]
    fn ansi_header() {
        let n = parse_netlist("module m(input a, input b, output y); nand (y, a, b); endmodule")
            .unwrap();
        assert_eq!(n.input_names(), vec!["a", "b"]);
        assert_eq!(n.gates()[0].name, "_g0");
    }

    #[test]
    fn unconnected_output_is_warning() {
        let n = parse_netlist("module m(a, y, z); input a; output y, z; buf g(y, a); endmodule")
            .unwrap();
        let d = n.validate();
        assert_eq!(d, vec![Diagnostic::UnconnectedOutput { net: "z".into() }]);
        assert_eq!(n.eval_outputs(&[true]).unwrap(), vec![true, false]);
    }

    #[test]
    fn comments_skipped() {
        let n = parse_netlist("// c17\nmodule m(a, y); /* block\n comment */ input a; output y; not g(y, a); endmodule\n").unwrap();
        assert_eq!(n.gate_count(), 1);
    }
}

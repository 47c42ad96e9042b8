//! Gate-level combinational netlists.
//!
//! A [`Netlist`] is a directed acyclic graph of primitive gates drawn from the
//! eight-gate set `BUF NOT AND OR XOR NAND NOR XNOR`. Nets are addressed by
//! [`NetId`], which indexes the net table in declaration order.

mod parse;
mod sim;
mod write;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_netlist, ParseError};
pub use sim::{eval_gate, eval_gate_word, PackedSim};
pub use write::write_netlist;

/// Reserved name of the constant-0 net created for `1'b0` literals.
pub const CONST0_NAME: &str = "1'b0";
/// Reserved name of the constant-1 net created for `1'b1` literals.
pub const CONST1_NAME: &str = "1'b1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Buf,
    Not,
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::Buf,
        GateKind::Not,
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xnor,
    ];

    /// Verilog primitive keyword.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Buf => "buf",
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Xor => "xor",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xnor => "xnor",
        }
    }

    pub fn from_keyword(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Buf | GateKind::Not)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.keyword().to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
    pub name: String,
}

/// What drives a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Driver {
    Input,
    Gate(usize),
    Const(bool),
    Undriven,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub name: String,
    pub driver: Driver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "diagnostic", rename_all = "snake_case")]
pub enum Diagnostic {
    Cycle {
        nets: Vec<String>,
    },
    MultipleDrivers {
        net: String,
        drivers: usize,
    },
    UndrivenInput {
        net: String,
        gate: String,
    },
    UnknownNet {
        gate: String,
        index: u32,
    },
    BadArity {
        gate: String,
        kind: GateKind,
        inputs: usize,
    },
    UnconnectedOutput {
        net: String,
    },
    DuplicateGateName {
        gate: String,
    },
}

impl Diagnostic {
    pub fn severity(&self) -> Severity {
        match self {
            Diagnostic::UnconnectedOutput { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Cycle { nets } => {
                write!(f, "combinational cycle through nets {}", nets.join(" -> "))
            }
            Diagnostic::MultipleDrivers { net, drivers } => {
                write!(f, "net `{net}` has {drivers} drivers")
            }
            Diagnostic::UndrivenInput { net, gate } => {
                write!(f, "gate `{gate}` reads undriven net `{net}`")
            }
            Diagnostic::UnknownNet { gate, index } => {
                write!(f, "gate `{gate}` references unknown net #{index}")
            }
            Diagnostic::BadArity { gate, kind, inputs } => {
                write!(f, "gate `{gate}` of kind {kind} has {inputs} inputs")
            }
            Diagnostic::UnconnectedOutput { net } => write!(f, "output `{net}` is not driven"),
            Diagnostic::DuplicateGateName { gate } => write!(f, "duplicate instance name `{gate}`"),
        }
    }
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid netlist: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("missing stimulus for primary input `{0}`")]
    MissingInput(String),
    #[error("stimulus binds `{0}`, which is not a primary input")]
    NotAnInput(String),
    #[error("expected {expected} input words, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("net `{0}` already exists")]
    DuplicateNet(String),
    #[error("no net named `{0}`")]
    NoSuchNet(String),
}

/// Binding of net names to bit values.
///
/// Used both as a stimulus (keys are primary inputs) and as a full simulation
/// result (keys are every net).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub BTreeMap<String, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, net: impl Into<String>, value: bool) {
        self.0.insert(net.into(), value);
    }

    pub fn get(&self, net: &str) -> Option<bool> {
        self.0.get(net).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl FromIterator<(String, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, bool)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// A combinational gate-level circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    name: String,
    nets: Vec<Net>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
    index: HashMap<String, NetId>,
}

impl Netlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.index()]
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.nets[id.index()].name
    }

    pub fn net_count(&self) -> usize {
        self.nets.len()
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn find(&self, name: &str) -> Option<NetId> {
        self.index.get(name).copied()
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs.iter().map(|&n| self.net_name(n)).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|&n| self.net_name(n)).collect()
    }

    pub fn is_const(&self, id: NetId) -> Option<bool> {
        match self.nets[id.index()].driver {
            Driver::Const(v) => Some(v),
            _ => None,
        }
    }

    /// Checks every structural invariant and reports each violation.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let n = self.nets.len();
        let mut drivers = vec![0usize; n];
        for &i in &self.inputs {
            if i.index() < n {
                drivers[i.index()] += 1;
            }
        }
        for net in &self.nets {
            if let Driver::Const(_) = net.driver {
                let id = self.index[&net.name];
                drivers[id.index()] += 1;
            }
        }
        let mut seen_names: HashMap<&str, ()> = HashMap::new();
        for g in &self.gates {
            if seen_names.insert(g.name.as_str(), ()).is_some() {
                diags.push(Diagnostic::DuplicateGateName {
                    gate: g.name.clone(),
                });
            }
            let arity_ok = if g.kind.is_unary() {
                g.inputs.len() == 1
            } else {
                g.inputs.len() >= 2
            };
            if !arity_ok {
                diags.push(Diagnostic::BadArity {
                    gate: g.name.clone(),
                    kind: g.kind,
                    inputs: g.inputs.len(),
                });
            }
            if g.output.index() < n {
                drivers[g.output.index()] += 1;
            } else {
                diags.push(Diagnostic::UnknownNet {
                    gate: g.name.clone(),
                    index: g.output.0,
                });
            }
            for &i in &g.inputs {
                if i.index() >= n {
                    diags.push(Diagnostic::UnknownNet {
                        gate: g.name.clone(),
                        index: i.0,
                    });
                }
            }
        }
        for (i, &count) in drivers.iter().enumerate() {
            if count > 1 {
                diags.push(Diagnostic::MultipleDrivers {
                    net: self.nets[i].name.clone(),
                    drivers: count,
                });
            }
        }
        for g in &self.gates {
            for &i in &g.inputs {
                if i.index() < n && drivers[i.index()] == 0 {
                    diags.push(Diagnostic::UndrivenInput {
                        net: self.nets[i.index()].name.clone(),
                        gate: g.name.clone(),
                    });
                }
            }
        }
        for &o in &self.outputs {
            if o.index() < n && drivers[o.index()] == 0 {
                diags.push(Diagnostic::UnconnectedOutput {
                    net: self.nets[o.index()].name.clone(),
                });
            }
        }
        if diags
            .iter()
            .all(|d| !matches!(d, Diagnostic::UnknownNet { .. }))
        {
            if let Some(cycle) = self.find_cycle() {
                diags.push(Diagnostic::Cycle {
                    nets: cycle
                        .into_iter()
                        .map(|id| self.net_name(id).to_string())
                        .collect(),
                });
            }
        }
        diags
    }

    /// True when `validate` reports no errors (warnings allowed).
    pub fn is_valid(&self) -> bool {
        self.validate()
            .iter()
            .all(|d| d.severity() == Severity::Warning)
    }

    /// Gate index driving each net, if any. Uses the first driver when several exist.
    pub fn gate_drivers(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.nets.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            if out[g.output.index()].is_none() {
                out[g.output.index()] = Some(gi);
            }
        }
        out
    }

    fn find_cycle(&self) -> Option<Vec<NetId>> {
        // Iterative DFS over nets following gate inputs (net -> driving gate -> its inputs).
        let drv = self.gate_drivers();
        let n = self.nets.len();
        let mut state = vec![0u8; n]; // 0 new, 1 on stack, 2 done
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            state[start] = 1;
            while let Some(&mut (net, ref mut pos)) = stack.last_mut() {
                let fanins: &[NetId] = match drv[net] {
                    Some(g) => &self.gates[g].inputs,
                    None => &[],
                };
                if *pos < fanins.len() {
                    let next = fanins[*pos].index();
                    *pos += 1;
                    match state[next] {
                        0 => {
                            state[next] = 1;
                            stack.push((next, 0));
                        }
                        1 => {
                            let begin = stack.iter().position(|&(s, _)| s == next).unwrap();
                            let mut cyc: Vec<NetId> = stack[begin..]
                                .iter()
                                .map(|&(s, _)| NetId(s as u32))
                                .collect();
                            cyc.reverse();
                            return Some(cyc);
                        }
                        _ => {}
                    }
                } else {
                    state[net] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Gate indices in topological order (every gate after the drivers of its inputs).
    ///
    /// Fails with the cycle diagnostic when the netlist is cyclic.
    pub fn topo_gates(&self) -> Result<Vec<usize>, NetlistError> {
        let drv = self.gate_drivers();
        let mut indeg = vec![0usize; self.gates.len()];
        let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); self.gates.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            for &i in &g.inputs {
                if let Some(d) = drv.get(i.index()).copied().flatten() {
                    indeg[gi] += 1;
                    fanout[d].push(gi);
                }
            }
        }
        let mut ready: std::collections::VecDeque<usize> =
            (0..self.gates.len()).filter(|&g| indeg[g] == 0).collect();
        let mut order = Vec::with_capacity(self.gates.len());
        while let Some(g) = ready.pop_front() {
            order.push(g);
            for &s in &fanout[g] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.push_back(s);
                }
            }
        }
        if order.len() != self.gates.len() {
            let cyc = self.find_cycle().unwrap_or_default();
            return Err(NetlistError::Invalid(vec![Diagnostic::Cycle {
                nets: cyc
                    .into_iter()
                    .map(|id| self.net_name(id).to_string())
                    .collect(),
            }]));
        }
        Ok(order)
    }

    /// Gate-input fanout per net (number of gate pins reading it).
    pub fn fanout_counts(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.nets.len()];
        for g in &self.gates {
            for &i in &g.inputs {
                out[i.index()] += 1;
            }
        }
        out
    }

    /// Readers of each net as gate indices.
    pub fn fanout_gates(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nets.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            for &i in &g.inputs {
                if out[i.index()].last() != Some(&gi) {
                    out[i.index()].push(gi);
                }
            }
        }
        out
    }

    /// Logic depth of every net: inputs and constants are 0, a gate output is
    /// one more than its deepest input.
    pub fn net_levels(&self) -> Result<Vec<u32>, NetlistError> {
        let order = self.topo_gates()?;
        let mut lv = vec![0u32; self.nets.len()];
        for gi in order {
            let g = &self.gates[gi];
            lv[g.output.index()] = 1 + g.inputs.iter().map(|i| lv[i.index()]).max().unwrap_or(0);
        }
        Ok(lv)
    }

    /// Nets in the transitive fanin of `roots`, roots included.
    pub fn transitive_fanin(&self, roots: &[NetId]) -> Vec<bool> {
        let drv = self.gate_drivers();
        let mut mark = vec![false; self.nets.len()];
        let mut stack: Vec<NetId> = roots.to_vec();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut mark[n.index()], true) {
                continue;
            }
            if let Some(g) = drv[n.index()] {
                stack.extend(self.gates[g].inputs.iter().copied());
            }
        }
        mark
    }

    /// Nets from which some primary output is reachable (primary outputs included).
    pub fn reaches_output(&self) -> Vec<bool> {
        self.transitive_fanin(&self.outputs)
    }

    /// Scalar simulation of one stimulus; returns the value of every net.
    pub fn simulate(&self, stimulus: &Assignment) -> Result<Assignment, NetlistError> {
        let mut pis = Vec::with_capacity(self.inputs.len());
        for &i in &self.inputs {
            let name = self.net_name(i);
            pis.push(
                stimulus
                    .get(name)
                    .ok_or_else(|| NetlistError::MissingInput(name.to_string()))?,
            );
        }
        for (k, _) in stimulus.iter() {
            match self.find(k) {
                Some(id) if self.inputs.contains(&id) => {}
                _ => return Err(NetlistError::NotAnInput(k.to_string())),
            }
        }
        let values = self.eval(&pis)?;
        Ok(self
            .nets
            .iter()
            .zip(values)
            .map(|(n, v)| (n.name.clone(), v))
            .collect())
    }

    /// Scalar simulation by input position; returns values indexed by [`NetId`].
    pub fn eval(&self, pis: &[bool]) -> Result<Vec<bool>, NetlistError> {
        let sim = PackedSim::new(self)?;
        let words: Vec<u64> = pis.iter().map(|&b| if b { !0 } else { 0 }).collect();
        let vals = sim.eval_word(&words)?;
        Ok(vals.into_iter().map(|w| w & 1 == 1).collect())
    }

    /// Primary output values by position.
    pub fn eval_outputs(&self, pis: &[bool]) -> Result<Vec<bool>, NetlistError> {
        let v = self.eval(pis)?;
        Ok(self.outputs.iter().map(|o| v[o.index()]).collect())
    }

    /// Builds the stimulus for `pis` by position.
    pub fn stimulus(&self, pis: &[bool]) -> Assignment {
        self.inputs
            .iter()
            .zip(pis)
            .map(|(&i, &b)| (self.net_name(i).to_string(), b))
            .collect()
    }

    /// Renames internal nets to `n0, n1, ...` and instances to `g0, g1, ...`
    /// in topological order. Ports keep their names; unused nets are dropped.
    pub fn reindexed(&self, module_name: &str) -> Result<Netlist, NetlistError> {
        let order = self.topo_gates()?;
        let mut b = NetlistBuilder::new(module_name);
        let mut map: HashMap<NetId, NetId> = HashMap::new();
        for &i in &self.inputs {
            map.insert(i, b.add_input(self.net_name(i))?);
        }
        let mut counter = 0usize;
        let mut fresh = |b: &mut NetlistBuilder| -> NetId {
            loop {
                let name = format!("n{counter}");
                counter += 1;
                if b.find(&name).is_none() {
                    return b.add_wire(&name).expect("fresh name");
                }
            }
        };
        // output nets are declared up front so their names are reserved
        for &o in &self.outputs {
            if !map.contains_key(&o) {
                map.insert(o, b.add_wire(self.net_name(o))?);
            }
        }
        for o in &self.outputs {
            b.mark_output(map[o]);
        }
        for (k, gi) in order.into_iter().enumerate() {
            let g = &self.gates[gi];
            let mut ins = Vec::with_capacity(g.inputs.len());
            for &i in &g.inputs {
                let id = match map.get(&i) {
                    Some(&id) => id,
                    None => match self.nets[i.index()].driver {
                        Driver::Const(v) => {
                            let c = b.constant(v);
                            map.insert(i, c);
                            c
                        }
                        _ => {
                            let id = fresh(&mut b);
                            map.insert(i, id);
                            id
                        }
                    },
                };
                ins.push(id);
            }
            let out = match map.get(&g.output) {
                Some(&id) => id,
                None => {
                    let id = fresh(&mut b);
                    map.insert(g.output, id);
                    id
                }
            };
            b.add_gate(g.kind, ins, out, format!("g{k}"));
        }
        Ok(b.build_unchecked())
    }
}

/// Incremental netlist construction.
#[derive(Debug, Clone)]
pub struct NetlistBuilder {
    nl: Netlist,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            nl: Netlist {
                name: name.into(),
                nets: Vec::new(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                gates: Vec::new(),
                index: HashMap::new(),
            },
        }
    }

    /// Starts from an existing netlist so gates and nets can be appended.
    pub fn from_netlist(nl: Netlist) -> Self {
        NetlistBuilder { nl }
    }

    pub fn find(&self, name: &str) -> Option<NetId> {
        self.nl.find(name)
    }

    pub fn netlist(&self) -> &Netlist {
        &self.nl
    }

    fn push_net(&mut self, name: &str, driver: Driver) -> Result<NetId, NetlistError> {
        if self.nl.index.contains_key(name) {
            return Err(NetlistError::DuplicateNet(name.to_string()));
        }
        let id = NetId(self.nl.nets.len() as u32);
        self.nl.nets.push(Net {
            name: name.to_string(),
            driver,
        });
        self.nl.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_input(&mut self, name: &str) -> Result<NetId, NetlistError> {
        let id = self.push_net(name, Driver::Input)?;
        self.nl.inputs.push(id);
        Ok(id)
    }

    pub fn add_wire(&mut self, name: &str) -> Result<NetId, NetlistError> {
        self.push_net(name, Driver::Undriven)
    }

    /// Returns the net named `name`, creating an undriven wire if needed.
    pub fn net(&mut self, name: &str) -> NetId {
        match self.nl.find(name) {
            Some(id) => id,
            None => self
                .push_net(name, Driver::Undriven)
                .expect("checked above"),
        }
    }

    /// Returns a fresh wire whose name starts with `prefix`.
    pub fn fresh_wire(&mut self, prefix: &str) -> NetId {
        let name = self.fresh_net_name(prefix);
        self.push_net(&name, Driver::Undriven).expect("fresh")
    }

    /// A net name starting with `prefix` that is not yet used.
    pub fn fresh_net_name(&self, prefix: &str) -> String {
        let mut k = self.nl.nets.len();
        loop {
            let name = format!("{prefix}{k}");
            if self.nl.find(&name).is_none() {
                return name;
            }
            k += 1;
        }
    }

    /// Returns a gate instance name starting with `prefix` that is not yet used.
    pub fn fresh_gate_name(&self, prefix: &str) -> String {
        let used: std::collections::HashSet<&str> =
            self.nl.gates.iter().map(|g| g.name.as_str()).collect();
        let mut k = self.nl.gates.len();
        loop {
            let name = format!("{prefix}{k}");
            if !used.contains(name.as_str()) {
                return name;
            }
            k += 1;
        }
    }

    /// The reserved constant net for `value`, created on first use.
    pub fn constant(&mut self, value: bool) -> NetId {
        let name = if value { CONST1_NAME } else { CONST0_NAME };
        match self.nl.find(name) {
            Some(id) => id,
            None => self.push_net(name, Driver::Const(value)).expect("reserved"),
        }
    }

    pub fn mark_output(&mut self, id: NetId) {
        self.nl.outputs.push(id);
    }

    pub fn add_gate(
        &mut self,
        kind: GateKind,
        inputs: Vec<NetId>,
        output: NetId,
        name: impl Into<String>,
    ) -> usize {
        let gi = self.nl.gates.len();
        let net = &mut self.nl.nets[output.index()];
        if net.driver == Driver::Undriven {
            net.driver = Driver::Gate(gi);
        }
        self.nl.gates.push(Gate {
            kind,
            inputs,
            output,
            name: name.into(),
        });
        gi
    }

    /// Moves the driver of `net` onto a new net, returning the new net.
    /// Readers of `net` are unaffected, so the caller can re-drive `net`.
    pub fn split_driver(&mut self, net: NetId, new_name: &str) -> Result<NetId, NetlistError> {
        let new = self.push_net(new_name, Driver::Undriven)?;
        if let Driver::Gate(gi) = self.nl.nets[net.index()].driver {
            self.nl.gates[gi].output = new;
            self.nl.nets[new.index()].driver = Driver::Gate(gi);
            self.nl.nets[net.index()].driver = Driver::Undriven;
        }
        Ok(new)
    }

    pub fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.nl.gates
    }

    /// Finishes without validation.
    pub fn build_unchecked(self) -> Netlist {
        self.nl
    }

    /// Finishes and validates; warnings are tolerated.
    pub fn build(self) -> Result<Netlist, NetlistError> {
        let diags = self.nl.validate();
        let errors: Vec<Diagnostic> = diags
            .into_iter()
            .filter(|d| d.severity() == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(self.nl)
        } else {
            Err(NetlistError::Invalid(errors))
        }
    }
}

/// Canonical JSON dump used by tooling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetlistDump {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub nets: Vec<NetDump>,
    pub gates: Vec<GateDump>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetDump {
    pub id: u32,
    pub name: String,
    pub driver: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateDump {
    pub name: String,
    pub kind: GateKind,
    pub output: String,
    pub inputs: Vec<String>,
}

impl Netlist {
    pub fn dump(&self) -> NetlistDump {
        NetlistDump {
            name: self.name.clone(),
            inputs: self.input_names().into_iter().map(String::from).collect(),
            outputs: self.output_names().into_iter().map(String::from).collect(),
            nets: self
                .nets
                .iter()
                .enumerate()
                .map(|(i, n)| NetDump {
                    id: i as u32,
                    name: n.name.clone(),
                    driver: match n.driver {
                        Driver::Input => "input".into(),
                        Driver::Gate(g) => self.gates[g].name.clone(),
                        Driver::Const(v) => format!("const{}", v as u8),
                        Driver::Undriven => "none".into(),
                    },
                })
                .collect(),
            gates: self
                .gates
                .iter()
                .map(|g| GateDump {
                    name: g.name.clone(),
                    kind: g.kind,
                    output: self.net_name(g.output).to_string(),
                    inputs: g
                        .inputs
                        .iter()
                        .map(|&i| self.net_name(i).to_string())
                        .collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FULL_ADDER: &str = "
        module fa(a, b, cin, sum, cout);
          input a, b, cin;
          output sum, cout;
          wire t1, t2, t3;
          xor x1(t1, a, b);
          xor x2(sum, t1, cin);
          and a1(t2, a, b);
          and a2(t3, t1, cin);
          or  o1(cout, t2, t3);
        endmodule";

    #[test]
    fn self_loop_is_cycle() {
        let mut b = NetlistBuilder::new("m");
        let a = b.add_input("a").unwrap();
        let w = b.add_wire("w").unwrap();
        b.add_gate(GateKind::And, vec![a, w], w, "g");
        b.mark_output(w);
        let d = b.build_unchecked().validate();
        assert!(matches!(&d[..], [Diagnostic::Cycle { nets }] if nets == &["w".to_string()]));
    }

    #[test]
    fn two_drivers_reported() {
        let mut b = NetlistBuilder::new("m");
        let a = b.add_input("a").unwrap();
        let c = b.add_input("c").unwrap();
        let w = b.add_wire("w").unwrap();
        b.add_gate(GateKind::Buf, vec![a], w, "g1");
        b.add_gate(GateKind::Not, vec![c], w, "g2");
        b.mark_output(w);
        let d = b.build_unchecked().validate();
        assert_eq!(
            d,
            vec![Diagnostic::MultipleDrivers {
                net: "w".into(),
                drivers: 2
            }]
        );
    }

    #[test]
    fn full_adder_valid() {
        let n = parse_netlist(FULL_ADDER).unwrap();
        assert!(n.validate().is_empty());
    }

    #[test]
    fn full_adder_truth() {
        let n = parse_netlist(FULL_ADDER).unwrap();
        let mut s = Assignment::new();
        s.set("a", true);
        s.set("b", true);
        s.set("cin", false);
        let r = n.simulate(&s).unwrap();
        assert_eq!(r.get("sum"), Some(false));
        assert_eq!(r.get("cout"), Some(true));
    }

    #[test]
    fn missing_binding_rejected() {
        let n = parse_netlist(FULL_ADDER).unwrap();
        let mut s = Assignment::new();
        s.set("a", true);
        assert!(matches!(n.simulate(&s), Err(NetlistError::MissingInput(p)) if p == "b"));
    }

    #[test]
    fn multi_input_nand() {
        let n =
            parse_netlist("module m(a,b,c,y); input a,b,c; output y; nand g(y,a,b,c); endmodule")
                .unwrap();
        assert_eq!(n.eval_outputs(&[true, true, true]).unwrap(), vec![false]);
        for v in 0..7u8 {
            let pis = [v & 1 != 0, v & 2 != 0, v & 4 != 0];
            assert_eq!(n.eval_outputs(&pis).unwrap(), vec![true]);
        }
    }

    #[test]
    fn xor_of_same_net() {
        let n = parse_netlist("module m(a,y); input a; output y; xor g(y,a,a); endmodule").unwrap();
        assert_eq!(n.eval_outputs(&[true]).unwrap(), vec![false]);
    }

    #[test]
    fn reindex_preserves_function() {
        let n = parse_netlist(FULL_ADDER).unwrap();
        let r = n.reindexed("anon").unwrap();
        assert!(r.validate().is_empty());
        assert_eq!(r.input_names(), n.input_names());
        assert_eq!(r.output_names(), n.output_names());
        for v in 0..8u8 {
            let pis = [v & 1 != 0, v & 2 != 0, v & 4 != 0];
            assert_eq!(r.eval_outputs(&pis).unwrap(), n.eval_outputs(&pis).unwrap());
        }
        assert!(r.gates().iter().all(|g| g.name.starts_with('g')));
    }
}

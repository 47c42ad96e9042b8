use serde::{Deserialize, Serialize};

use crate::netlist::{Driver, GateKind, Netlist, NetlistError};

/// Saturation value for every SCOAP measure.
pub const SCOAP_CAP: u32 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoapValues {
    pub cc0: Vec<u32>,
    pub cc1: Vec<u32>,
    pub co: Vec<u32>,
    /// Some value reached [`SCOAP_CAP`]. Constant nets and nets with no
    /// path to an output always do.
    pub saturated: bool,
}

impl ScoapValues {
    /// CC0 + CC1 + CO, the `scoap-hard` score.
    pub fn hardness(&self, net: usize) -> u64 {
        self.cc0[net] as u64 + self.cc1[net] as u64 + self.co[net] as u64
    }
}

fn sat(v: u64) -> u32 {
    v.min(SCOAP_CAP as u64) as u32
}

/// Minimum cost of driving the inputs to even (`.0`) and odd (`.1`) parity.
fn parity_costs(costs: impl Iterator<Item = (u64, u64)>) -> (u64, u64) {
    let inf = SCOAP_CAP as u64 * 64;
    costs.fold((0, inf), |(e, o), (c0, c1)| {
        ((e + c0).min(o + c1), (e + c1).min(o + c0))
    })
}

/// Goldstein SCOAP measures.
///
/// Primary inputs have CC0 = CC1 = 1 and primary outputs CO = 0. A constant
/// net costs 1 to hold at its value and [`SCOAP_CAP`] to flip. Multi-input
/// XOR/XNOR use the parity generalization of the two-input table.
pub fn scoap(n: &Netlist) -> Result<ScoapValues, NetlistError> {
    let order = n.topo_gates()?;
    let nets = n.net_count();
    let mut cc0 = vec![SCOAP_CAP as u64; nets];
    let mut cc1 = vec![SCOAP_CAP as u64; nets];
    for (i, net) in n.nets().iter().enumerate() {
        match net.driver {
            Driver::Input => (cc0[i], cc1[i]) = (1, 1),
            Driver::Const(false) => cc0[i] = 1,
            Driver::Const(true) => cc1[i] = 1,
            _ => {}
        }
    }
    for &gi in &order {
        let g = &n.gates()[gi];
        let c0 = || g.inputs.iter().map(|i| cc0[i.index()]);
        let c1 = || g.inputs.iter().map(|i| cc1[i.index()]);
        let (z, o) = match g.kind {
            GateKind::Buf => (c0().sum::<u64>(), c1().sum::<u64>()),
            GateKind::Not => (c1().sum::<u64>(), c0().sum::<u64>()),
            GateKind::And => (c0().min().unwrap(), c1().sum()),
            GateKind::Nand => (c1().sum(), c0().min().unwrap()),
            GateKind::Or => (c0().sum(), c1().min().unwrap()),
            GateKind::Nor => (c1().min().unwrap(), c0().sum()),
            GateKind::Xor | GateKind::Xnor => {
                let (e, odd) = parity_costs(c0().zip(c1()));
                if g.kind == GateKind::Xor {
                    (e, odd)
                } else {
                    (odd, e)
                }
            }
        };
        let out = g.output.index();
        cc0[out] = sat(z + 1) as u64;
        cc1[out] = sat(o + 1) as u64;
    }

    let mut co = vec![SCOAP_CAP as u64; nets];
    for &o in n.outputs() {
        co[o.index()] = 0;
    }
    for &gi in order.iter().rev() {
        let g = &n.gates()[gi];
        let base = co[g.output.index()];
        if base >= SCOAP_CAP as u64 {
            continue;
        }
        for (pin, &i) in g.inputs.iter().enumerate() {
            let others = g
                .inputs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != pin)
                .map(|(_, j)| j.index());
            let side: u64 = match g.kind {
                GateKind::Buf | GateKind::Not => 0,
                GateKind::And | GateKind::Nand => others.map(|j| cc1[j]).sum(),
                GateKind::Or | GateKind::Nor => others.map(|j| cc0[j]).sum(),
                GateKind::Xor | GateKind::Xnor => others.map(|j| cc0[j].min(cc1[j])).sum(),
            };
            let v = sat(base + side + 1) as u64;
            co[i.index()] = co[i.index()].min(v);
        }
    }
    let cap = SCOAP_CAP as u64;
    let saturated = cc0.iter().chain(&cc1).chain(&co).any(|&v| v >= cap);
    Ok(ScoapValues {
        cc0: cc0.into_iter().map(sat).collect(),
        cc1: cc1.into_iter().map(sat).collect(),
        co: co.into_iter().map(sat).collect(),
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    fn values(src: &str, net: &str) -> (u32, u32, u32) {
        let n = parse_netlist(src).unwrap();
        let s = scoap(&n).unwrap();
        let i = n.find(net).unwrap().index();
        (s.cc0[i], s.cc1[i], s.co[i])
    }

    #[test]
    fn two_input_and() {
        let src = "module t(a, b, y); input a, b; output y; and g(y, a, b); endmodule";
        assert_eq!(values(src, "y"), (2, 3, 0));
        // observing a needs b = 1
        assert_eq!(values(src, "a"), (1, 1, 2));
    }

    #[test]
    fn buffer_chain() {
        let src = "module t(a, y); input a; output y; wire p, q;
            buf b1(p, a); buf b2(q, p); buf b3(y, q); endmodule";
        assert_eq!(values(src, "y"), (4, 4, 0));
        assert_eq!(values(src, "a"), (1, 1, 3));
    }

    #[test]
    fn three_input_xor_parity() {
        let src = "module t(a, b, c, y); input a, b, c; output y; wire n; not i(n, c); xor g(y, a, b, n); endmodule";
        // n: cc0 = 2, cc1 = 2; even parity cheapest 1+1+2, odd 1+1+2
        assert_eq!(values(src, "y"), (5, 5, 0));
    }

    #[test]
    fn constants_and_dead_logic_saturate() {
        let src =
            "module t(a, y); input a; output y; wire d; and g(y, a, 1'b1); not h(d, a); endmodule";
        let n = parse_netlist(src).unwrap();
        let s = scoap(&n).unwrap();
        assert!(s.saturated);
        let d = n.find("d").unwrap().index();
        assert_eq!(s.co[d], SCOAP_CAP);
        assert_eq!(values(src, "y"), (2, 3, 0));
    }
}

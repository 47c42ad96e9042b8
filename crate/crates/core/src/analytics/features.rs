use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::analysis::{exact_signal_prob, scoap, signal_prob, SCOAP_CAP};
use crate::netlist::{Driver, GateKind, Netlist};

pub const FEATURE_DIM: usize = 32;
/// Bumped whenever an entry changes meaning or order.
pub const FEATURE_VERSION: u32 = 1;

/// Column names, in vector order.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "n_buf",
    "n_not",
    "n_and",
    "n_or",
    "n_xor",
    "n_nand",
    "n_nor",
    "n_xnor",
    "f_buf",
    "f_not",
    "f_and",
    "f_or",
    "f_xor",
    "f_nand",
    "f_nor",
    "f_xnor",
    "pis",
    "pos",
    "nets",
    "gates",
    "depth_max",
    "depth_mean",
    "fanout_max",
    "fanout_mean",
    "rare_fraction",
    "p_mean",
    "p_min",
    "cc0_mean",
    "cc1_mean",
    "co_mean",
    "fanin_mean",
    "xor_fraction",
];

/// Rarity threshold behind `rare_fraction`.
const RARE_THRESHOLD: f64 = 0.05;
/// Inputs up to which probabilities are exact.
const EXACT_INPUTS: usize = 16;
const SAMPLE_VECTORS: u64 = 16_384;
const SAMPLE_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<f64>);

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Structural and testability summary of a netlist.
///
/// Entries, in order ([`FEATURE_NAMES`]): gate counts per kind and the same
/// as fractions of all gates; PI, PO, net and gate counts; maximum and mean
/// logic level of gate outputs; maximum and mean fanout of driven nets;
/// fraction of gate outputs with signal probability below 0.05; mean and
/// minimum signal probability of gate outputs; mean CC0, CC1 and CO over
/// unsaturated values; mean fanin of multi-input gates; and the XOR/XNOR
/// fraction. Probabilities are exact up to 16 inputs and sampled with a
/// fixed seed beyond, so the vector is a pure function of the netlist.
pub fn extract_features(n: &Netlist) -> Result<FeatureVector, AnalyticsError> {
    let mut v = Vec::with_capacity(FEATURE_DIM);
    let gates = n.gate_count();
    let mut counts = [0usize; 8];
    for g in n.gates() {
        counts[g.kind.index()] += 1;
    }
    v.extend(counts.iter().map(|&c| c as f64));
    v.extend(counts.iter().map(|&c| if gates == 0 { 0.0 } else { c as f64 / gates as f64 }));
    v.extend([n.inputs().len() as f64, n.outputs().len() as f64, n.net_count() as f64, gates as f64]);

    let levels = n.net_levels().map_err(crate::analysis::AnalysisError::from)?;
    let outs: Vec<usize> = n.gates().iter().map(|g| g.output.index()).collect();
    v.push(outs.iter().map(|&o| levels[o]).max().unwrap_or(0) as f64);
    v.push(mean(outs.iter().map(|&o| levels[o] as f64)));

    let fanout = n.fanout_counts();
    let driven: Vec<usize> = (0..n.net_count())
        .filter(|&i| matches!(n.nets()[i].driver, Driver::Input | Driver::Gate(_)))
        .collect();
    v.push(driven.iter().map(|&i| fanout[i]).max().unwrap_or(0) as f64);
    v.push(mean(driven.iter().map(|&i| fanout[i] as f64)));

    let st = if n.inputs().len() <= EXACT_INPUTS { exact_signal_prob(n)? } else { signal_prob(n, SAMPLE_VECTORS, SAMPLE_SEED)? };
    let ps: Vec<f64> = outs.iter().map(|&o| st.p[o]).collect();
    v.push(if ps.is_empty() { 0.0 } else { ps.iter().filter(|&&p| p < RARE_THRESHOLD).count() as f64 / ps.len() as f64 });
    v.push(mean(ps.iter().copied()));
    v.push(ps.iter().copied().fold(f64::INFINITY, f64::min).min(1.0));

    let sc = scoap(n).map_err(crate::analysis::AnalysisError::from)?;
    for col in [&sc.cc0, &sc.cc1, &sc.co] {
        v.push(mean(col.iter().filter(|&&x| x < SCOAP_CAP).map(|&x| x as f64)));
    }
    v.push(mean(n.gates().iter().filter(|g| !g.kind.is_unary()).map(|g| g.inputs.len() as f64)));
    let xors = counts[GateKind::Xor.index()] + counts[GateKind::Xnor.index()];
    v.push(if gates == 0 { 0.0 } else { xors as f64 / gates as f64 });
    debug_assert_eq!(v.len(), FEATURE_DIM);
    Ok(FeatureVector(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    fn feat(src: &str) -> Vec<f64> {
        extract_features(&parse_netlist(src).unwrap()).unwrap().0
    }

    fn at(v: &[f64], name: &str) -> f64 {
        v[FEATURE_NAMES.iter().position(|n| *n == name).unwrap()]
    }

    #[test]
    fn full_adder_counts() {
        let v = feat(
            "module fa(a, b, cin, sum, cout); input a, b, cin; output sum, cout; wire t1, t2, t3;
            xor x1(t1, a, b); xor x2(sum, t1, cin); and a1(t2, a, b); and a2(t3, t1, cin); or o1(cout, t2, t3); endmodule",
        );
        assert_eq!(v.len(), FEATURE_DIM);
        assert_eq!((at(&v, "n_and"), at(&v, "n_xor"), at(&v, "n_or")), (2.0, 2.0, 1.0));
        assert_eq!((at(&v, "pis"), at(&v, "pos")), (3.0, 2.0));
        assert_eq!(at(&v, "xor_fraction"), 0.4);
        assert!(v.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn buffer_passthrough() {
        let v = feat("module t(a, b, y, z); input a, b; output y, z; buf g(y, a); buf h(z, b); endmodule");
        assert_eq!(at(&v, "depth_max"), 1.0);
        assert_eq!(at(&v, "n_buf"), 2.0);
        assert_eq!(v[1..8].iter().sum::<f64>(), 0.0);
    }
}

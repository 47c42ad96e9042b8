//! Testability measures used to pick (and to hunt for) rare trigger nets:
//! SCOAP controllability/observability, signal probability and transition
//! probability.

mod prob;
mod rare;
mod scoap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Netlist, NetlistError};

pub use prob::{exact_signal_prob, signal_prob, NetStats, EXACT_PROB_BOUND};
pub use rare::{rare_nets, Metric, RareNet, RarePartition, RareSource};
pub use scoap::{scoap, ScoapValues, SCOAP_CAP};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{inputs} primary inputs exceed the exhaustive bound of {bound}")]
    TooManyInputs { inputs: usize, bound: usize },
    #[error("at least one vector is required")]
    NoVectors,
    #[error("unknown metric `{0}` (expected signal-prob-low, signal-prob-high or scoap-hard)")]
    UnknownMetric(String),
    #[error("metric {metric} needs {needs}")]
    WrongSource {
        metric: &'static str,
        needs: &'static str,
    },
    #[error("analysis covers {got} nets but the netlist has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// One row of the `analyze` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub net: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cc0: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cc1: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub co: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp: Option<f64>,
}

/// Joins whichever measures were computed into per-net rows.
pub fn report(n: &Netlist, sc: Option<&ScoapValues>, st: Option<&NetStats>) -> Vec<NetReport> {
    (0..n.net_count())
        .map(|i| NetReport {
            net: n.nets()[i].name.clone(),
            cc0: sc.map(|s| s.cc0[i]),
            cc1: sc.map(|s| s.cc1[i]),
            co: sc.map(|s| s.co[i]),
            p: st.map(|s| s.p[i]),
            tp: st.map(|s| s.transition(i)),
        })
        .collect()
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, NetStats, ScoapValues};
use crate::netlist::{NetId, Netlist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// p < θ: nets that are rarely 1.
    SignalProbLow,
    /// p > 1 - θ: nets that are rarely 0.
    SignalProbHigh,
    /// CC0 + CC1 + CO ≥ θ.
    ScoapHard,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::SignalProbLow => "signal-prob-low",
            Metric::SignalProbHigh => "signal-prob-high",
            Metric::ScoapHard => "scoap-hard",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Metric::SignalProbLow,
            Metric::SignalProbHigh,
            Metric::ScoapHard,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| AnalysisError::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum RareSource<'a> {
    Stats(&'a NetStats),
    Scoap(&'a ScoapValues),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RareNet {
    pub net: NetId,
    /// The metric value: p for the probability metrics, CC0+CC1+CO for SCOAP.
    pub score: f64,
    /// The value the net rarely takes.
    pub rare_value: bool,
}

/// Rare nets (rarest first) and the remaining regular nets (by id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RarePartition {
    pub rare: Vec<RareNet>,
    pub regular: Vec<NetId>,
}

/// Splits the nets of `n` into rare and regular ones.
///
/// For the probability metrics a threshold of 1 or more selects every net,
/// so that the partition covers the whole netlist even for constant nets.
pub fn rare_nets(
    n: &Netlist,
    source: RareSource,
    metric: Metric,
    threshold: f64,
) -> Result<RarePartition, AnalysisError> {
    let nets = n.net_count();
    let len = match source {
        RareSource::Stats(s) => s.p.len(),
        RareSource::Scoap(s) => s.cc0.len(),
    };
    if len != nets {
        return Err(AnalysisError::SizeMismatch {
            expected: nets,
            got: len,
        });
    }
    let mut rare = Vec::new();
    let mut regular = Vec::new();
    for i in 0..nets {
        let id = NetId(i as u32);
        let hit = match (metric, source) {
            (Metric::SignalProbLow, RareSource::Stats(s)) => {
                let p = s.p[i];
                (threshold >= 1.0 || p < threshold).then_some(RareNet {
                    net: id,
                    score: p,
                    rare_value: s.rare_value(i),
                })
            }
            (Metric::SignalProbHigh, RareSource::Stats(s)) => {
                let p = s.p[i];
                (threshold >= 1.0 || p > 1.0 - threshold).then_some(RareNet {
                    net: id,
                    score: p,
                    rare_value: s.rare_value(i),
                })
            }
            (Metric::ScoapHard, RareSource::Scoap(s)) => {
                let h = s.hardness(i) as f64;
                (h >= threshold).then_some(RareNet {
                    net: id,
                    score: h,
                    rare_value: s.cc1[i] >= s.cc0[i],
                })
            }
            (m, _) => {
                let needs = if m == Metric::ScoapHard {
                    "SCOAP values"
                } else {
                    "signal probabilities"
                };
                return Err(AnalysisError::WrongSource {
                    metric: m.name(),
                    needs,
                });
            }
        };
        match hit {
            Some(r) => rare.push(r),
            None => regular.push(id),
        }
    }
    rare.sort_by(|a, b| {
        let ord = match metric {
            Metric::SignalProbLow => a.score.total_cmp(&b.score),
            Metric::SignalProbHigh | Metric::ScoapHard => b.score.total_cmp(&a.score),
        };
        ord.then(a.net.cmp(&b.net))
    });
    Ok(RarePartition { rare, regular })
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::equiv::random_words;
use crate::netlist::{Netlist, PackedSim};

/// Largest input count [`exact_signal_prob`] enumerates.
pub const EXACT_PROB_BOUND: usize = 24;

/// Words simulated per RNG stream (and per parallel task).
const STREAM_WORDS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetStats {
    /// Probability of each net being 1 under uniform random inputs.
    pub p: Vec<f64>,
    /// Number of input vectors behind `p`.
    pub samples: u64,
    /// Whether `p` is exact (every input vector was enumerated).
    pub exact: bool,
}

impl NetStats {
    /// Chance that the net toggles between two independent vectors, 2p(1-p).
    /// The expected wait for a toggle is its reciprocal.
    pub fn transition(&self, net: usize) -> f64 {
        let p = self.p[net];
        2.0 * p * (1.0 - p)
    }

    /// Probability of the net's rarer value.
    pub fn rare_value(&self, net: usize) -> bool {
        self.p[net] <= 0.5
    }
}

fn count_words(sim: &PackedSim, rows: impl Iterator<Item = (Vec<u64>, u64)>, counts: &mut [u64]) {
    let mut vals = Vec::new();
    for (ins, mask) in rows {
        sim.eval_into(&ins, &mut vals).expect("width matches");
        for (c, v) in counts.iter_mut().zip(&vals) {
            *c += (v & mask).count_ones() as u64;
        }
    }
}

fn sum_counts(parts: impl ParallelIterator<Item = Vec<u64>>, nets: usize) -> Vec<u64> {
    parts.reduce(
        || vec![0; nets],
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}

/// Monte-Carlo signal probability over `vectors` seeded uniform vectors.
/// Batches use independent RNG streams, so the result does not depend on
/// thread count.
pub fn signal_prob(n: &Netlist, vectors: u64, seed: u64) -> Result<NetStats, AnalysisError> {
    if vectors == 0 {
        return Err(AnalysisError::NoVectors);
    }
    let sim = PackedSim::new(n)?;
    let pis = n.inputs().len();
    let words = vectors.div_ceil(64);
    let streams = words.div_ceil(STREAM_WORDS);
    let counts = sum_counts(
        (0..streams).into_par_iter().map(|s| {
            let first = s * STREAM_WORDS;
            let len = STREAM_WORDS.min(words - first) as usize;
            let rows = random_words(seed, s, pis, len);
            let mut counts = vec![0u64; sim.net_count()];
            let batch = (0..len).map(|w| {
                let index = (first + w as u64) * 64;
                let mask = if index + 64 > vectors {
                    (1u64 << (vectors - index)) - 1
                } else {
                    !0
                };
                (rows.iter().map(|r| r[w]).collect(), mask)
            });
            count_words(&sim, batch, &mut counts);
            counts
        }),
        sim.net_count(),
    );
    Ok(NetStats {
        p: counts.iter().map(|&c| c as f64 / vectors as f64).collect(),
        samples: vectors,
        exact: false,
    })
}

const MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Exact signal probability by enumerating all 2^PI input vectors.
pub fn exact_signal_prob(n: &Netlist) -> Result<NetStats, AnalysisError> {
    let pis = n.inputs().len();
    if pis > EXACT_PROB_BOUND {
        return Err(AnalysisError::TooManyInputs {
            inputs: pis,
            bound: EXACT_PROB_BOUND,
        });
    }
    let sim = PackedSim::new(n)?;
    let words: u64 = if pis <= 6 { 1 } else { 1 << (pis - 6) };
    let mask: u64 = if pis >= 6 {
        !0
    } else {
        (1u64 << (1u32 << pis)) - 1
    };
    let tasks = words.div_ceil(STREAM_WORDS);
    let counts = sum_counts(
        (0..tasks).into_par_iter().map(|t| {
            let mut counts = vec![0u64; sim.net_count()];
            let end = ((t + 1) * STREAM_WORDS).min(words);
            let batch = (t * STREAM_WORDS..end).map(|w| {
                let ins = (0..pis)
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
                (ins, mask)
            });
            count_words(&sim, batch, &mut counts);
            counts
        }),
        sim.net_count(),
    );
    let total = 1u64 << pis;
    Ok(NetStats {
        p: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        samples: total,
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    fn p_of(src: &str, net: &str, st: &NetStats) -> f64 {
        let n = parse_netlist(src).unwrap();
        st.p[n.find(net).unwrap().index()]
    }

    const AND: &str = "module t(a, b, y); input a, b; output y; and g(y, a, b); endmodule";

    #[test]
    fn exact_small_cases() {
        let n = parse_netlist(AND).unwrap();
        assert_eq!(p_of(AND, "y", &exact_signal_prob(&n).unwrap()), 0.25);
        let maj = "module m(a, b, c, y); input a, b, c; output y; wire x, z, w;
            and g1(x, a, b); and g2(z, a, c); and g3(w, b, c); or g4(y, x, z, w); endmodule";
        let n = parse_netlist(maj).unwrap();
        assert_eq!(p_of(maj, "y", &exact_signal_prob(&n).unwrap()), 0.5);
        let one = "module k(a, y); input a; output y; or g(y, a, 1'b1); endmodule";
        let n = parse_netlist(one).unwrap();
        let st = exact_signal_prob(&n).unwrap();
        assert_eq!(p_of(one, "y", &st), 1.0);
        assert_eq!(p_of(one, "1'b1", &st), 1.0);
    }

    #[test]
    fn sampled_and_xor() {
        let n = parse_netlist(AND).unwrap();
        let st = signal_prob(&n, 100_000, 7).unwrap();
        assert!((p_of(AND, "y", &st) - 0.25).abs() <= 0.01);
        assert_eq!(st, signal_prob(&n, 100_000, 7).unwrap());
        let x = "module t(a, b, y); input a, b; output y; xor g(y, a, b); endmodule";
        let st = signal_prob(&parse_netlist(x).unwrap(), 100_000, 7).unwrap();
        assert!((p_of(x, "y", &st) - 0.5).abs() <= 0.01);
        assert!(st.transition(2) <= 0.5);
    }

    #[test]
    fn odd_vector_counts_are_masked() {
        let one = "module k(a, y); input a; output y; or g(y, a, 1'b1); endmodule";
        let st = signal_prob(&parse_netlist(one).unwrap(), 65, 1).unwrap();
        assert_eq!(p_of(one, "y", &st), 1.0);
        assert!(signal_prob(&parse_netlist(one).unwrap(), 0, 1).is_err());
    }
}

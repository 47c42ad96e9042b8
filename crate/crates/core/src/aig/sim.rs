//! Bit-parallel AIG simulation.
//!
//! Signatures are packed little-endian: bit `j` of word `w` holds the node
//! value under stimulus `64 * w + j`. [`Signatures::to_le_bytes`] serializes
//! node by node in that order.

use rayon::prelude::*;

use super::{Aig, AigError, Lit, Node};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signatures {
    words: usize,
    data: Vec<u64>,
}

impl Signatures {
    pub fn words(&self) -> usize {
        self.words
    }

    pub fn node(&self, i: u32) -> &[u64] {
        let s = i as usize * self.words;
        &self.data[s..s + self.words]
    }

    pub fn lit(&self, l: Lit) -> Vec<u64> {
        let c = if l.is_complemented() { !0 } else { 0 };
        self.node(l.node()).iter().map(|w| w ^ c).collect()
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.data.iter().flat_map(|w| w.to_le_bytes()).collect()
    }
}

/// Words evaluated per parallel chunk.
const CHUNK: usize = 64;

impl Aig {
    /// One word of stimulus per input; `values` receives one word per node.
    pub fn eval_word_into(&self, inputs: &[u64], values: &mut Vec<u64>) {
        values.clear();
        values.resize(self.len(), 0);
        values[0] = !0;
        for (i, n) in self.nodes().iter().enumerate() {
            match *n {
                Node::Const => {}
                Node::Input(p) => values[i] = inputs[p as usize],
                Node::And(a, b) => {
                    let va = values[a.node() as usize] ^ if a.is_complemented() { !0 } else { 0 };
                    let vb = values[b.node() as usize] ^ if b.is_complemented() { !0 } else { 0 };
                    values[i] = va & vb;
                }
            }
        }
    }

    /// Output words for one stimulus word per input.
    pub fn eval_outputs_word(&self, inputs: &[u64], scratch: &mut Vec<u64>) -> Vec<u64> {
        self.eval_word_into(inputs, scratch);
        self.outputs()
            .iter()
            .map(|(_, l)| scratch[l.node() as usize] ^ if l.is_complemented() { !0 } else { 0 })
            .collect()
    }

    /// Scalar evaluation of the outputs.
    pub fn eval_outputs(&self, inputs: &[bool]) -> Vec<bool> {
        let words: Vec<u64> = inputs.iter().map(|&b| if b { !0 } else { 0 }).collect();
        let mut scratch = Vec::new();
        self.eval_outputs_word(&words, &mut scratch)
            .into_iter()
            .map(|w| w & 1 == 1)
            .collect()
    }

    /// Simulates `W` words per input; the result is independent of how the
    /// words are split across worker threads.
    pub fn simulate(&self, stimulus: &[Vec<u64>]) -> Result<Signatures, AigError> {
        if stimulus.len() != self.input_count() {
            return Err(AigError::WidthMismatch {
                expected: self.input_count(),
                got: stimulus.len(),
            });
        }
        let words = stimulus.first().map_or(1, |s| s.len());
        if stimulus.iter().any(|s| s.len() != words) {
            return Err(AigError::RaggedStimulus);
        }
        let n = self.len();
        let chunks: Vec<(usize, Vec<Vec<u64>>)> = (0..words)
            .step_by(CHUNK)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|start| {
                let end = (start + CHUNK).min(words);
                let mut scratch = Vec::new();
                let mut per_word = Vec::with_capacity(end - start);
                let mut ins = vec![0u64; self.input_count()];
                for w in start..end {
                    for (k, s) in stimulus.iter().enumerate() {
                        ins[k] = s[w];
                    }
                    self.eval_word_into(&ins, &mut scratch);
                    per_word.push(scratch.clone());
                }
                (start, per_word)
            })
            .collect();
        let mut data = vec![0u64; n * words];
        for (start, per_word) in chunks {
            for (off, vals) in per_word.into_iter().enumerate() {
                let w = start + off;
                for (i, v) in vals.into_iter().enumerate() {
                    data[i * words + w] = v;
                }
            }
        }
        Ok(Signatures { words, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_of_patterns() {
        let mut g = Aig::new("t");
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, b);
        g.add_output("x", x);
        let s = g.simulate(&[vec![0b1100], vec![0b1010]]).unwrap();
        assert_eq!(s.node(x.node())[0] & 0xF, 0b1000);
        assert_eq!(s.lit(!a)[0] & 0xF, 0b0011);
    }

    #[test]
    fn width_mismatch() {
        let mut g = Aig::new("t");
        g.add_input("a");
        assert!(matches!(
            g.simulate(&[]),
            Err(AigError::WidthMismatch { .. })
        ));
        g.add_input("b");
        assert!(matches!(
            g.simulate(&[vec![1, 2], vec![3]]),
            Err(AigError::RaggedStimulus)
        ));
    }

    #[test]
    fn byte_packing_is_little_endian() {
        let mut g = Aig::new("t");
        g.add_input("a");
        let s = g.simulate(&[vec![0x0102]]).unwrap();
        let bytes = s.to_le_bytes();
        // node 0 (constant true) then node 1
        assert_eq!(&bytes[..8], &[0xFF; 8]);
        assert_eq!(&bytes[8..10], &[0x02, 0x01]);
    }
}

//! Multi-word truth tables over up to 20 variables.
//!
//! Bit `m` of the table is the function value on minterm `m`, where variable
//! `i` is bit `i` of `m`. Tables over fewer than 6 variables still occupy one
//! word; unused high bits are kept zero.

use std::ops::{BitAnd, BitOr, BitXor, Not};

pub const MAX_VARS: usize = 20;

const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    vars: usize,
    words: Vec<u64>,
}

fn word_count(vars: usize) -> usize {
    if vars <= 6 {
        1
    } else {
        1 << (vars - 6)
    }
}

fn tail_mask(vars: usize) -> u64 {
    if vars >= 6 {
        !0
    } else {
        (1u64 << (1 << vars)) - 1
    }
}

impl TruthTable {
    pub fn zero(vars: usize) -> Self {
        assert!(
            vars <= MAX_VARS,
            "truth table limited to {MAX_VARS} variables"
        );
        TruthTable {
            vars,
            words: vec![0; word_count(vars)],
        }
    }

    pub fn one(vars: usize) -> Self {
        let mut t = Self::zero(vars);
        t.words.iter_mut().for_each(|w| *w = !0);
        t.mask();
        t
    }

    pub fn var(vars: usize, i: usize) -> Self {
        assert!(i < vars);
        let mut t = Self::zero(vars);
        if i < 6 {
            t.words.iter_mut().for_each(|w| *w = VAR_MASKS[i]);
        } else {
            let stride = 1usize << (i - 6);
            for (k, w) in t.words.iter_mut().enumerate() {
                if (k / stride) & 1 == 1 {
                    *w = !0;
                }
            }
        }
        t.mask();
        t
    }

    pub fn from_words(vars: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), word_count(vars));
        let mut t = TruthTable { vars, words };
        t.mask();
        t
    }

    /// Table over `vars <= 6` variables from a single word.
    pub fn from_u64(vars: usize, word: u64) -> Self {
        Self::from_words(vars, vec![word])
    }

    fn mask(&mut self) {
        let m = tail_mask(self.vars);
        if let Some(w) = self.words.last_mut() {
            *w &= m;
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn as_u64(&self) -> u64 {
        self.words[0]
    }

    pub fn bit(&self, m: usize) -> bool {
        (self.words[m / 64] >> (m % 64)) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.vars)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Cofactor with variable `i` fixed to `value`, replicated over both halves.
    pub fn cofactor(&self, i: usize, value: bool) -> Self {
        let mut t = self.clone();
        if i < 6 {
            let m = VAR_MASKS[i];
            let s = 1u32 << i;
            for w in &mut t.words {
                *w = if value {
                    let hi = *w & m;
                    hi | (hi >> s)
                } else {
                    let lo = *w & !m;
                    lo | (lo << s)
                };
            }
        } else {
            let stride = 1usize << (i - 6);
            let n = t.words.len();
            let mut k = 0;
            while k < n {
                for j in 0..stride {
                    let (lo, hi) = (k + j, k + j + stride);
                    if value {
                        t.words[lo] = t.words[hi];
                    } else {
                        t.words[hi] = t.words[lo];
                    }
                }
                k += 2 * stride;
            }
        }
        t.mask();
        t
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.cofactor(i, false) != self.cofactor(i, true)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.vars).filter(|&i| self.depends_on(i)).collect()
    }

    pub fn implies(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

impl Not for &TruthTable {
    type Output = TruthTable;
    fn not(self) -> TruthTable {
        let mut t = TruthTable {
            vars: self.vars,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.mask();
        t
    }
}

impl Not for TruthTable {
    type Output = TruthTable;
    fn not(self) -> TruthTable {
        !&self
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for &TruthTable {
            type Output = TruthTable;
            fn $f(self, rhs: &TruthTable) -> TruthTable {
                assert_eq!(self.vars, rhs.vars);
                TruthTable { vars: self.vars, words: self.words.iter().zip(&rhs.words).map(|(a, b)| a $op b).collect() }
            }
        }
        impl $tr for TruthTable {
            type Output = TruthTable;
            fn $f(self, rhs: TruthTable) -> TruthTable {
                (&self).$f(&rhs)
            }
        }
    };
}

binop!(BitAnd, bitand, &);
binop!(BitOr, bitor, |);
binop!(BitXor, bitxor, ^);

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(vars: usize, f: impl Fn(usize) -> bool) -> TruthTable {
        let mut words = vec![0u64; word_count(vars)];
        for m in 0..(1usize << vars) {
            if f(m) {
                words[m / 64] |= 1 << (m % 64);
            }
        }
        TruthTable::from_words(vars, words)
    }

    #[test]
    fn variables_match_minterm_bits() {
        for vars in [1, 3, 6, 8, 10] {
            for i in 0..vars {
                assert_eq!(TruthTable::var(vars, i), brute(vars, |m| (m >> i) & 1 == 1));
            }
        }
    }

    #[test]
    fn cofactors_match_brute_force() {
        let vars = 9;
        let f = brute(vars, |m| ((m * 2654435761usize) >> 7) & 1 == 1);
        for i in 0..vars {
            for v in [false, true] {
                let want = brute(vars, |m| {
                    let mm = if v { m | (1 << i) } else { m & !(1 << i) };
                    f.bit(mm)
                });
                assert_eq!(f.cofactor(i, v), want, "var {i} = {v}");
            }
        }
    }

    #[test]
    fn support_of_and() {
        let t = &TruthTable::var(4, 1) & &TruthTable::var(4, 3);
        assert_eq!(t.support(), vec![1, 3]);
        assert!(!(!&t).is_one());
        assert_eq!(TruthTable::one(3).count_ones(), 8);
    }
}

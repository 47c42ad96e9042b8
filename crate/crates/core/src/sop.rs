//! Irredundant sum-of-products covers and algebraic factoring.

use crate::tt::TruthTable;

/// A product term: `pos` and `neg` are bitmasks of variables appearing
/// uncomplemented and complemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub pos: u32,
    pub neg: u32,
}

impl Cube {
    pub const TAUTOLOGY: Cube = Cube { pos: 0, neg: 0 };

    pub fn literal_count(self) -> u32 {
        self.pos.count_ones() + self.neg.count_ones()
    }

    pub fn has(self, lit: Literal) -> bool {
        let m = 1u32 << lit.var;
        if lit.neg {
            self.neg & m != 0
        } else {
            self.pos & m != 0
        }
    }

    pub fn without(self, lit: Literal) -> Cube {
        let m = !(1u32 << lit.var);
        if lit.neg {
            Cube {
                pos: self.pos,
                neg: self.neg & m,
            }
        } else {
            Cube {
                pos: self.pos & m,
                neg: self.neg,
            }
        }
    }

    pub fn literals(self) -> impl Iterator<Item = Literal> {
        (0..32u8).flat_map(move |v| {
            let p = (self.pos >> v) & 1 == 1;
            let n = (self.neg >> v) & 1 == 1;
            [(p, false), (n, true)]
                .into_iter()
                .filter(|x| x.0)
                .map(move |(_, neg)| Literal { var: v, neg })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u8,
    pub neg: bool,
}

/// Minato-Morreale irredundant SOP of a completely specified function.
pub fn isop(f: &TruthTable) -> Vec<Cube> {
    let mut cubes = Vec::new();
    isop_rec(f, f, f.vars(), &mut cubes);
    cubes
}

fn isop_rec(lower: &TruthTable, upper: &TruthTable, top: usize, out: &mut Vec<Cube>) -> TruthTable {
    let n = lower.vars();
    if lower.is_zero() {
        return TruthTable::zero(n);
    }
    if upper.is_one() {
        out.push(Cube::TAUTOLOGY);
        return TruthTable::one(n);
    }
    let var = (0..top)
        .rev()
        .find(|&v| lower.depends_on(v) || upper.depends_on(v))
        .expect("non-constant bounds depend on some variable");
    let (l0, l1) = (lower.cofactor(var, false), lower.cofactor(var, true));
    let (u0, u1) = (upper.cofactor(var, false), upper.cofactor(var, true));

    let start0 = out.len();
    let r0 = isop_rec(&(&l0 & &!&u1), &u0, var, out);
    for c in &mut out[start0..] {
        c.neg |= 1 << var;
    }
    let start1 = out.len();
    let r1 = isop_rec(&(&l1 & &!&u0), &u1, var, out);
    for c in &mut out[start1..] {
        c.pos |= 1 << var;
    }
    let rest_lower = &(&l0 & &!&r0) | &(&l1 & &!&r1);
    let rs = isop_rec(&rest_lower, &(&u0 & &u1), var, out);

    let x = TruthTable::var(n, var);
    &(&(&r0 & &!&x) | &(&r1 & &x)) | &rs
}

/// Evaluates a cover as a truth table over `vars` variables.
pub fn cover_truth(cubes: &[Cube], vars: usize) -> TruthTable {
    let mut acc = TruthTable::zero(vars);
    for c in cubes {
        let mut t = TruthTable::one(vars);
        for l in c.literals() {
            let v = TruthTable::var(vars, l.var as usize);
            t = &t & &if l.neg { !&v } else { v };
        }
        acc = &acc | &t;
    }
    acc
}

/// Factored form over leaf variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Lit(Literal),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

impl Expr {
    /// Number of two-input ANDs needed to build this form without sharing.
    pub fn and_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Lit(_) => 0,
            Expr::And(xs) | Expr::Or(xs) => {
                xs.len().saturating_sub(1) + xs.iter().map(Expr::and_count).sum::<usize>()
            }
        }
    }

    pub fn eval(&self, assignment: u32) -> bool {
        match self {
            Expr::Const(v) => *v,
            Expr::Lit(l) => ((assignment >> l.var) & 1 == 1) != l.neg,
            Expr::And(xs) => xs.iter().all(|x| x.eval(assignment)),
            Expr::Or(xs) => xs.iter().any(|x| x.eval(assignment)),
        }
    }
}

fn cube_expr(c: Cube) -> Expr {
    let lits: Vec<Expr> = c.literals().map(Expr::Lit).collect();
    match lits.len() {
        0 => Expr::Const(true),
        1 => lits.into_iter().next().unwrap(),
        _ => Expr::And(lits),
    }
}

fn or_of(mut xs: Vec<Expr>) -> Expr {
    // flatten nested ORs
    let mut flat = Vec::with_capacity(xs.len());
    for x in xs.drain(..) {
        match x {
            Expr::Or(inner) => flat.extend(inner),
            Expr::Const(false) => {}
            other => flat.push(other),
        }
    }
    if flat.iter().any(|x| *x == Expr::Const(true)) {
        return Expr::Const(true);
    }
    match flat.len() {
        0 => Expr::Const(false),
        1 => flat.pop().unwrap(),
        _ => Expr::Or(flat),
    }
}

fn and_of(mut xs: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(xs.len());
    for x in xs.drain(..) {
        match x {
            Expr::And(inner) => flat.extend(inner),
            Expr::Const(true) => {}
            other => flat.push(other),
        }
    }
    if flat.iter().any(|x| *x == Expr::Const(false)) {
        return Expr::Const(false);
    }
    match flat.len() {
        0 => Expr::Const(true),
        1 => flat.pop().unwrap(),
        _ => Expr::And(flat),
    }
}

/// Algebraic factoring by repeated division on the most frequent literal.
pub fn factor(cubes: &[Cube]) -> Expr {
    if cubes.is_empty() {
        return Expr::Const(false);
    }
    if cubes.iter().any(|&c| c == Cube::TAUTOLOGY) {
        return Expr::Const(true);
    }
    if cubes.len() == 1 {
        return cube_expr(cubes[0]);
    }
    let mut best: Option<(usize, Literal)> = None;
    for var in 0..32u8 {
        for neg in [false, true] {
            let lit = Literal { var, neg };
            let count = cubes.iter().filter(|c| c.has(lit)).count();
            if count >= 2 && best.map_or(true, |(b, _)| count > b) {
                best = Some((count, lit));
            }
        }
    }
    let Some((_, lit)) = best else {
        return or_of(cubes.iter().map(|&c| cube_expr(c)).collect());
    };
    let quotient: Vec<Cube> = cubes
        .iter()
        .filter(|c| c.has(lit))
        .map(|c| c.without(lit))
        .collect();
    let remainder: Vec<Cube> = cubes.iter().filter(|c| !c.has(lit)).copied().collect();
    let divided = and_of(vec![Expr::Lit(lit), factor(&quotient)]);
    if remainder.is_empty() {
        divided
    } else {
        or_of(vec![divided, factor(&remainder)])
    }
}

/// Factored form of `f`, or of its complement with `true` when cheaper.
pub fn factor_function(f: &TruthTable) -> (Expr, bool) {
    let pos = factor(&isop(f));
    let neg = factor(&isop(&!f));
    if neg.and_count() < pos.and_count() {
        (neg, true)
    } else {
        (pos, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn expr_truth(e: &Expr, vars: usize) -> TruthTable {
        let mut words = vec![0u64; if vars <= 6 { 1 } else { 1 << (vars - 6) }];
        for m in 0..(1u32 << vars) {
            if e.eval(m) {
                words[m as usize / 64] |= 1 << (m % 64);
            }
        }
        TruthTable::from_words(vars, words)
    }

    #[test]
    fn factoring_shares_common_literal() {
        // ab + ac
        let a = TruthTable::var(3, 0);
        let b = TruthTable::var(3, 1);
        let c = TruthTable::var(3, 2);
        let f = &(&a & &b) | &(&a & &c);
        let (e, neg) = factor_function(&f);
        assert!(!neg);
        assert_eq!(e.and_count(), 2);
        assert_eq!(expr_truth(&e, 3), f);
    }

    #[test]
    fn xor_cover_has_two_cubes() {
        let f = &TruthTable::var(2, 0) ^ &TruthTable::var(2, 1);
        let cubes = isop(&f);
        assert_eq!(cubes.len(), 2);
        assert_eq!(cover_truth(&cubes, 2), f);
    }

    proptest! {
        #[test]
        fn isop_and_factor_are_exact(vars in 1usize..9, seed in any::<u64>()) {
            let words = if vars <= 6 { 1 } else { 1 << (vars - 6) };
            let mut x = seed | 1;
            let ws: Vec<u64> = (0..words).map(|_| { x ^= x << 13; x ^= x >> 7; x ^= x << 17; x }).collect();
            let f = TruthTable::from_words(vars, ws);
            let cubes = isop(&f);
            prop_assert_eq!(cover_truth(&cubes, vars), f.clone());
            // irredundant: dropping any cube changes the function
            for i in 0..cubes.len() {
                let mut fewer = cubes.clone();
                fewer.remove(i);
                prop_assert_ne!(cover_truth(&fewer, vars), f.clone());
            }
            let (e, neg) = factor_function(&f);
            let t = expr_truth(&e, vars);
            prop_assert_eq!(if neg { !t } else { t }, f);
        }
    }
}

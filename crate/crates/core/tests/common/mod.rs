//! Test-only reference: moments of the second-order operator solution
//! computed term by term, with no closed-form algebra.
//!
//! Each Heisenberg operator `x(t)` is a list of terms (coefficient, order
//! in the couplings, word in the initial ladder operators). Products are
//! expanded and truncated at second order; each word is then evaluated in
//! the coherent product state by commuting it into normal order one mode
//! at a time.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;
use raman_witness::coefficients::CoefficientSet;
use raman_witness::model::{CoherentAmplitudes, Criterion, Mode, WitnessSpec};
use raman_witness::moments::{required_moments, MomentKey, MomentTable};

/// A ladder operator at `t = 0`: mode index and whether it is a creator.
type Letter = (u8, bool);

#[derive(Clone, Debug)]
struct Term {
    coef: Complex64,
    order: u8,
    word: Vec<Letter>,
}

const A: Letter = (0, false);
const AD: Letter = (0, true);
const B: Letter = (1, false);
const BD: Letter = (1, true);
const C: Letter = (2, false);
const CD: Letter = (2, true);
const D: Letter = (3, false);
const DD: Letter = (3, true);

/// Order-resolved value: contributions of order 0, 1 and 2 in the couplings.
pub type Graded = [Complex64; 3];

pub struct Expansion {
    ops: [Vec<Term>; 4],
    alpha: [Complex64; 4],
    memo: RefCell<HashMap<(u8, Vec<bool>), Complex64>>,
}

fn term(coef: Complex64, order: u8, word: &[Letter]) -> Term {
    Term {
        coef,
        order,
        word: word.to_vec(),
    }
}

fn dagger(op: &[Term]) -> Vec<Term> {
    op.iter()
        .map(|t| Term {
            coef: t.coef.conj(),
            order: t.order,
            word: t.word.iter().rev().map(|&(m, d)| (m, !d)).collect(),
        })
        .collect()
}

impl Expansion {
    pub fn new(cs: &CoefficientSet<f64>, amps: &CoherentAmplitudes<f64>) -> Self {
        let (f, g, h, l) = (|k| cs.f(k), |k| cs.g(k), |k| cs.h(k), |k| cs.l(k));
        let a_op = vec![
            term(f(1), 0, &[A]),
            term(f(2), 1, &[B, C]),
            term(f(3), 1, &[CD, D]),
            term(f(4), 2, &[AD, B, D]),
            term(f(5), 2, &[A, B, BD]),
            term(f(6), 2, &[A, CD, C]),
            term(f(7), 2, &[A, CD, C]),
            term(f(8), 2, &[A, DD, D]),
        ];
        let b_op = vec![
            term(g(1), 0, &[B]),
            term(g(2), 1, &[A, CD]),
            term(g(3), 2, &[A, A, DD]),
            term(g(4), 2, &[CD, CD, D]),
            term(g(5), 2, &[B, C, CD]),
            term(g(6), 2, &[B, A, AD]),
        ];
        let c_op = vec![
            term(h(1), 0, &[C]),
            term(h(2), 1, &[A, BD]),
            term(h(3), 1, &[AD, D]),
            term(h(4), 2, &[BD, CD, D]),
            term(h(5), 2, &[C, A, AD]),
            term(h(6), 2, &[C, B, BD]),
            term(h(7), 2, &[C, DD, D]),
            term(h(8), 2, &[C, AD, A]),
        ];
        let d_op = vec![
            term(l(1), 0, &[D]),
            term(l(2), 1, &[A, C]),
            term(l(3), 2, &[A, A, BD]),
            term(l(4), 2, &[B, C, C]),
            term(l(5), 2, &[CD, C, D]),
            term(l(6), 2, &[A, AD, D]),
        ];
        Self {
            ops: [a_op, b_op, c_op, d_op],
            alpha: amps.as_array(),
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Expectation of a single-mode word (creator flags, left to right).
    fn single_mode(&self, mode: u8, w: &[bool]) -> Complex64 {
        if w.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let key = (mode, w.to_vec());
        if let Some(v) = self.memo.borrow().get(&key) {
            return *v;
        }
        let al = self.alpha[mode as usize];
        let v = if !w[w.len() - 1] {
            al * self.single_mode(mode, &w[..w.len() - 1])
        } else if w[0] {
            al.conj() * self.single_mode(mode, &w[1..])
        } else {
            let i = (0..w.len() - 1)
                .find(|&i| !w[i] && w[i + 1])
                .expect("word with an annihilator left of a creator");
            let mut swapped = w.to_vec();
            swapped[i] = true;
            swapped[i + 1] = false;
            let mut removed = w[..i].to_vec();
            removed.extend_from_slice(&w[i + 2..]);
            self.single_mode(mode, &swapped) + self.single_mode(mode, &removed)
        };
        self.memo.borrow_mut().insert(key, v);
        v
    }

    fn word_value(&self, word: &[Letter]) -> Complex64 {
        let mut r = Complex64::new(1.0, 0.0);
        for mode in 0..4u8 {
            let flags: Vec<bool> = word.iter().filter(|l| l.0 == mode).map(|l| l.1).collect();
            r *= self.single_mode(mode, &flags);
        }
        r
    }

    /// Order-resolved expectation of a product of time-evolved operators.
    /// Each factor is `(mode, creator?)`.
    pub fn moment(&self, factors: &[(Mode, bool)]) -> Graded {
        let mut terms: HashMap<(u8, Vec<Letter>), Complex64> = HashMap::new();
        terms.insert((0, Vec::new()), Complex64::new(1.0, 0.0));
        for &(mode, dag) in factors {
            let base = &self.ops[mode.index()];
            let op = if dag { dagger(base) } else { base.clone() };
            let mut next: HashMap<(u8, Vec<Letter>), Complex64> = HashMap::new();
            for ((o1, w1), c1) in &terms {
                for t in &op {
                    let o = o1 + t.order;
                    if o > 2 {
                        continue;
                    }
                    let mut w = w1.clone();
                    w.extend_from_slice(&t.word);
                    *next.entry((o, w)).or_insert(Complex64::new(0.0, 0.0)) += c1 * t.coef;
                }
            }
            terms = next;
        }
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for ((o, w), c) in terms {
            out[o as usize] += c * self.word_value(&w);
        }
        out
    }

    /// Factors of the normal-ordered product described by `key`.
    fn factors(key: &MomentKey) -> Vec<(Mode, bool)> {
        let mut out = Vec::new();
        for mode in Mode::ALL {
            let (p, _) = key.powers[mode.index()];
            out.extend(std::iter::repeat_n((mode, true), p as usize));
        }
        for mode in Mode::ALL {
            let (_, q) = key.powers[mode.index()];
            out.extend(std::iter::repeat_n((mode, false), q as usize));
        }
        out
    }

    pub fn graded(&self, key: &MomentKey) -> Graded {
        self.moment(&Self::factors(key))
    }

    /// Moment table for `spec`, each entry truncated at second order.
    pub fn moment_table(&self, spec: &WitnessSpec) -> MomentTable<f64> {
        required_moments(spec)
            .into_iter()
            .map(|k| {
                let g = self.graded(&k);
                (k, g[0] + g[1] + g[2])
            })
            .collect()
    }

    /// Witness of `spec` with the final products also truncated at second
    /// order; this is what a second-order closed form must reproduce.
    pub fn witness(&self, spec: &WitnessSpec) -> f64 {
        let vals: Vec<Graded> = required_moments(spec).iter().map(|k| self.graded(k)).collect();
        let z = match spec.criterion() {
            Criterion::Hz1 => total(vals[0]) - total(abs2(vals[1])),
            Criterion::Hz2 => total(mul(vals[0], vals[1])) - total(abs2(vals[2])),
            Criterion::ThreeMode | Criterion::FourMode => {
                let (last, numbers) = vals.split_last().unwrap();
                let prod = numbers[1..].iter().fold(numbers[0], |acc, v| mul(acc, *v));
                total(prod) - total(abs2(*last))
            }
        };
        z.re
    }
}

pub fn mul(x: Graded, y: Graded) -> Graded {
    [
        x[0] * y[0],
        x[0] * y[1] + x[1] * y[0],
        x[0] * y[2] + x[1] * y[1] + x[2] * y[0],
    ]
}

pub fn abs2(x: Graded) -> Graded {
    mul(x, x.map(|v| v.conj()))
}

pub fn total(x: Graded) -> Complex64 {
    x[0] + x[1] + x[2]
}

/// Every spec the closed forms cover, with pairwise orders up to `max_sum`.
pub fn all_specs(max_sum: u32) -> Vec<WitnessSpec> {
    let mut out = Vec::new();
    for crit in [Criterion::Hz1, Criterion::Hz2] {
        for pair in raman_witness::Pair::ALL {
            for n in 1..max_sum {
                for m in 1..=(max_sum - n) {
                    out.push(WitnessSpec::pairwise(crit, pair, n, m).unwrap());
                }
            }
        }
    }
    out.push(WitnessSpec::three_mode());
    out.push(WitnessSpec::four_mode());
    out
}

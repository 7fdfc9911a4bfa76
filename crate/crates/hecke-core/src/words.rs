//! Words in the generators and the free-product structure of the group.
//!
//! In PSL the group is `Z/2 * Z/q`, generated by `S` (order 2) and
//! `U = S T` (order q). Words are kept in reduced normal form over the
//! alphabet `{S, U^a}`: no two adjacent syllables from the same factor, and
//! U-exponents in `1..q-1`. Normal forms there are unique, which is what the
//! conjugacy test rides on: cyclically reduced words are conjugate exactly
//! when they are rotations of each other.

use alloc::string::String;
use alloc::{vec, vec::Vec};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::group::Gen;

/// Finite sequence of nonzero integers: the exponents of `S T^{n_1} ...`,
/// or the periodic part of a lambda-continued fraction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitSeq(Vec<i64>);

impl DigitSeq {
    /// Panics on zero digits; digit sequences are nonzero by definition.
    pub fn new(digits: Vec<i64>) -> DigitSeq {
        assert!(digits.iter().all(|&d| d != 0), "digit sequences must be nonzero");
        DigitSeq(digits)
    }

    pub fn digits(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> DigitSeq {
        DigitSeq(self.0.iter().map(|&d| -d).collect())
    }

    pub fn reversed(&self) -> DigitSeq {
        let mut v = self.0.clone();
        v.reverse();
        DigitSeq(v)
    }

    pub fn rotated(&self, by: usize) -> DigitSeq {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.0[by % n..]);
        v.extend_from_slice(&self.0[..by % n]);
        DigitSeq(v)
    }

    pub fn concat(&self, other: &DigitSeq) -> DigitSeq {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        DigitSeq(v)
    }

    pub fn repeated(&self, times: usize) -> DigitSeq {
        let mut v = Vec::with_capacity(self.0.len() * times);
        for _ in 0..times {
            v.extend_from_slice(&self.0);
        }
        DigitSeq(v)
    }

    /// True unless the sequence is a whole number (> 1) of copies of a
    /// shorter block.
    pub fn is_primitive(&self) -> bool {
        let n = self.0.len();
        for p in 1..n {
            if n % p == 0 && (0..n).all(|i| self.0[i] == self.0[i % p]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Debug for DigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for DigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", d)?;
        }
        write!(f, "]")
    }
}

/// One syllable of a reduced word: `S`, or `U^exp` with `1 <= exp < q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Letter {
    S,
    U(u32),
}

impl Letter {
    fn same_factor(&self, other: &Letter) -> bool {
        matches!(
            (self, other),
            (Letter::S, Letter::S) | (Letter::U(_), Letter::U(_))
        )
    }
}

/// Reduced word in the free product `<S | S^2> * <U | U^q>`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Word {
    q: u32,
    letters: Vec<Letter>,
}

/// Digit conventions: `MNotation` reads `(n_1,...,n_k)` as
/// `S T^{n_k} ... S T^{n_1}`; `MxNotation` reads a continued-fraction period
/// `(a_0,...,a_n)` as the fixing matrix `S T^{-a_n} ... S T^{-a_0}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Convention {
    MNotation,
    MxNotation,
}

impl Word {
    pub fn identity(q: u32) -> Word {
        assert!(q >= 3);
        Word {
            q,
            letters: Vec::new(),
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn syllable_len(&self) -> usize {
        self.letters.len()
    }

    fn push(&mut self, letter: Letter) {
        match letter {
            Letter::S => {
                if matches!(self.letters.last(), Some(Letter::S)) {
                    self.letters.pop();
                } else {
                    self.letters.push(Letter::S);
                }
            }
            Letter::U(a) => {
                let a = a % self.q;
                if a == 0 {
                    return;
                }
                if let Some(Letter::U(b)) = self.letters.last().copied() {
                    self.letters.pop();
                    let c = (a + b) % self.q;
                    if c != 0 {
                        self.letters.push(Letter::U(c));
                    }
                } else {
                    self.letters.push(Letter::U(a));
                }
            }
        }
    }

    /// Reduce an arbitrary letter stream to normal form. Any interleaving of
    /// the relations `S^2 = U^q = 1` yields this same word.
    pub fn from_letters(q: u32, letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut w = Word::identity(q);
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Build from `(generator, exponent)` pairs over `{S, T}`, using
    /// `T = S U` and `T^{-1} = U^{q-1} S`.
    pub fn from_st_pairs(q: u32, pairs: &[(Gen, i64)]) -> Word {
        let mut w = Word::identity(q);
        for &(gen, exp) in pairs {
            match gen {
                Gen::S => {
                    if exp.rem_euclid(2) == 1 {
                        w.push(Letter::S);
                    }
                }
                Gen::T => {
                    if exp >= 0 {
                        for _ in 0..exp {
                            w.push(Letter::S);
                            w.push(Letter::U(1));
                        }
                    } else {
                        for _ in 0..(-exp) {
                            w.push(Letter::U(q - 1));
                            w.push(Letter::S);
                        }
                    }
                }
            }
        }
        w
    }

    pub fn mul(&self, rhs: &Word) -> Word {
        assert_eq!(self.q, rhs.q);
        let mut w = self.clone();
        for l in &rhs.letters {
            w.push(*l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        let mut w = Word::identity(self.q);
        for l in self.letters.iter().rev() {
            match l {
                Letter::S => w.push(Letter::S),
                Letter::U(a) => w.push(Letter::U(self.q - a)),
            }
        }
        w
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity(self.q);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Whether the word is cyclically reduced: syllable length at most one,
    /// or first and last syllables from different factors.
    pub fn is_cyclically_reduced(&self) -> bool {
        match self.letters.len() {
            0 | 1 => true,
            n => !self.letters[0].same_factor(&self.letters[n - 1]),
        }
    }

    pub fn to_display(&self) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        for l in &self.letters {
            match l {
                Letter::S => out.push('S'),
                Letter::U(1) => out.push('U'),
                Letter::U(a) => out.push_str(&alloc::format!("U^{}", a)),
            }
        }
        out
    }
}

/// Word of the digit sequence under the chosen convention.
pub fn digits_to_word(q: u32, seq: &DigitSeq, convention: Convention) -> Word {
    let pairs: Vec<(Gen, i64)> = match convention {
        Convention::MNotation => seq
            .digits()
            .iter()
            .rev()
            .flat_map(|&n| [(Gen::S, 1), (Gen::T, n)])
            .collect(),
        Convention::MxNotation => seq
            .digits()
            .iter()
            .rev()
            .flat_map(|&n| [(Gen::S, 1), (Gen::T, -n)])
            .collect(),
    };
    Word::from_st_pairs(q, &pairs)
}

/// Cyclically reduce: returns `(core, g)` with `w = g * core * g^{-1}` and
/// `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let mut core = w.clone();
    let mut conj = Word::identity(w.q);
    loop {
        let n = core.letters.len();
        if n <= 1 {
            break;
        }
        let first = core.letters[0];
        let last = core.letters[n - 1];
        if !first.same_factor(&last) {
            break;
        }
        // rotate the first syllable to the back: x v -> v x, conjugator *= x
        match (first, last) {
            (Letter::S, Letter::S) => {
                core.letters.remove(0);
                core.letters.pop();
                conj.push(Letter::S);
            }
            (Letter::U(a), Letter::U(b)) => {
                core.letters.remove(0);
                core.letters.pop();
                let c = (a + b) % w.q;
                if c != 0 {
                    core.push(Letter::U(c));
                }
                conj.push(Letter::U(a));
            }
            _ => unreachable!(),
        }
    }
    (core, conj)
}

/// Conjugacy in the free product: cyclically reduce both sides, then compare
/// as cyclic sequences of syllables.
pub fn conjugate_test(w1: &Word, w2: &Word) -> bool {
    assert_eq!(w1.q, w2.q);
    let (c1, _) = cyclic_reduce(w1);
    let (c2, _) = cyclic_reduce(w2);
    let n = c1.letters.len();
    if n != c2.letters.len() {
        return false;
    }
    if n <= 1 {
        // powers of S or U: conjugate only if equal (the factors are abelian)
        return c1.letters == c2.letters;
    }
    // rotation search in the doubled sequence
    for start in 0..n {
        if (0..n).all(|i| c1.letters[(start + i) % n] == c2.letters[i]) {
            return true;
        }
    }
    false
}

/// Starting index of the lexicographically least rotation (two-pointer
/// tournament method, O(n)).
fn least_rotation_index(v: &[i64]) -> usize {
    let n = v.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| v[i % n];
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let (a, b) = (at(i + k), at(j + k));
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Rotation-invariant representative: the lexicographically least rotation.
pub fn canonical_cycle(seq: &DigitSeq) -> DigitSeq {
    seq.rotated(least_rotation_index(seq.digits()))
}

/// Representative of the digit sequence up to rotation, negation, and
/// reversal: the least canonical cycle among the four images.
pub fn symmetry_class(seq: &DigitSeq) -> DigitSeq {
    let mut best = canonical_cycle(seq);
    for v in [
        canonical_cycle(&seq.negated()),
        canonical_cycle(&seq.reversed()),
        canonical_cycle(&seq.reversed().negated()),
    ] {
        if v < best {
            best = v;
        }
    }
    best
}

/// Number of distinct rotation classes among the negation/reversal images.
pub fn symmetry_orbit_size(seq: &DigitSeq) -> usize {
    let mut reps = vec![
        canonical_cycle(seq),
        canonical_cycle(&seq.negated()),
        canonical_cycle(&seq.reversed()),
        canonical_cycle(&seq.reversed().negated()),
    ];
    reps.sort();
    reps.dedup();
    reps.len()
}

/// Parametric family `M_k = D^k C B^k A`, stored as digit sequences so that
/// the words and the matrices stay in step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub a: DigitSeq,
    pub b: DigitSeq,
    pub c: DigitSeq,
    pub d: DigitSeq,
    /// Named unit whose powers the traces are expected to track.
    pub unit_name: String,
    /// Exponent n with trace(M_0) = trace(B^n).
    pub base_power: i64,
}

impl FamilySpec {
    /// Digit sequence of `M_k`: matrix products append digit blocks on the
    /// left factor first, so `D^k C B^k A` is `a ++ b^k ++ c ++ d^k`.
    pub fn digits(&self, k: usize) -> DigitSeq {
        self.a
            .concat(&self.b.repeated(k))
            .concat(&self.c)
            .concat(&self.d.repeated(k))
    }
}

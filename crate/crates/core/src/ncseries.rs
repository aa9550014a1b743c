//! Truncated power series in non-commuting letters `A_1, ..., A_n` with
//! complex coefficients, together with the word combinatorics used to state
//! identities between them (shuffles, reversal).
//!
//! Coefficients are stored sparsely, keyed by [`Word`]. Dense enumeration of
//! all words up to the truncation degree is only used where an identity has
//! to be checked for every word (see [`grouplike_defect`]).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite sequence of letter indices in `1..=n`. The empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        Word(letters.into())
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    fn check(&self, alphabet: usize, degree: usize) -> Result<()> {
        if self.len() > degree {
            return Err(Error::WordTooLong {
                len: self.len(),
                degree,
            });
        }
        if let Some(&letter) = self.0.iter().find(|&&l| l == 0 || l as usize > alphabet) {
            return Err(Error::LetterOutOfRange { letter, alphabet });
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "A{l}")?;
        }
        Ok(())
    }
}

/// All words over `1..=alphabet` of length `0..=degree`, ordered by length then
/// lexicographically.
pub fn all_words(alphabet: usize, degree: usize) -> Vec<Word> {
    let layout = WordLayout::new(alphabet, degree);
    (0..layout.total()).map(|i| layout.word(i)).collect()
}

/// Dense indexing of all words of length `<= depth`: words of length `k`
/// occupy `offset(k) .. offset(k) + n^k` with the base-`n` code of the
/// (0-based) letters as the inner index.
#[derive(Clone, Debug)]
pub(crate) struct WordLayout {
    pub n: usize,
    pub depth: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
}

impl WordLayout {
    pub fn new(n: usize, depth: usize) -> Self {
        let mut offsets = Vec::with_capacity(depth + 2);
        let mut powers = Vec::with_capacity(depth + 1);
        let mut acc = 0;
        let mut p = 1usize;
        for _ in 0..=depth {
            offsets.push(acc);
            powers.push(p);
            acc += p;
            p *= n.max(1);
        }
        offsets.push(acc);
        WordLayout {
            n,
            depth,
            offsets,
            powers,
        }
    }

    pub fn total(&self) -> usize {
        self.offsets[self.depth + 1]
    }

    pub fn offset(&self, len: usize) -> usize {
        self.offsets[len]
    }

    pub fn count(&self, len: usize) -> usize {
        self.powers[len]
    }

    pub fn index(&self, w: &Word) -> usize {
        let code = w
            .letters()
            .iter()
            .fold(0usize, |acc, &l| acc * self.n + (l as usize - 1));
        self.offsets[w.len()] + code
    }

    pub fn word(&self, index: usize) -> Word {
        let len = (0..=self.depth)
            .rev()
            .find(|&k| self.offsets[k] <= index)
            .unwrap_or(0);
        let mut code = index - self.offsets[len];
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (code % self.n) as u8 + 1;
            code /= self.n;
        }
        Word(letters)
    }

    /// Dense product `a * b`, truncated to `depth`.
    pub fn mul(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.total()];
        for la in 0..=self.depth {
            for lb in 0..=(self.depth - la) {
                let (oa, ob, oc) = (self.offset(la), self.offset(lb), self.offset(la + lb));
                let nb = self.count(lb);
                for ca in 0..self.count(la) {
                    let x = a[oa + ca];
                    if x.re == 0.0 && x.im == 0.0 {
                        continue;
                    }
                    let base = oc + ca * nb;
                    for cb in 0..nb {
                        out[base + cb] += x * b[ob + cb];
                    }
                }
            }
        }
        out
    }

    pub fn unit(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.total()];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }
}

/// Truncated series `sum_w c_w w` in the free associative algebra on
/// `alphabet` letters, with all words longer than `truncation` discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct NCSeries {
    alphabet: usize,
    truncation: usize,
    coeffs: BTreeMap<Word, Complex64>,
}

impl NCSeries {
    pub fn zero(alphabet: usize, truncation: usize) -> Self {
        NCSeries {
            alphabet,
            truncation,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: usize, truncation: usize) -> Self {
        let mut s = Self::zero(alphabet, truncation);
        s.coeffs.insert(Word::empty(), Complex64::new(1.0, 0.0));
        s
    }

    /// `1 + c A_i`.
    pub fn one_plus_letter(
        alphabet: usize,
        truncation: usize,
        letter: u8,
        c: Complex64,
    ) -> Result<Self> {
        let mut s = Self::one(alphabet, truncation);
        s.set(Word::letter(letter), c)?;
        Ok(s)
    }

    pub fn from_coeffs(
        alphabet: usize,
        truncation: usize,
        coeffs: impl IntoIterator<Item = (Word, Complex64)>,
    ) -> Result<Self> {
        let mut s = Self::zero(alphabet, truncation);
        for (w, c) in coeffs {
            w.check(alphabet, truncation)?;
            *s.coeffs.entry(w).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        s.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(s)
    }

    pub(crate) fn from_dense(layout: &WordLayout, dense: &[Complex64]) -> Self {
        let coeffs = dense
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, c)| (layout.word(i), *c))
            .collect();
        NCSeries {
            alphabet: layout.n,
            truncation: layout.depth,
            coeffs,
        }
    }

    pub(crate) fn to_dense(&self, layout: &WordLayout) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); layout.total()];
        for (w, c) in &self.coeffs {
            if w.len() <= layout.depth {
                v[layout.index(w)] = *c;
            }
        }
        v
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coeff(&self, w: &Word) -> Complex64 {
        self.coeffs.get(w).copied().unwrap_or_default()
    }

    /// Coefficient of the word given by letters, e.g. `s.at(&[1, 2])`.
    pub fn at(&self, letters: &[u8]) -> Complex64 {
        self.coeff(&Word::new(letters.to_vec()))
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&Word::empty())
    }

    pub fn set(&mut self, w: Word, c: Complex64) -> Result<()> {
        w.check(self.alphabet, self.truncation)?;
        if c.re == 0.0 && c.im == 0.0 {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, c);
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn compatible(&self, other: &NCSeries) -> Result<()> {
        if self.alphabet != other.alphabet || self.truncation != other.truncation {
            return Err(Error::AlphabetMismatch(
                self.alphabet,
                self.truncation,
                other.alphabet,
                other.truncation,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCSeries) -> Result<NCSeries> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            *out.coeffs.entry(w.clone()).or_default() += c;
        }
        out.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(out)
    }

    pub fn sub(&self, other: &NCSeries) -> Result<NCSeries> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> NCSeries {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        out
    }

    /// Concatenation product: the coefficient of `w` is the sum over all
    /// splittings `w = uv` of `a(u) b(v)`.
    pub fn concat_mul(&self, other: &NCSeries) -> Result<NCSeries> {
        self.compatible(other)?;
        let n = self.truncation;
        let mut out: BTreeMap<Word, Complex64> = BTreeMap::new();
        for (u, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                if u.len() + v.len() <= n {
                    *out.entry(u.concat(v)).or_default() += a * b;
                }
            }
        }
        out.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(NCSeries {
            alphabet: self.alphabet,
            truncation: n,
            coeffs: out,
        })
    }

    /// Inverse in the truncated algebra. Requires constant term exactly 1.
    pub fn inverse(&self) -> Result<NCSeries> {
        let c0 = self.constant_term();
        if c0 != Complex64::new(1.0, 0.0) {
            return Err(Error::NotInvertible(c0));
        }
        let minus_x = self.plus_part().scale(Complex64::new(-1.0, 0.0));
        let mut result = NCSeries::one(self.alphabet, self.truncation);
        let mut power = NCSeries::one(self.alphabet, self.truncation);
        for _ in 0..self.truncation {
            power = power.concat_mul(&minus_x)?;
            result = result.add(&power)?;
        }
        Ok(result)
    }

    /// The series with the constant term removed.
    pub fn plus_part(&self) -> NCSeries {
        let mut out = self.clone();
        out.coeffs.remove(&Word::empty());
        out
    }

    /// Path-reversal antipode: coefficient of `w` becomes
    /// `(-1)^{|w|}` times the input coefficient of the reversed word.
    pub fn reverse_antipode(&self) -> NCSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, c)| {
                let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
                (w.reversed(), c * sign)
            })
            .collect();
        NCSeries {
            alphabet: self.alphabet,
            truncation: self.truncation,
            coeffs,
        }
    }

    /// Keep only words of length `<= degree` (the truncation itself is unchanged).
    pub fn truncated_to(&self, degree: usize) -> NCSeries {
        let mut out = self.clone();
        out.coeffs.retain(|w, _| w.len() <= degree);
        out
    }

    /// Maximum absolute coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &NCSeries) -> f64 {
        self.per_degree_abs_diff(other)
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Maximum absolute coefficient difference, per word length `0..=N`.
    pub fn per_degree_abs_diff(&self, other: &NCSeries) -> Vec<f64> {
        let n = self.truncation.max(other.truncation);
        let mut out = vec![0.0; n + 1];
        for (w, c) in &self.coeffs {
            let d = (c - other.coeff(w)).norm();
            out[w.len()] = f64::max(out[w.len()], d);
        }
        for (w, c) in &other.coeffs {
            if !self.coeffs.contains_key(w) {
                out[w.len()] = f64::max(out[w.len()], c.norm());
            }
        }
        out
    }
}

impl fmt::Display for NCSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6e}{:+.6e}i){}", c.re, c.im, w)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Multiset of shuffles of `u` and `v`: all interleavings that preserve the
/// internal order of both words. Has `binomial(|u|+|v|, |u|)` elements.
pub fn shuffle_words(u: &Word, v: &Word) -> Vec<Word> {
    fn rec(u: &[u8], v: &[u8], prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
        if u.is_empty() || v.is_empty() {
            let mut w = prefix.clone();
            w.extend_from_slice(u);
            w.extend_from_slice(v);
            out.push(Word(w));
            return;
        }
        prefix.push(u[0]);
        rec(&u[1..], v, prefix, out);
        prefix.pop();
        prefix.push(v[0]);
        rec(u, &v[1..], prefix, out);
        prefix.pop();
    }
    let mut out = Vec::new();
    rec(u.letters(), v.letters(), &mut Vec::new(), &mut out);
    out
}

/// Maximum over word pairs `(u, v)` with `|u|+|v| <= N` of
/// `|a(u) a(v) - sum_{w in u sh v} a(w)|`. Zero for the generating series of
/// iterated integrals along a single path.
pub fn grouplike_defect(a: &NCSeries) -> f64 {
    let n = a.truncation();
    let layout = WordLayout::new(a.alphabet_size(), n);
    let dense = a.to_dense(&layout);
    let words = all_words(a.alphabet_size(), n);
    let mut worst = 0.0f64;
    for (i, u) in words.iter().enumerate() {
        for v in words[i..].iter() {
            if u.len() + v.len() > n {
                continue;
            }
            let lhs = dense[layout.index(u)] * dense[layout.index(v)];
            let rhs: Complex64 = shuffle_words(u, v)
                .iter()
                .map(|w| dense[layout.index(w)])
                .sum();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn w(l: &[u8]) -> Word {
        Word::new(l.to_vec())
    }

    #[test]
    fn product_of_linear_terms() {
        let a = NCSeries::one_plus_letter(1, 3, 1, c(2.0)).unwrap();
        let b = NCSeries::one_plus_letter(1, 3, 1, c(5.0)).unwrap();
        let p = a.concat_mul(&b).unwrap();
        assert_eq!(p.at(&[]), c(1.0));
        assert_eq!(p.at(&[1]), c(7.0));
        assert_eq!(p.at(&[1, 1]), c(10.0));
        assert_eq!(p.at(&[1, 1, 1]), c(0.0));
    }

    #[test]
    fn noncommutativity_witnessed() {
        let a = NCSeries::one_plus_letter(2, 2, 1, c(1.0)).unwrap();
        let b = NCSeries::one_plus_letter(2, 2, 2, c(1.0)).unwrap();
        let ab = a.concat_mul(&b).unwrap();
        let ba = b.concat_mul(&a).unwrap();
        assert_eq!(ab.at(&[1, 2]), c(1.0));
        assert_eq!(ba.at(&[1, 2]), c(0.0));
    }

    #[test]
    fn mismatch_rejected() {
        let a = NCSeries::one(2, 2);
        let b = NCSeries::one(2, 3);
        assert!(matches!(a.concat_mul(&b), Err(Error::AlphabetMismatch(..))));
        assert!(NCSeries::from_coeffs(2, 2, [(w(&[3]), c(1.0))]).is_err());
        assert!(NCSeries::from_coeffs(2, 2, [(w(&[1, 1, 1]), c(1.0))]).is_err());
    }

    #[test]
    fn geometric_inverse() {
        let a = NCSeries::one_plus_letter(1, 3, 1, c(1.0)).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(inv.at(&[1]), c(-1.0));
        assert_eq!(inv.at(&[1, 1]), c(1.0));
        assert_eq!(inv.at(&[1, 1, 1]), c(-1.0));
        assert_eq!(NCSeries::one(2, 3).inverse().unwrap(), NCSeries::one(2, 3));
    }

    #[test]
    fn inverse_two_letters() {
        let a = NCSeries::from_coeffs(
            2,
            2,
            [(w(&[]), c(1.0)), (w(&[1]), c(1.0)), (w(&[2]), c(1.0))],
        )
        .unwrap();
        let inv = a.inverse().unwrap();
        for (word, expected) in [
            (vec![1], -1.0),
            (vec![2], -1.0),
            (vec![1, 1], 1.0),
            (vec![1, 2], 1.0),
            (vec![2, 1], 1.0),
            (vec![2, 2], 1.0),
        ] {
            assert_eq!(inv.at(&word), c(expected));
        }
        let back = a.concat_mul(&inv).unwrap();
        assert_eq!(back.max_abs_diff(&NCSeries::one(2, 2)), 0.0);
    }

    #[test]
    fn non_invertible() {
        let a = NCSeries::from_coeffs(1, 2, [(w(&[]), c(2.0))]).unwrap();
        assert!(matches!(a.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn reversal_antipode() {
        let s = NCSeries::from_coeffs(
            2,
            2,
            [
                (w(&[]), c(1.0)),
                (w(&[1]), c(3.0)),
                (w(&[1, 2]), c(5.0)),
                (w(&[2, 1]), c(7.0)),
            ],
        )
        .unwrap();
        let r = s.reverse_antipode();
        assert_eq!(r.at(&[1]), c(-3.0));
        assert_eq!(r.at(&[2, 1]), c(5.0));
        assert_eq!(r.at(&[1, 2]), c(7.0));
        assert_eq!(r.constant_term(), c(1.0));
        assert_eq!(r.reverse_antipode(), s);
    }

    #[test]
    fn shuffle_examples() {
        let s = shuffle_words(&w(&[1]), &w(&[2]));
        assert_eq!(s, vec![w(&[1, 2]), w(&[2, 1])]);
        let mut s = shuffle_words(&w(&[1, 2]), &w(&[3]));
        s.sort();
        assert_eq!(s, vec![w(&[1, 2, 3]), w(&[1, 3, 2]), w(&[3, 1, 2])]);
        assert_eq!(shuffle_words(&w(&[1, 2]), &Word::empty()), vec![w(&[1, 2])]);
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn shuffle_counts_exhaustive() {
        let words = all_words(2, 4);
        for u in &words {
            for v in &words {
                assert_eq!(
                    shuffle_words(u, v).len(),
                    binomial(u.len() + v.len(), u.len())
                );
            }
        }
    }

    #[test]
    fn exponential_is_grouplike() {
        let z = Complex64::new(0.3, -1.2);
        let s = NCSeries::from_coeffs(
            1,
            2,
            [(w(&[]), c(1.0)), (w(&[1]), z), (w(&[1, 1]), z * z / 2.0)],
        )
        .unwrap();
        assert!(grouplike_defect(&s) < 1e-15);
    }

    #[test]
    fn geometric_series_not_grouplike() {
        let s = NCSeries::from_coeffs(
            1,
            2,
            [(w(&[]), c(1.0)), (w(&[1]), c(1.0)), (w(&[1, 1]), c(1.0))],
        )
        .unwrap();
        assert_eq!(grouplike_defect(&s), 1.0);
    }

    #[test]
    fn layout_round_trip() {
        let layout = WordLayout::new(3, 3);
        assert_eq!(layout.total(), 1 + 3 + 9 + 27);
        for i in 0..layout.total() {
            assert_eq!(layout.index(&layout.word(i)), i);
        }
    }
}

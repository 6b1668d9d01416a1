//! Words in the alphabet {x0, x1}, their linear combinations, and the
//! shuffle product.
//!
//! A word is packed into a `u64`: a sentinel bit followed by the letters,
//! first letter most significant. Comparing packed values therefore orders
//! words by length first and lexicographically (x0 < x1) within a length.

use std::fmt;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{QAlgebra, Ring, Q};

pub const MAX_WORD_LEN: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X0 = 0,
    X1 = 1,
}

impl Letter {
    fn from_bit(b: u64) -> Letter {
        if b & 1 == 1 {
            Letter::X1
        } else {
            Letter::X0
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(u64);

impl Word {
    pub const EMPTY: Word = Word(1);

    pub fn empty() -> Word {
        Word::EMPTY
    }

    pub fn from_letters(letters: &[Letter]) -> Word {
        assert!(letters.len() <= MAX_WORD_LEN, "word too long");
        letters.iter().fold(Word::EMPTY, |w, &l| w.push_back(l))
    }

    pub fn x0_pow(n: usize) -> Word {
        Word::from_letters(&vec![Letter::X0; n])
    }

    pub fn x1_pow(n: usize) -> Word {
        Word::from_letters(&vec![Letter::X1; n])
    }

    pub fn x0() -> Word {
        Word::from_letters(&[Letter::X0])
    }

    pub fn x1() -> Word {
        Word::from_letters(&[Letter::X1])
    }

    #[inline]
    pub fn len(self) -> usize {
        63 - self.0.leading_zeros() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 1
    }

    #[inline]
    fn letter_bits(self) -> u64 {
        self.0 ^ (1u64 << self.len())
    }

    /// Letter at position `i` (0 = first).
    pub fn letter(self, i: usize) -> Letter {
        let n = self.len();
        assert!(i < n);
        Letter::from_bit(self.0 >> (n - 1 - i))
    }

    pub fn letters(self) -> Vec<Letter> {
        (0..self.len()).map(|i| self.letter(i)).collect()
    }

    pub fn first(self) -> Option<Letter> {
        (!self.is_empty()).then(|| self.letter(0))
    }

    pub fn last(self) -> Option<Letter> {
        (!self.is_empty()).then(|| Letter::from_bit(self.0))
    }

    /// Removes the first letter.
    pub fn rest(self) -> Word {
        let n = self.len();
        assert!(n > 0);
        Word((self.letter_bits() & ((1u64 << (n - 1)) - 1)) | (1u64 << (n - 1)))
    }

    #[inline]
    pub fn push_back(self, l: Letter) -> Word {
        Word((self.0 << 1) | l as u64)
    }

    #[inline]
    pub fn push_front(self, l: Letter) -> Word {
        let n = self.len();
        assert!(n < MAX_WORD_LEN, "word too long");
        Word((1u64 << (n + 1)) | ((l as u64) << n) | self.letter_bits())
    }

    pub fn concat(self, other: Word) -> Word {
        let m = other.len();
        assert!(self.len() + m <= MAX_WORD_LEN, "word too long");
        Word((self.0 << m) | other.letter_bits())
    }

    /// Splits into (first `k` letters, remaining letters).
    pub fn split_at(self, k: usize) -> (Word, Word) {
        let n = self.len();
        assert!(k <= n);
        let tail_len = n - k;
        let tail = (self.letter_bits() & ((1u64 << tail_len) - 1)) | (1u64 << tail_len);
        let head = self.0 >> tail_len;
        (Word(head), Word(tail))
    }

    /// Starts with x0 and ends with x1.
    pub fn is_convergent(self) -> bool {
        self.first() == Some(Letter::X0) && self.last() == Some(Letter::X1)
    }

    pub fn ends_in_x1(self) -> bool {
        self.last() == Some(Letter::X1)
    }

    /// Number of leading x1 letters.
    pub fn leading_x1(self) -> usize {
        (0..self.len()).take_while(|&i| self.letter(i) == Letter::X1).count()
    }

    /// Number of trailing x0 letters.
    pub fn trailing_x0(self) -> usize {
        let n = self.len();
        (0..n).rev().take_while(|&i| self.letter(i) == Letter::X0).count()
    }

    /// Reverses the word and swaps x0 <-> x1 (the map induced by t -> 1 - t).
    pub fn dual(self) -> Word {
        let mut w = Word::EMPTY;
        for l in self.letters().into_iter().rev() {
            w = w.push_back(match l {
                Letter::X0 => Letter::X1,
                Letter::X1 => Letter::X0,
            });
        }
        w
    }

    /// Swaps x0 <-> x1 letter by letter.
    pub fn swap(self) -> Word {
        let n = self.len();
        Word(self.0 ^ ((1u64 << n) - 1))
    }

    /// Number of x1 letters (the depth of the corresponding MZV).
    pub fn depth(self) -> usize {
        self.letter_bits().count_ones() as usize
    }

    pub fn parse(s: &str) -> Result<Word> {
        if s == "e" {
            return Ok(Word::EMPTY);
        }
        if s.is_empty() || s.len() > MAX_WORD_LEN {
            return Err(Error::Parse(format!("invalid word {s:?}")));
        }
        let mut w = Word::EMPTY;
        for c in s.chars() {
            w = w.push_back(match c {
                '0' => Letter::X0,
                '1' => Letter::X1,
                _ => return Err(Error::Parse(format!("invalid letter {c:?} in word {s:?}"))),
            });
        }
        Ok(w)
    }

    /// x0^{m_r-1} x1 ... x0^{m_1-1} x1 for the composition (m_1, ..., m_r).
    pub fn from_composition(m: &[u32]) -> Result<Word> {
        if m.is_empty() {
            return Err(Error::InvalidArgument("empty composition".into()));
        }
        let mut w = Word::EMPTY;
        for &mi in m.iter().rev() {
            if mi == 0 {
                return Err(Error::InvalidArgument("composition entries must be positive".into()));
            }
            for _ in 1..mi {
                w = w.push_back(Letter::X0);
            }
            w = w.push_back(Letter::X1);
        }
        Ok(w)
    }

    /// Inverse of [`Word::from_composition`]; defined for words ending in x1.
    pub fn to_composition(self) -> Result<Vec<u32>> {
        if !self.ends_in_x1() {
            return Err(Error::InvalidArgument(format!("word {self} does not end in x1")));
        }
        let mut out = Vec::new();
        let mut run = 1u32;
        for l in self.letters() {
            match l {
                Letter::X0 => run += 1,
                Letter::X1 => {
                    out.push(run);
                    run = 1;
                }
            }
        }
        out.reverse();
        Ok(out)
    }

    /// Human readable composition notation, e.g. `z(3,5,3)`.
    pub fn composition_string(self) -> String {
        match self.to_composition() {
            Ok(c) => {
                let parts: Vec<String> = c.iter().map(|m| m.to_string()).collect();
                format!("z({})", parts.join(","))
            }
            Err(_) => format!("[{self}]"),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for l in self.letters() {
            f.write_str(match l {
                Letter::X0 => "0",
                Letter::X1 => "1",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

type ShuffleTable = Arc<[(Word, u64)]>;

static SHUFFLE_CACHE: LazyLock<RwLock<FxHashMap<(Word, Word), ShuffleTable>>> =
    LazyLock::new(|| RwLock::new(FxHashMap::default()));

const SHUFFLE_CACHE_MAX_LEN: usize = 18;

/// Shuffle product of two words as a list of (word, multiplicity).
pub fn shuffle_words(u: Word, v: Word) -> ShuffleTable {
    let (u, v) = if u <= v { (u, v) } else { (v, u) };
    if u.is_empty() {
        return Arc::from(vec![(v, 1u64)]);
    }
    let cacheable = u.len() + v.len() <= SHUFFLE_CACHE_MAX_LEN;
    if cacheable {
        if let Some(t) = SHUFFLE_CACHE.read().get(&(u, v)) {
            return t.clone();
        }
    }
    let mut acc: FxHashMap<Word, u64> = FxHashMap::default();
    let (a, ur) = (u.first().unwrap(), u.rest());
    for &(w, c) in shuffle_words(ur, v).iter() {
        *acc.entry(w.push_front(a)).or_insert(0) += c;
    }
    let (b, vr) = (v.first().unwrap(), v.rest());
    for &(w, c) in shuffle_words(u, vr).iter() {
        *acc.entry(w.push_front(b)).or_insert(0) += c;
    }
    let mut terms: Vec<(Word, u64)> = acc.into_iter().collect();
    terms.sort_unstable();
    let table: ShuffleTable = Arc::from(terms);
    if cacheable {
        SHUFFLE_CACHE.write().insert((u, v), table.clone());
    }
    table
}

/// Finite linear combination of words with coefficients in `R`. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct WordPoly<R> {
    terms: FxHashMap<Word, R>,
}

impl<R: Ring> Default for WordPoly<R> {
    fn default() -> Self {
        WordPoly { terms: FxHashMap::default() }
    }
}

impl<R: Ring> fmt::Debug for WordPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.sorted_terms().into_iter().map(|(w, c)| (w.to_string(), c))).finish()
    }
}

impl<R: Ring> WordPoly<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        Self::term(w, R::one())
    }

    pub fn term(w: Word, c: R) -> Self {
        let mut p = Self::new();
        p.add_term(w, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, R)>>(it: I) -> Self {
        let mut p = Self::new();
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: Word) -> Option<&R> {
        self.terms.get(&w)
    }

    pub fn add_term(&mut self, w: Word, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_term_ref(&mut self, w: Word, c: &R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &R)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, R)> {
        self.terms.into_iter()
    }

    /// Terms in canonical word order.
    pub fn sorted_terms(&self) -> Vec<(Word, &R)> {
        let mut v: Vec<(Word, &R)> = self.terms.iter().map(|(w, c)| (*w, c)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn max_len(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    pub fn graded_component(&self, n: usize) -> Self {
        WordPoly {
            terms: self.terms.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (*w, c.clone())).collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut lens = self.terms.keys().map(|w| w.len());
        match lens.next() {
            None => true,
            Some(l) => lens.all(|m| m == l),
        }
    }

    pub fn all_words(&self, pred: impl Fn(Word) -> bool) -> bool {
        self.terms.keys().all(|&w| pred(w))
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in other.terms.iter() {
            self.add_term_ref(*w, c);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &R) {
        for (w, c) in other.terms.iter() {
            self.add_term(*w, c.mul_ref(s));
        }
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> WordPoly<S> {
        WordPoly::from_terms(self.terms.iter().map(|(w, c)| (*w, f(c))))
    }

    /// Multiplies every coefficient by `s`.
    pub fn mul_coeff(&self, s: &R) -> Self {
        self.map_coeffs(|c| c.mul_ref(s))
    }

    /// Concatenation product with a single word on the left.
    pub fn left_concat(&self, prefix: Word) -> Self {
        WordPoly { terms: self.terms.iter().map(|(w, c)| (prefix.concat(*w), c.clone())).collect() }
    }

    pub fn right_concat(&self, suffix: Word) -> Self {
        WordPoly { terms: self.terms.iter().map(|(w, c)| (w.concat(suffix), c.clone())).collect() }
    }

    pub fn shuffle(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (u, a) in self.terms.iter() {
            for (v, b) in other.terms.iter() {
                let ab = a.mul_ref(b);
                for &(w, m) in shuffle_words(*u, *v).iter() {
                    out.add_term(w, if m == 1 { ab.clone() } else { ab.mul_u64(m) });
                }
            }
        }
        out
    }
}

impl<R: QAlgebra> WordPoly<R> {
    pub fn scale(&self, x: &Q) -> Self {
        self.map_coeffs(|c| c.scale(x))
    }
}

/// Shuffle product of two words with integer coefficients.
pub fn shuffle(u: Word, v: Word) -> WordPoly<num_bigint::BigInt> {
    WordPoly::from_terms(shuffle_words(u, v).iter().map(|&(w, m)| (w, num_bigint::BigInt::from(m))))
}

impl<R: Ring> Ring for WordPoly<R> {
    fn zero() -> Self {
        Self::new()
    }
    fn one() -> Self {
        Self::from_word(Word::EMPTY)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.add_assign(other);
    }
    fn neg_ref(&self) -> Self {
        self.map_coeffs(|c| c.neg_ref())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.shuffle(other)
    }
    fn mul_u64(&self, n: u64) -> Self {
        self.map_coeffs(|c| c.mul_u64(n))
    }
}

impl<R: QAlgebra> QAlgebra for WordPoly<R> {
    fn from_q(x: Q) -> Self {
        Self::term(Word::EMPTY, R::from_q(x))
    }
    fn scale(&self, x: &Q) -> Self {
        WordPoly::scale(self, x)
    }
}


/// Linear combination of word pairs (u, v), read as Li_u(z) * Li_v(zbar).
/// The product shuffles each slot independently.
#[derive(Clone, PartialEq)]
pub struct PairPoly<R> {
    terms: FxHashMap<(Word, Word), R>,
}

impl<R: Ring> Default for PairPoly<R> {
    fn default() -> Self {
        PairPoly { terms: FxHashMap::default() }
    }
}

impl<R: Ring> fmt::Debug for PairPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.sorted_terms().into_iter().map(|((u, v), c)| (format!("({u},{v})"), c)))
            .finish()
    }
}

impl<R: Ring> PairPoly<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(u: Word, v: Word, c: R) -> Self {
        let mut p = Self::new();
        p.add_term(u, v, c);
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, u: Word, v: Word) -> Option<&R> {
        self.terms.get(&(u, v))
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((u, v)) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_term_ref(&mut self, u: Word, v: Word, c: &R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((u, v)) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn sub_term_ref(&mut self, u: Word, v: Word, c: &R) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((u, v)) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                e.get_mut().sub_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c.neg_ref());
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Word, Word), &R)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = ((Word, Word), R)> {
        self.terms.into_iter()
    }

    pub fn sorted_terms(&self) -> Vec<((Word, Word), &R)> {
        let mut v: Vec<((Word, Word), &R)> = self.terms.iter().map(|(k, c)| (*k, c)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn add_assign(&mut self, other: &Self) {
        for ((u, v), c) in other.terms.iter() {
            self.add_term_ref(*u, *v, c);
        }
    }

    /// Swaps the two slots.
    pub fn transpose(&self) -> Self {
        PairPoly { terms: self.terms.iter().map(|((u, v), c)| ((*v, *u), c.clone())).collect() }
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> PairPoly<S> {
        let mut out = PairPoly::new();
        for ((u, v), c) in self.terms.iter() {
            out.add_term(*u, *v, f(c));
        }
        out
    }

    pub fn max_total_len(&self) -> Option<usize> {
        self.terms.keys().map(|(u, v)| u.len() + v.len()).max()
    }

    /// Slot-wise shuffle product.
    pub fn shuffle(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for ((u1, v1), a) in self.terms.iter() {
            for ((u2, v2), b) in other.terms.iter() {
                let ab = a.mul_ref(b);
                let su = shuffle_words(*u1, *u2);
                let sv = shuffle_words(*v1, *v2);
                for &(u, mu) in su.iter() {
                    for &(v, mv) in sv.iter() {
                        let m = mu * mv;
                        out.add_term(u, v, if m == 1 { ab.clone() } else { ab.mul_u64(m) });
                    }
                }
            }
        }
        out
    }
}

impl<R: Ring> Ring for PairPoly<R> {
    fn zero() -> Self {
        Self::new()
    }
    fn one() -> Self {
        Self::term(Word::EMPTY, Word::EMPTY, R::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.add_assign(other);
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        for ((u, v), c) in other.terms.iter() {
            self.sub_term_ref(*u, *v, c);
        }
    }
    fn neg_ref(&self) -> Self {
        self.map_coeffs(|c| c.neg_ref())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.shuffle(other)
    }
    fn mul_u64(&self, n: u64) -> Self {
        self.map_coeffs(|c| c.mul_u64(n))
    }
}

impl<R: QAlgebra> QAlgebra for PairPoly<R> {
    fn from_q(x: Q) -> Self {
        Self::term(Word::EMPTY, Word::EMPTY, R::from_q(x))
    }
    fn scale(&self, x: &Q) -> Self {
        self.map_coeffs(|c| c.scale(x))
    }
}

//! Free group core: letters, freely reduced words, spheres and balls.
//!
//! A letter is stored as a single code `2 * index + (1 if inverse)`, so the
//! natural order on codes is `x_1 < x_1^-1 < x_2 < x_2^-1 < ...` and inversion
//! is `code ^ 1`. Every enumeration in the crate follows this order.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default cap on the number of words a brute-force enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// A letter of `X ∪ X^-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u16);

impl Letter {
    /// Letter for generator `index` (0-based), inverted when `inverse` is set.
    pub fn new(index: usize, inverse: bool) -> Letter {
        Letter((index as u16) << 1 | inverse as u16)
    }

    pub fn from_code(code: usize) -> Letter {
        Letter(code as u16)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// 0-based generator index.
    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// +1 for a generator, -1 for an inverse generator.
    pub fn sign(self) -> i8 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", default_char(*self))
    }
}

fn default_char(l: Letter) -> char {
    let base = if l.is_inverse() { b'A' } else { b'a' };
    if l.index() < 26 {
        (base + l.index() as u8) as char
    } else {
        '?'
    }
}

/// The free group `F_r` together with the names used to print its letters.
#[derive(Clone, Debug)]
pub struct GroupContext {
    rank: usize,
    names: Vec<char>,
}

impl PartialEq for GroupContext {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
    }
}

impl Eq for GroupContext {}

impl GroupContext {
    /// Rank-`r` context with generators named `a, b, c, ...`.
    pub fn new(rank: usize) -> Result<GroupContext> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidRank(rank));
        }
        let names = (0..rank).map(|i| (b'a' + i as u8) as char).collect();
        Ok(GroupContext { rank, names })
    }

    /// Context whose generators are the given lowercase ASCII letters, in order.
    pub fn with_names(names: &str) -> Result<GroupContext> {
        let names: Vec<char> = names.chars().collect();
        if names.is_empty() || names.len() > 26 {
            return Err(Error::InvalidRank(names.len()));
        }
        for (i, c) in names.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::Parse(format!("generator name {c:?} is not a lowercase ASCII letter")));
            }
            if names[..i].contains(c) {
                return Err(Error::Parse(format!("generator name {c:?} declared twice")));
            }
        }
        Ok(GroupContext { rank: names.len(), names })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank 1 (infinite cyclic) is accepted, but most statements about curl
    /// and flux assume `r >= 2`.
    pub fn is_degenerate(&self) -> bool {
        self.rank == 1
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    /// Number of letters, `2r`.
    pub fn alphabet_size(&self) -> usize {
        2 * self.rank
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.alphabet_size()).map(Letter::from_code)
    }

    pub fn generator(&self, index: usize) -> Word {
        Word(vec![Letter::new(index, false)])
    }

    pub fn letter_char(&self, l: Letter) -> char {
        let c = self.names[l.index()];
        if l.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn parse_letter(&self, c: char) -> Result<Letter> {
        let lower = c.to_ascii_lowercase();
        match self.names.iter().position(|&n| n == lower) {
            Some(i) if c.is_ascii_alphabetic() => Ok(Letter::new(i, c.is_ascii_uppercase())),
            _ => Err(Error::Parse(format!("unknown letter {c:?}"))),
        }
    }

    /// Parse a word: letters of the alphabet (uppercase for inverses) with
    /// optional whitespace, or `1` for the identity. The letters must already
    /// be freely reduced.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed == "1" {
            return Ok(Word::identity());
        }
        if trimmed.is_empty() {
            return Err(Error::Parse("empty word (write 1 for the identity)".into()));
        }
        let letters = trimmed.chars().filter(|c| !c.is_whitespace()).map(|c| self.parse_letter(c)).collect::<Result<Vec<_>>>()?;
        if let Some(pos) = letters.windows(2).position(|p| p[0] == p[1].inverse()) {
            return Err(Error::Unreduced { word: trimmed.to_string(), position: pos });
        }
        Ok(Word(letters))
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        w.letters().iter().map(|&l| self.letter_char(l)).collect()
    }

    /// `|S_n|`: 1 for `n = 0`, otherwise `2r (2r-1)^(n-1)`.
    pub fn sphere_size(&self, n: usize) -> BigUint {
        if n == 0 {
            return BigUint::one();
        }
        BigUint::from(2 * self.rank) * BigUint::from(2 * self.rank - 1).pow(n as u32 - 1)
    }

    /// `|B_n| = sum_{k <= n} |S_k|`.
    pub fn ball_size(&self, n: usize) -> BigUint {
        let mut total = BigUint::zero();
        let mut sphere = BigUint::from(2 * self.rank);
        total += 1u32;
        for _ in 1..=n {
            total += &sphere;
            sphere *= 2 * self.rank - 1;
        }
        total
    }

    pub fn sphere_sizes(&self, n: usize) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(BigUint::one());
        let mut sphere = BigUint::from(2 * self.rank);
        for _ in 1..=n {
            out.push(sphere.clone());
            sphere *= 2 * self.rank - 1;
        }
        out
    }

    /// Every reduced word of length `n`, in code order, after checking the
    /// sphere size against `cap`.
    pub fn enumerate_sphere(&self, n: usize, cap: u64) -> Result<SphereIter> {
        let size = self.sphere_size(n);
        if size > BigUint::from(cap) {
            return Err(Error::EnumerationTooLarge { size: size.to_string(), cap });
        }
        Ok(SphereIter::new(self.alphabet_size(), n))
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            write!(f, "{}", default_char(l))?;
        }
        Ok(())
    }
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Freely reduce an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut out = Word::identity();
        for l in raw {
            out.push(l);
        }
        out
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Right-multiply by a letter, cancelling if needed.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    /// Right-multiply by a reduced word in place.
    pub fn append(&mut self, v: &Word) {
        let cancel = self.cancellation_with(v);
        self.0.truncate(self.0.len() - cancel);
        self.0.extend_from_slice(&v.0[cancel..]);
    }

    /// Number of letters cancelled when forming `self · v`.
    pub fn cancellation_with(&self, v: &Word) -> usize {
        self.0.iter().rev().zip(v.0.iter()).take_while(|(a, b)| **a == b.inverse()).count()
    }

    pub fn concat(&self, v: &Word) -> Word {
        let mut out = self.clone();
        out.append(v);
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut out = Word::identity();
        for _ in 0..k {
            out.append(self);
        }
        out
    }

    pub fn is_reduced_seq(letters: &[Letter]) -> bool {
        letters.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(Word::is_reduced_seq(&letters));
        Word(letters)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Word {
        Word(vec![l])
    }
}

/// Odometer over reduced words of a fixed length, in code order.
pub struct SphereIter {
    alphabet: usize,
    current: Vec<usize>,
    done: bool,
}

impl SphereIter {
    fn new(alphabet: usize, n: usize) -> SphereIter {
        // smallest reduced word: alternate codes 0, 2, 0, 2 ... unless rank 1,
        // where the only choices are x^n and X^n.
        let mut current = Vec::with_capacity(n);
        for _ in 0..n {
            let code = smallest_after(current.last().copied(), 0, alphabet);
            current.push(code.expect("alphabet has at least two letters"));
        }
        SphereIter { alphabet, current, done: false }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        let mut pos = n;
        while pos > 0 {
            pos -= 1;
            let prev = if pos == 0 { None } else { Some(self.current[pos - 1]) };
            if let Some(code) = smallest_after(prev, self.current[pos] + 1, self.alphabet) {
                self.current[pos] = code;
                for i in pos + 1..n {
                    self.current[i] = smallest_after(Some(self.current[i - 1]), 0, self.alphabet).unwrap();
                }
                return true;
            }
        }
        false
    }
}

fn smallest_after(prev: Option<usize>, from: usize, alphabet: usize) -> Option<usize> {
    (from..alphabet).find(|&c| prev.is_none_or(|p| c != p ^ 1))
}

impl Iterator for SphereIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let w = Word(self.current.iter().map(|&c| Letter::from_code(c)).collect());
        if !self.advance() {
            self.done = true;
        }
        Some(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn xy() -> GroupContext {
        GroupContext::with_names("xy").unwrap()
    }

    /// Independent reducer: repeatedly delete the first cancelling pair.
    fn reduce_by_rescanning(mut s: Vec<Letter>) -> Vec<Letter> {
        while let Some(i) = s.windows(2).position(|p| p[0] == p[1].inverse()) {
            s.drain(i..i + 2);
        }
        s
    }

    fn all_sequences(alphabet: usize, n: usize) -> Vec<Vec<Letter>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|s| {
                    (0..alphabet).map(move |c| {
                        let mut t = s.clone();
                        t.push(Letter::from_code(c));
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn brute_sphere(rank: usize, n: usize) -> usize {
        all_sequences(2 * rank, n).into_iter().filter(|s| Word::is_reduced_seq(s)).count()
    }

    #[test]
    fn reduce_examples() {
        let ctx = xy();
        let x = Letter::new(0, false);
        let y = Letter::new(1, false);
        assert!(Word::reduce([x, x.inverse()]).is_identity());
        assert_eq!(ctx.format_word(&Word::reduce([x, y, y.inverse(), x])), "xx");
    }

    #[test]
    fn concat_and_inverse_examples() {
        let ctx = xy();
        let w = |s| ctx.parse_word(s).unwrap();
        assert_eq!(w("xy").concat(&w("Yx")), w("xx"));
        assert!(w("xy").concat(&w("xy").inverse()).is_identity());
        assert_eq!(w("xy").concat(&w("yx")).len(), 4);
        assert_eq!(ctx.format_word(&w("xy").inverse()), "YX");
        assert!(Word::identity().inverse().is_identity());
    }

    #[test]
    fn sphere_and_ball_sizes_match_enumeration() {
        for rank in 1..=3 {
            let ctx = GroupContext::new(rank).unwrap();
            let mut ball = 0usize;
            for n in 0..=6 {
                let brute = brute_sphere(rank, n);
                ball += brute;
                assert_eq!(ctx.sphere_size(n), BigUint::from(brute), "r={rank} n={n}");
                assert_eq!(ctx.ball_size(n), BigUint::from(ball), "r={rank} n={n}");
            }
        }
        let r2 = GroupContext::new(2).unwrap();
        assert_eq!(r2.sphere_size(0), BigUint::from(1u32));
        assert_eq!(r2.sphere_size(2), BigUint::from(12u32));
        assert_eq!(r2.ball_size(2), BigUint::from(17u32));
        assert_eq!(r2.ball_size(10), BigUint::from(118097u32));
        assert_eq!(GroupContext::new(3).unwrap().sphere_size(3), BigUint::from(150u32));
        assert_eq!(GroupContext::new(1).unwrap().sphere_size(7), BigUint::from(2u32));
        for n in 0..=40 {
            assert_eq!(r2.ball_size(n), BigUint::from(2u32) * BigUint::from(3u32).pow(n as u32) - 1u32);
        }
    }

    #[test]
    fn ball_difference_is_sphere() {
        let ctx = GroupContext::new(3).unwrap();
        for n in 1..30 {
            assert_eq!(ctx.ball_size(n) - ctx.ball_size(n - 1), ctx.sphere_size(n));
        }
    }

    #[test]
    fn enumeration_order_and_counts() {
        let ctx = xy();
        let s1: Vec<String> = ctx.enumerate_sphere(1, 100).unwrap().map(|w| ctx.format_word(&w)).collect();
        assert_eq!(s1, ["x", "X", "y", "Y"]);
        let first = ctx.enumerate_sphere(2, 100).unwrap().next().unwrap();
        assert_eq!(ctx.format_word(&first), "xx");
        assert_eq!(ctx.enumerate_sphere(5, 1000).unwrap().count(), 324);
        let zero: Vec<Word> = ctx.enumerate_sphere(0, 1).unwrap().collect();
        assert_eq!(zero, vec![Word::identity()]);
    }

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        for rank in 1..=3 {
            let ctx = GroupContext::new(rank).unwrap();
            for n in 0..=8 {
                let words: Vec<Word> = ctx.enumerate_sphere(n, DEFAULT_ENUMERATION_CAP).unwrap().collect();
                assert!(words.windows(2).all(|p| p[0] < p[1]), "order r={rank} n={n}");
                let set: HashSet<&Word> = words.iter().collect();
                assert_eq!(set.len(), words.len());
                assert!(words.iter().all(|w| w.len() == n && Word::is_reduced_seq(w.letters())));
                assert_eq!(BigUint::from(words.len()), ctx.sphere_size(n));
            }
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let ctx = xy();
        let err = ctx.enumerate_sphere(10, 1000).err().unwrap();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
        assert!(err.to_string().contains("enumeration too large"));
    }

    #[test]
    fn parse_rejects_bad_input() {
        let ctx = xy();
        assert!(matches!(ctx.parse_word("xX"), Err(Error::Unreduced { .. })));
        assert!(ctx.parse_word("xq").is_err());
        assert!(ctx.parse_word("").is_err());
        assert_eq!(ctx.parse_word(" x Y ").unwrap().len(), 2);
        assert!(ctx.parse_word("1").unwrap().is_identity());
        assert_eq!(ctx.format_word(&Word::identity()), "1");
    }

    fn raw_seq(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0..2 * rank).prop_map(Letter::from_code), 0..=max_len)
    }

    fn reduced_word(rank: usize) -> impl Strategy<Value = Word> {
        raw_seq(rank, 16).prop_map(Word::reduce)
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_matches_rescan(s in raw_seq(3, 12)) {
            let w = Word::reduce(s.iter().copied());
            prop_assert!(Word::is_reduced_seq(w.letters()));
            prop_assert_eq!(Word::reduce(w.letters().iter().copied()), w.clone());
            prop_assert_eq!(w.letters(), &reduce_by_rescanning(s)[..]);
        }

        #[test]
        fn concat_length_bounds(u in reduced_word(2), v in reduced_word(2)) {
            let c = u.concat(&v);
            prop_assert!(c.len() <= u.len() + v.len());
            prop_assert!(c.len() >= u.len().abs_diff(v.len()));
            prop_assert_eq!(c.len() % 2, (u.len() + v.len()) % 2);
            prop_assert!(u.concat(&u.inverse()).is_identity());
            prop_assert_eq!(u.inverse().len(), u.len());
        }

        #[test]
        fn letter_inverse_is_involution(code in 0usize..52) {
            let l = Letter::from_code(code);
            prop_assert_eq!(l.inverse().inverse(), l);
            prop_assert_ne!(l.inverse(), l);
        }
    }
}

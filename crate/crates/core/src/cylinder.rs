//! Suffix-word sets `P_{a,d}` whose cylinders tile `E_{a,d} = {n : s2(n+a) - s2(n) = d}`.
//!
//! A word is written most significant character first; its cylinder `[w]` is
//! the set of `n` whose binary expansion, left-padded with zeros, ends with
//! `w`. Writing `w.r` for `w` followed by the low-order bit `r`:
//!
//! ```text
//! P_{2a,   d} = { w.0, w.1 : w in P_{a,d} }
//! P_{2a+1, d} = { w.0 : w in P_{a,d-1} } u { w.1 : w in P_{a+1,d+1} }
//! ```
//!
//! with bases `P_{0,0} = {eps}`, `P_{1,1} = {0}`, `P_{1,1-k} = {0 1^k}`.
//! Results are simplified by merging `{0w, 1w}` into `w`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Binary word, most significant character first. May be empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid word character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn chars(&self) -> &[u8] {
        &self.0
    }

    /// `self` followed by the low-order bit `bit`.
    pub fn push_low(&self, bit: u8) -> Word {
        let mut v = self.0.clone();
        v.push(bit);
        Word(v)
    }

    /// True iff `self` is a suffix of `other` (`[other]` is inside `[self]`).
    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.ends_with(&self.0)
    }

    /// Does the zero-padded expansion of `n` end with this word?
    pub fn matches(&self, n: u64) -> bool {
        self.0.iter().rev().enumerate().all(|(k, &c)| {
            let bit = if k < 64 { (n >> k) & 1 } else { 0 };
            bit as u8 == c
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            f.write_str(if c == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Finite family of words for `E_{a,d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSet {
    pub words: Vec<Word>,
    pub a: u64,
    pub d: i64,
}

impl WordSet {
    /// Fails if one word is a suffix of another.
    pub fn check_suffix_free(&self) -> Result<()> {
        let set: HashSet<&[u8]> = self.words.iter().map(|w| w.chars()).collect();
        for w in &self.words {
            for cut in 1..=w.len() {
                let suffix = &w.chars()[cut..];
                if set.contains(suffix) {
                    return Err(Error::SuffixComparable {
                        shorter: Word(suffix.to_vec()).to_string(),
                        longer: w.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `sum_w 2^-|w|`, after checking the cylinders are disjoint.
    pub fn density(&self) -> Result<Rational> {
        self.check_suffix_free()?;
        let max = self.words.iter().map(Word::len).max().unwrap_or(0);
        let num: BigInt = self.words.iter().map(|w| BigInt::one() << (max - w.len())).sum();
        Ok(Rational::new(num, BigInt::one() << max))
    }

    pub fn member(&self, n: u64) -> bool {
        self.words.iter().any(|w| w.matches(n))
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Indexes words by `(length, low bits)` for fast membership of `u64` values.
#[derive(Clone, Debug, Default)]
pub struct Matcher<T> {
    lengths: Vec<u32>,
    table: HashMap<(u32, u64), T>,
}

impl<T: Clone> Matcher<T> {
    pub fn new() -> Self {
        Matcher { lengths: Vec::new(), table: HashMap::new() }
    }

    /// Registers every word of `ws` with the tag `tag`.
    pub fn insert(&mut self, ws: &WordSet, tag: T) {
        for w in &ws.words {
            let len = w.len();
            let high = len.saturating_sub(64);
            // characters above bit 63 must be 0 for a u64 to match
            if w.chars()[..high].contains(&1) {
                continue;
            }
            let value = w.chars()[high..].iter().fold(0u64, |acc, &c| (acc << 1) | c as u64);
            let key_len = len.min(64) as u32;
            if !self.lengths.contains(&key_len) {
                self.lengths.push(key_len);
            }
            self.table.insert((key_len, value), tag.clone());
        }
        self.lengths.sort_unstable();
    }

    /// Tags of every registered word matching `n`.
    pub fn lookup(&self, n: u64) -> impl Iterator<Item = &T> + '_ {
        self.lengths.iter().filter_map(move |&len| {
            let low = if len >= 64 { n } else { n & ((1u64 << len) - 1) };
            self.table.get(&(len, low))
        })
    }
}

/// Memoized recursive solver. Not `Sync`; confine an instance to one thread.
#[derive(Default)]
pub struct CylinderSolver {
    memo: HashMap<(u64, i64), Rc<Vec<Word>>>,
}

impl CylinderSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&mut self, a: u64, d: i64) -> WordSet {
        let words = self.solve_words(a, d);
        WordSet { words: words.as_ref().clone(), a, d }
    }

    fn solve_words(&mut self, a: u64, d: i64) -> Rc<Vec<Word>> {
        if let Some(w) = self.memo.get(&(a, d)) {
            return w.clone();
        }
        let words = if d > a.count_ones() as i64 {
            Vec::new()
        } else if a == 0 {
            if d == 0 {
                vec![Word::empty()]
            } else {
                Vec::new()
            }
        } else if a == 1 {
            // n ending in 0 1^k: the +1 clears k ones and sets one bit.
            let k = (1 - d) as usize;
            let mut w = vec![0u8];
            w.extend(std::iter::repeat_n(1u8, k));
            vec![Word(w)]
        } else if a.is_multiple_of(2) {
            let inner = self.solve_words(a / 2, d);
            inner.iter().flat_map(|w| [w.push_low(0), w.push_low(1)]).collect()
        } else {
            let b = a / 2;
            let even = self.solve_words(b, d - 1);
            let odd = self.solve_words(b + 1, d + 1);
            even.iter().map(|w| w.push_low(0)).chain(odd.iter().map(|w| w.push_low(1))).collect()
        };
        let words = Rc::new(merge_siblings(words));
        self.memo.insert((a, d), words.clone());
        words
    }
}

/// One-shot solve with a fresh solver.
pub fn solve(a: u64, d: i64) -> WordSet {
    CylinderSolver::new().solve(a, d)
}

/// Replaces every pair `{0w, 1w}` by `w` until none remains; output is sorted.
pub fn merge_siblings(words: Vec<Word>) -> Vec<Word> {
    let mut set: HashSet<Word> = words.into_iter().collect();
    loop {
        let mut merged = false;
        let mut candidates: Vec<Word> = set.iter().filter(|w| w.chars().first() == Some(&0)).cloned().collect();
        candidates.sort_by_key(|w| std::cmp::Reverse(w.len()));
        for w in candidates {
            if !set.contains(&w) {
                continue;
            }
            let mut sibling = w.0.clone();
            sibling[0] = 1;
            let sibling = Word(sibling);
            if set.contains(&sibling) {
                set.remove(&w);
                set.remove(&sibling);
                set.insert(Word(w.0[1..].to_vec()));
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }
    let mut out: Vec<Word> = set.into_iter().collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

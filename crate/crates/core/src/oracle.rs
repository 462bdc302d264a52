//! Brute-force counting over `n < 2^M`, the referee for every exact path.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::exact::Rational;

/// Largest exponent accepted by the counting oracles.
pub const MAX_WINDOW_EXP: u32 = 30;

/// Counts range over `0 <= n < 2^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountingWindow {
    m: u32,
}

impl CountingWindow {
    pub fn new(m: u32) -> Result<Self> {
        if m > MAX_WINDOW_EXP {
            return Err(domain(format!("counting window exponent {m} exceeds {MAX_WINDOW_EXP}")));
        }
        Ok(CountingWindow { m })
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u64 {
        1u64 << self.m
    }

    fn denominator(&self) -> BigInt {
        BigInt::one() << self.m as usize
    }
}

/// `d -> #{n < 2^M : s2(n + a) - s2(n) = d}`.
pub fn brute_histogram(a: u64, window: CountingWindow) -> BTreeMap<i64, u64> {
    const CHUNK: u64 = 1 << 16;
    let chunks = window.size().div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .fold(BTreeMap::new, |mut hist, c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(window.size());
            for n in lo..hi {
                let d = (n + a).count_ones() as i64 - n.count_ones() as i64;
                *hist.entry(d).or_insert(0u64) += 1;
            }
            hist
        })
        .reduce(BTreeMap::new, |mut x, y| {
            for (d, c) in y {
                *x.entry(d).or_insert(0) += c;
            }
            x
        })
}

pub fn brute_density(a: u64, d: i64, window: CountingWindow) -> Rational {
    let count = brute_histogram(a, window).get(&d).copied().unwrap_or(0);
    Rational::new(BigInt::from(count), window.denominator())
}

/// Empirical `sum_d f(d) d^k` over the window.
pub fn brute_moment(a: u64, k: u32, window: CountingWindow) -> Rational {
    histogram_moment(&brute_histogram(a, window), k, window)
}

/// Moment of an already computed histogram.
pub fn histogram_moment(hist: &BTreeMap<i64, u64>, k: u32, window: CountingWindow) -> Rational {
    let num: BigInt = hist.iter().map(|(&d, &c)| BigInt::from(c) * num_traits::pow(BigInt::from(d), k as usize)).sum();
    Rational::new(num, window.denominator())
}

/// Empirical density of `{n : s2(n + a) >= s2(n)}`.
pub fn brute_cusick(a: u64, window: CountingWindow) -> Rational {
    let hist = brute_histogram(a, window);
    let count: u64 = hist.range(0..).map(|(_, &c)| c).sum();
    Rational::new(BigInt::from(count), window.denominator())
}

/// `|brute - exact|` for every `d` in `lo..=hi`.
pub fn density_errors(
    hist: &BTreeMap<i64, u64>,
    window: CountingWindow,
    exact: impl Fn(i64) -> Rational,
    lo: i64,
    hi: i64,
) -> Vec<(i64, Rational)> {
    (lo..=hi)
        .map(|d| {
            let brute = Rational::new(BigInt::from(hist.get(&d).copied().unwrap_or(0)), window.denominator());
            let diff = brute - exact(d);
            (d, if diff < Rational::zero() { -diff } else { diff })
        })
        .collect()
}

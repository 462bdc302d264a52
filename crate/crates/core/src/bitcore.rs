//! Binary expansions and the pattern statistics of `bin(a)`.
//!
//! Bits are stored least significant first: `bits[0] = a_0`. Pattern
//! statistics read the word `a_n ... a_0` most significant first, exactly as
//! written, with no implicit leading zero.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{domain, Result};

/// Number of one-bits of `value`.
pub fn s2(value: &BigUint) -> u64 {
    value.count_ones()
}

/// Binary expansion `a_n ... a_0` of a non-negative integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<u8>,
    value: BigUint,
}

impl BitString {
    pub fn from_biguint(value: BigUint) -> Self {
        let len = value.bits();
        let bits = (0..len).map(|k| value.bit(k) as u8).collect();
        BitString { bits, value }
    }

    pub fn from_u64(value: u64) -> Self {
        Self::from_biguint(BigUint::from(value))
    }

    /// Builds from least-significant-first bits; leading zeros are dropped.
    pub fn from_bits_lsb(bits: &[u8]) -> Self {
        let mut bits: Vec<u8> = bits.iter().map(|&b| (b != 0) as u8).collect();
        while bits.last() == Some(&0) {
            bits.pop();
        }
        let mut value = BigUint::zero();
        for (k, &b) in bits.iter().enumerate() {
            if b == 1 {
                value.set_bit(k as u64, true);
            }
        }
        BitString { bits, value }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Number of binary digits; 0 for `a = 0`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Index `n` of the leading bit, `None` for `a = 0`.
    pub fn top_index(&self) -> Option<usize> {
        self.bits.len().checked_sub(1)
    }

    pub fn s2(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    /// Bits from most to least significant.
    pub fn msb_first(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().rev().copied()
    }

    pub fn signs(&self) -> SignSequence {
        SignSequence::from_bits(&self.bits)
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("0");
        }
        for b in self.msb_first() {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `b_j = (-1)^(a_j + 1)`: +1 at one-bits, -1 at zero-bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSequence {
    signs: Vec<i8>,
}

impl SignSequence {
    pub fn from_bits(bits: &[u8]) -> Self {
        SignSequence { signs: bits.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect() }
    }

    /// Panics if any entry is not +1 or -1.
    pub fn from_signs(signs: Vec<i8>) -> Self {
        assert!(signs.iter().all(|&s| s == 1 || s == -1), "signs must be +1 or -1");
        SignSequence { signs }
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// Occurrences of the two-letter pattern `01` in the literal word `a_n ... a_0`.
pub fn l_count(a: &BitString) -> u64 {
    a.bits.windows(2).filter(|w| w[0] == 1 && w[1] == 0).count() as u64
}

/// Number of maximal blocks of ones, i.e. `01` occurrences in `0 a_n ... a_0`.
pub fn one_blocks(a: &BitString) -> u64 {
    if a.is_empty() {
        0
    } else {
        l_count(a) + 1
    }
}

/// Occurrences of `0w1` or `1w0` with `|w| = i - 1`: pairs of bits at
/// distance `i` that differ. Requires `1 <= i <= n`.
pub fn sigma(a: &BitString, i: usize) -> Result<u64> {
    let n = a.top_index().ok_or_else(|| domain("sigma is undefined for a = 0"))?;
    if i == 0 || i > n {
        return Err(domain(format!("sigma index {i} outside 1..={n}")));
    }
    Ok(a.bits.iter().zip(&a.bits[i..]).filter(|(x, y)| x != y).count() as u64)
}

/// `sum_{k=0}^{n} X_k 2^k` from a least-significant-first bit sequence.
pub fn assemble(bit_sequence: &[u8], n: usize) -> Result<BigUint> {
    if bit_sequence.len() < n + 1 {
        return Err(domain(format!(
            "need {} bits to assemble index {n}, got {}",
            n + 1,
            bit_sequence.len()
        )));
    }
    let mut value = BigUint::zero();
    for (k, &b) in bit_sequence[..=n].iter().enumerate() {
        if b != 0 {
            value |= BigUint::one() << k;
        }
    }
    Ok(value)
}

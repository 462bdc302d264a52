//! Exact representation of the measures `mu_a`.
//!
//! A measure is stored in the basis of shifted point masses `delta_k` and
//! shifted copies `S^k mu_1` of the base measure `mu_1(t) = 2^(t-2)`, `t <= 1`,
//! where `(S^k mu_1)(d) = mu_1(d + k)`. Every `mu_a` is a finite combination
//! of those, so
//!
//! ```text
//! mu(d) = delta[d] + sum_k mu1[k] * mu_1(d + k)
//! ```
//!
//! is exact, and the left tail is geometric: below some `d*`, all `mu_1`
//! copies are active, no point mass remains, and `mu(d - 1) = mu(d) / 2`.
//!
//! The same code runs over [`Dyadic`] (exact) and `f64` (float path) through
//! the [`Coefficient`] trait.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::bitcore::BitString;
use crate::error::{Error, Result};
use crate::exact::{binomial, format_rational, parse_rational, Dyadic, Rational};

/// Scalar type a measure can be computed over.
pub trait Coefficient: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `self * 2^k`.
    fn scale_pow2(&self, k: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for Dyadic {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_bigint(v: &BigInt) -> Self {
        Dyadic::new(v.clone(), 0)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_pow2(&self, k: i64) -> Self {
        Dyadic::scale_pow2(self, k)
    }
    fn to_f64(&self) -> f64 {
        Dyadic::to_f64(self)
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_bigint(v: &BigInt) -> Self {
        num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_pow2(&self, k: i64) -> Self {
        libm::scalbn(*self, k.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Dense coefficient run `values[i]` at offset `start + i`.
#[derive(Clone, Debug, PartialEq)]
struct Run<C> {
    start: i64,
    values: Vec<C>,
}

impl<C: Coefficient> Run<C> {
    fn empty() -> Self {
        Run { start: 0, values: Vec::new() }
    }

    fn single(offset: i64, value: C) -> Self {
        Run { start: offset, values: vec![value] }
    }

    fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }

    fn get(&self, k: i64) -> Option<&C> {
        if k < self.start {
            return None;
        }
        self.values.get((k - self.start) as usize)
    }

    fn shifted(&self, by: i64) -> Self {
        Run { start: self.start + by, values: self.values.clone() }
    }

    /// `(self + other) / 2`.
    fn half_sum(&self, other: &Self) -> Self {
        if self.values.is_empty() {
            return other.scaled_half();
        }
        if other.values.is_empty() {
            return self.scaled_half();
        }
        let start = self.start.min(other.start);
        let end = self.end().max(other.end());
        let zero = C::zero();
        let values = (start..end)
            .map(|k| {
                let x = self.get(k).unwrap_or(&zero);
                let y = other.get(k).unwrap_or(&zero);
                x.add(y).scale_pow2(-1)
            })
            .collect();
        let mut run = Run { start, values };
        run.trim();
        run
    }

    fn scaled_half(&self) -> Self {
        Run { start: self.start, values: self.values.iter().map(|v| v.scale_pow2(-1)).collect() }
    }

    fn trim(&mut self) {
        while self.values.last().is_some_and(|v| v.is_zero()) {
            self.values.pop();
        }
        let lead = self.values.iter().take_while(|v| v.is_zero()).count();
        if lead == self.values.len() {
            *self = Run::empty();
        } else if lead > 0 {
            self.values.drain(..lead);
            self.start += lead as i64;
        }
    }

    fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(i, v)| (self.start + i as i64, v))
    }

    fn min_key(&self) -> Option<i64> {
        (!self.values.is_empty()).then_some(self.start)
    }

    fn max_key(&self) -> Option<i64> {
        (!self.values.is_empty()).then(|| self.end() - 1)
    }
}

/// Finite combination of shifted point masses and shifted copies of `mu_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rep<C> {
    delta: Run<C>,
    mu1: Run<C>,
}

/// Exact measure.
pub type MeasureRep = Rep<Dyadic>;
/// Double-precision mirror of [`MeasureRep`].
pub type FloatMeasure = Rep<f64>;

/// Consecutive pair `(mu_b, mu_{b+1})` carried while reading the bits of `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurePair<C> {
    pub lower: Rep<C>,
    pub upper: Rep<C>,
}

impl<C: Coefficient> MeasurePair<C> {
    /// `(mu_0, mu_1)`.
    pub fn initial() -> Self {
        MeasurePair { lower: Rep::dirac(0), upper: Rep::mu1() }
    }

    /// Pair for the prefix `b = 1`: `(mu_1, mu_2) = (mu_1, mu_1)`.
    pub fn after_leading_one() -> Self {
        MeasurePair { lower: Rep::mu1(), upper: Rep::mu1() }
    }

    /// Appends one low-order bit to the prefix `b`.
    ///
    /// Bit 0: `(mu_b, mu_{b+1}) -> (mu_{2b}, mu_{2b+1})`;
    /// bit 1: `(mu_b, mu_{b+1}) -> (mu_{2b+1}, mu_{2b+2})`, with
    /// `mu_{2b+1} = 1/2 S^-1 mu_b + 1/2 S mu_{b+1}`.
    pub fn push_bit(self, bit: u8) -> Self {
        let odd = Rep::odd_step(&self.lower, &self.upper);
        if bit == 0 {
            MeasurePair { lower: self.lower, upper: odd }
        } else {
            MeasurePair { lower: odd, upper: self.upper }
        }
    }
}

/// Exact `mu_a`.
pub fn build_measure(a: &BigUint) -> MeasureRep {
    build_rep(&BitString::from_biguint(a.clone()))
}

pub fn build_measure_u64(a: u64) -> MeasureRep {
    build_rep(&BitString::from_u64(a))
}

/// Float-path `mu_a`, built with the same recurrence in double precision.
pub fn build_measure_f64(a: &BigUint) -> FloatMeasure {
    build_rep(&BitString::from_biguint(a.clone()))
}

/// Builds `mu_a` by walking `bin(a)` from the most significant bit.
///
/// The leading one-bit maps `(mu_0, mu_1)` to `(mu_1, mu_2) = (mu_1, mu_1)`;
/// the pair is seeded there directly so `mu_1` keeps its one-term form.
pub fn build_rep<C: Coefficient>(a: &BitString) -> Rep<C> {
    if a.is_empty() {
        return Rep::dirac(0);
    }
    a.msb_first().skip(1).fold(MeasurePair::after_leading_one(), MeasurePair::push_bit).lower
}

/// Moments `M_k = sum_{t <= 1} t^k 2^(t-2)` of `mu_1`, for `k = 0..=max_k`.
///
/// With `t = 1 - m` this is `1/2 sum_j C(k,j) (-1)^j G_j`, where
/// `G_j = sum_{m >= 0} m^j 2^-m` obeys `G_0 = 2`, `G_j = sum_{i<j} C(j,i) G_i`
/// (differentiate the geometric series at 1/2).
pub fn mu1_moments(max_k: u32) -> Vec<BigInt> {
    let mut g: Vec<BigInt> = Vec::with_capacity(max_k as usize + 1);
    g.push(BigInt::from(2));
    for j in 1..=max_k {
        let s = (0..j).map(|i| binomial(j, i) * &g[i as usize]).sum();
        g.push(s);
    }
    // Every M_k is an integer: the alternating sum is even.
    (0..=max_k)
        .map(|k| {
            let s: BigInt = (0..=k)
                .map(|j| {
                    let t = binomial(k, j) * &g[j as usize];
                    if j % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                })
                .sum();
            s / 2
        })
        .collect()
}

pub fn mu1_moment(k: u32) -> Rational {
    Rational::from_integer(mu1_moments(k).pop().expect("non-empty"))
}

/// Window-plus-geometric-tail form of a measure.
///
/// `mu(d) = tail_coeff * 2^d` for `d <= tail_end`, `values[d - tail_end - 1]`
/// for `tail_end < d <= support_max`, and 0 above.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile<C> {
    pub tail_end: i64,
    pub tail_coeff: C,
    pub values: Vec<C>,
}

impl<C: Coefficient> Profile<C> {
    pub fn support_max(&self) -> i64 {
        self.tail_end + self.values.len() as i64
    }

    pub fn at(&self, d: i64) -> C {
        if d <= self.tail_end {
            self.tail_coeff.scale_pow2(d)
        } else {
            self.values.get((d - self.tail_end - 1) as usize).cloned().unwrap_or_else(C::zero)
        }
    }

    /// `sum_{d <= x} mu(d)`.
    pub fn mass_at_most(&self, x: i64) -> C {
        let tail_top = x.min(self.tail_end);
        let mut acc = self.tail_coeff.scale_pow2(tail_top + 1);
        for d in (self.tail_end + 1)..=x.min(self.support_max()) {
            acc = acc.add(&self.at(d));
        }
        acc
    }

    /// `sum_{d >= x} mu(d)`.
    pub fn mass_at_least(&self, x: i64) -> C {
        let mut acc = C::zero();
        if x <= self.tail_end {
            // sum_{x <= d <= tail_end} c 2^d = c (2^(tail_end+1) - 2^x)
            let hi = self.tail_coeff.scale_pow2(self.tail_end + 1);
            let lo = self.tail_coeff.scale_pow2(x);
            acc = hi.add(&lo.mul(&C::from_bigint(&BigInt::from(-1))));
        }
        for d in x.max(self.tail_end + 1)..=self.support_max() {
            acc = acc.add(&self.at(d));
        }
        acc
    }
}

impl<C: Coefficient> Rep<C> {
    pub fn dirac(offset: i64) -> Self {
        Rep { delta: Run::single(offset, C::one()), mu1: Run::empty() }
    }

    pub fn mu1() -> Self {
        Rep { delta: Run::empty(), mu1: Run::single(0, C::one()) }
    }

    /// Builds from explicit coefficient maps.
    pub fn from_parts(delta: &BTreeMap<i64, C>, mu1: &BTreeMap<i64, C>) -> Self {
        fn run<C: Coefficient>(m: &BTreeMap<i64, C>) -> Run<C> {
            let (Some((&lo, _)), Some((&hi, _))) = (m.first_key_value(), m.last_key_value()) else {
                return Run::empty();
            };
            let values = (lo..=hi).map(|k| m.get(&k).cloned().unwrap_or_else(C::zero)).collect();
            let mut r = Run { start: lo, values };
            r.trim();
            r
        }
        Rep { delta: run(delta), mu1: run(mu1) }
    }

    /// `S^by`: `(S^by mu)(d) = mu(d + by)`.
    pub fn shift(&self, by: i64) -> Self {
        Rep { delta: self.delta.shifted(-by), mu1: self.mu1.shifted(by) }
    }

    /// `1/2 S^-1 lower + 1/2 S upper`.
    pub fn odd_step(lower: &Self, upper: &Self) -> Self {
        let l = lower.shift(-1);
        let u = upper.shift(1);
        Rep { delta: l.delta.half_sum(&u.delta), mu1: l.mu1.half_sum(&u.mu1) }
    }

    /// Non-zero point-mass coefficients `(offset, p_offset)`.
    pub fn delta_part(&self) -> impl Iterator<Item = (i64, &C)> {
        self.delta.iter()
    }

    /// Non-zero `mu_1` coefficients `(k, q_k)` of `S^k mu_1`.
    pub fn mu1_part(&self) -> impl Iterator<Item = (i64, &C)> {
        self.mu1.iter()
    }

    /// Number of stored coefficients.
    pub fn size(&self) -> usize {
        self.delta.values.len() + self.mu1.values.len()
    }

    pub fn evaluate(&self, d: i64) -> C {
        let mut acc = self.delta.get(d).cloned().unwrap_or_else(C::zero);
        for (k, q) in self.mu1.iter() {
            let t = d + k;
            if t <= 1 {
                acc = acc.add(&q.scale_pow2(t - 2));
            }
        }
        acc
    }

    /// Largest `d` with possibly non-zero mass.
    pub fn support_max(&self) -> Option<i64> {
        let from_delta = self.delta.max_key();
        let from_mu1 = self.mu1.min_key().map(|k| 1 - k);
        from_delta.max(from_mu1)
    }

    pub fn profile(&self) -> Profile<C> {
        let Some(top) = self.support_max() else {
            return Profile { tail_end: 0, tail_coeff: C::zero(), values: Vec::new() };
        };
        let tail_end = match (self.delta.min_key(), self.mu1.max_key()) {
            (Some(dm), Some(km)) => (dm - 1).min(1 - km),
            (Some(dm), None) => dm - 1,
            (None, Some(km)) => 1 - km,
            (None, None) => unreachable!("support_max is Some"),
        };
        let tail_coeff = self.mu1.iter().fold(C::zero(), |acc, (k, q)| acc.add(&q.scale_pow2(k - 2)));

        // mu(d) = delta[d] + 2^(d-2) * P(1 - d) with P(m) = sum_{k <= m} q_k 2^k.
        let mut values = Vec::with_capacity((top - tail_end).max(0) as usize);
        // P(m) for m = 1 - top ..= -tail_end; no mu_1 key lies below 1 - top.
        let (m_lo, m_hi) = (1 - top, -tail_end);
        let mut prefix = C::zero();
        let mut prefix_by_m: Vec<C> = Vec::with_capacity((m_hi - m_lo + 1).max(0) as usize);
        for m in m_lo..=m_hi {
            if let Some(q) = self.mu1.get(m) {
                prefix = prefix.add(&q.scale_pow2(m));
            }
            prefix_by_m.push(prefix.clone());
        }
        for d in (tail_end + 1)..=top {
            let m = 1 - d;
            let p = &prefix_by_m[(m - m_lo) as usize];
            let mut v = p.scale_pow2(d - 2);
            if let Some(x) = self.delta.get(d) {
                v = v.add(x);
            }
            values.push(v);
        }
        Profile { tail_end, tail_coeff, values }
    }

    pub fn total_mass(&self) -> C {
        self.delta.iter().chain(self.mu1.iter()).fold(C::zero(), |acc, (_, v)| acc.add(v))
    }

    /// `sum_d mu(d) d^k`.
    pub fn moment(&self, k: u32) -> C {
        self.moments(k).pop().expect("non-empty")
    }

    /// Moments `0..=max_k`.
    pub fn moments(&self, max_k: u32) -> Vec<C> {
        let base: Vec<C> = mu1_moments(max_k).iter().map(C::from_bigint).collect();
        let binom: Vec<Vec<C>> = (0..=max_k)
            .map(|j| (0..=j).map(|i| C::from_bigint(&binomial(j, i))).collect())
            .collect();
        (0..=max_k)
            .map(|j| {
                let mut acc = C::zero();
                for (d, p) in self.delta.iter() {
                    acc = acc.add(&p.mul(&int_pow::<C>(d, j)));
                }
                // S^k mu_1 is mu_1 moved to d = t - k.
                for (k, q) in self.mu1.iter() {
                    let mut inner = C::zero();
                    for i in 0..=j {
                        let term = binom[j as usize][i as usize].mul(&int_pow::<C>(-k, j - i)).mul(&base[i as usize]);
                        inner = inner.add(&term);
                    }
                    acc = acc.add(&q.mul(&inner));
                }
                acc
            })
            .collect()
    }

    pub fn mean(&self) -> C {
        self.moment(1)
    }

    /// `m_2 - m_1^2`.
    pub fn variance(&self) -> C {
        let m = self.moments(2);
        let neg_sq = m[1].mul(&m[1]).mul(&C::from_bigint(&BigInt::from(-1)));
        m[2].add(&neg_sq)
    }

    /// `sum_{d >= 0} mu(d)`.
    pub fn cusick_c(&self) -> C {
        self.profile().mass_at_least(0)
    }

    /// `sum_{d <= floor(x)} mu(d)`.
    pub fn cdf(&self, x: f64) -> C {
        if x.is_nan() {
            return C::zero();
        }
        let p = self.profile();
        if x >= p.support_max() as f64 {
            return self.total_mass();
        }
        if x == f64::NEG_INFINITY {
            return C::zero();
        }
        p.mass_at_most(x.floor() as i64)
    }

    /// Window sum of squares and the tail term `c^2 4^tail_end`; the full
    /// norm is `window + tail * 4/3`.
    fn l2_parts(&self) -> (C, C) {
        let p = self.profile();
        let window = p.values.iter().fold(C::zero(), |acc, v| acc.add(&v.mul(v)));
        let tail = p.tail_coeff.mul(&p.tail_coeff).scale_pow2(2 * p.tail_end);
        (window, tail)
    }
}

impl Rep<Dyadic> {
    pub fn to_f64(&self) -> FloatMeasure {
        let conv = |r: &Run<Dyadic>| Run { start: r.start, values: r.values.iter().map(Dyadic::to_f64).collect() };
        Rep { delta: conv(&self.delta), mu1: conv(&self.mu1) }
    }

    pub fn evaluate_q(&self, d: i64) -> Rational {
        self.evaluate(d).to_rational()
    }

    pub fn moment_q(&self, k: u32) -> Rational {
        self.moment(k).to_rational()
    }

    /// Exact `sum_d mu(d)^2`.
    pub fn l2_norm_squared(&self) -> Rational {
        let (window, tail) = self.l2_parts();
        window.to_rational() + tail.to_rational() * Rational::new(BigInt::from(4), BigInt::from(3))
    }

    /// Serializes to `{"delta": {offset: "num/den"}, "mu1": {offset: "num/den"}}`.
    pub fn to_json(&self) -> Value {
        let part = |it: &mut dyn Iterator<Item = (i64, &Dyadic)>| {
            let mut m = Map::new();
            for (k, v) in it {
                m.insert(k.to_string(), Value::String(format_rational(&v.to_rational())));
            }
            Value::Object(m)
        };
        let mut obj = Map::new();
        obj.insert("delta".into(), part(&mut self.delta_part()));
        obj.insert("mu1".into(), part(&mut self.mu1_part()));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let part = |name: &str| -> Result<BTreeMap<i64, Dyadic>> {
            let obj = v
                .get(name)
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse(format!("missing object {name:?}")))?;
            obj.iter()
                .map(|(k, val)| {
                    let key: i64 = k.parse().map_err(|_| Error::Parse(format!("bad offset {k:?}")))?;
                    let s = val.as_str().ok_or_else(|| Error::Parse(format!("offset {k} is not a string")))?;
                    Ok((key, dyadic_from_rational(&parse_rational(s)?)?))
                })
                .collect()
        };
        Ok(Rep::from_parts(&part("delta")?, &part("mu1")?))
    }
}

impl Rep<f64> {
    /// `sum_d mu(d)^2` in double precision.
    pub fn l2_norm_squared(&self) -> f64 {
        let (window, tail) = self.l2_parts();
        window + tail * 4.0 / 3.0
    }
}

fn dyadic_from_rational(q: &Rational) -> Result<Dyadic> {
    let den = q.denom();
    let tz = den.trailing_zeros().unwrap_or(0);
    if (den >> tz as usize) != BigInt::one() {
        return Err(Error::Parse(format!("{} is not dyadic", format_rational(q))));
    }
    Ok(Dyadic::new(q.numer().clone(), tz))
}

fn int_pow<C: Coefficient>(base: i64, exp: u32) -> C {
    C::from_bigint(&num_traits::pow(BigInt::from(base), exp as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn m(a: u64) -> MeasureRep {
        build_measure_u64(a)
    }

    #[test]
    fn base_measures() {
        let m0 = m(0);
        assert_eq!(m0.delta_part().map(|(k, v)| (k, v.to_rational())).collect::<Vec<_>>(), vec![(0, q(1, 1))]);
        assert_eq!(m0.mu1_part().count(), 0);

        let m1 = m(1);
        assert_eq!(m1.delta_part().count(), 0);
        assert_eq!(m1.mu1_part().map(|(k, v)| (k, v.to_rational())).collect::<Vec<_>>(), vec![(0, q(1, 1))]);
        assert_eq!(m1.evaluate_q(1), q(1, 2));
        assert_eq!(m1.evaluate_q(0), q(1, 4));
        assert_eq!(m1.evaluate_q(-1), q(1, 8));
        assert_eq!(m1.evaluate_q(2), q(0, 1));
    }

    #[test]
    fn mu3_values() {
        let m3 = m(3);
        assert_eq!(m3.evaluate_q(2), q(1, 4));
        assert_eq!(m3.evaluate_q(1), q(1, 8));
        // n = 1, 2, 3 mod 4 contribute 1/8, 1/16, 1/8.
        assert_eq!(m3.evaluate_q(0), q(1, 8) + q(1, 16) + q(1, 8));
        assert_eq!(m3.evaluate_q(5), q(0, 1));
        let hits = (0u64..1 << 20).filter(|&n| (n + 3).count_ones() == n.count_ones()).count();
        assert!((hits as f64 / (1 << 20) as f64 - 5.0 / 16.0).abs() < 1e-4);
    }

    #[test]
    fn doubling_preserves_evaluations() {
        for a in 1..200u64 {
            let (x, y) = (m(a), m(2 * a));
            for d in -15..=10 {
                assert_eq!(x.evaluate(d), y.evaluate(d), "a={a} d={d}");
            }
        }
    }

    #[test]
    fn top_bit_seeding_matches_full_chain() {
        for a in 1..300u64 {
            let bits = BitString::from_u64(a);
            let full: MeasureRep = bits.msb_first().fold(MeasurePair::initial(), MeasurePair::push_bit).lower;
            let seeded = m(a);
            for d in -20..=12 {
                assert_eq!(full.evaluate(d), seeded.evaluate(d), "a={a} d={d}");
            }
        }
    }

    #[test]
    fn mu1_moment_table() {
        assert_eq!(mu1_moment(0), q(1, 1));
        assert_eq!(mu1_moment(1), q(0, 1));
        assert_eq!(mu1_moment(2), q(2, 1));
        assert_eq!(mu1_moment(3), q(-6, 1));
    }

    #[test]
    fn mu1_moments_match_truncated_series() {
        // sum_{t=-400}^{1} t^k 2^(t-2); the omitted tail is below 2^-300.
        let exact = mu1_moments(8);
        for k in 0..=8u32 {
            let mut acc = Rational::zero();
            for t in -400i64..=1 {
                let w = Dyadic::pow2(t - 2).to_rational();
                acc += w * Rational::from_integer(num_traits::pow(BigInt::from(t), k as usize));
            }
            let diff = (acc - Rational::from_integer(exact[k as usize].clone())).abs();
            assert!(diff < q(1, 1 << 40), "k={k}");
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(m(1).moment_q(2), q(2, 1));
        assert_eq!(m(3).moment_q(2), q(3, 1));
        for a in 0..256u64 {
            let rep = m(a);
            assert_eq!(rep.moment_q(0), q(1, 1));
            assert_eq!(rep.moment_q(1), q(0, 1), "a={a}");
        }
    }

    #[test]
    fn moments_match_direct_summation() {
        for a in [5u64, 11, 22, 37, 100] {
            let rep = m(a);
            let p = rep.profile();
            for k in 0..=5u32 {
                let mut acc = Rational::zero();
                for d in (p.tail_end - 600)..=p.support_max() {
                    acc += p.at(d).to_rational() * Rational::from_integer(num_traits::pow(BigInt::from(d), k as usize));
                }
                let diff = (acc - rep.moment_q(k)).abs();
                assert!(diff < q(1, 1 << 50), "a={a} k={k}");
            }
        }
    }

    #[test]
    fn l2_examples() {
        assert_eq!(m(0).l2_norm_squared(), q(1, 1));
        assert_eq!(m(1).l2_norm_squared(), q(1, 3));
        assert_eq!(m(2).l2_norm_squared(), q(1, 3));
    }

    #[test]
    fn cusick_and_cdf_examples() {
        assert_eq!(m(0).cusick_c().to_rational(), q(1, 1));
        assert_eq!(m(1).cusick_c().to_rational(), q(3, 4));
        assert_eq!(m(0).cdf(-1.0).to_rational(), q(0, 1));
        assert_eq!(m(1).cdf(0.0).to_rational(), q(1, 2));
        assert_eq!(m(1).cdf(0.5).to_rational(), q(1, 2));
        for a in [3u64, 9, 77] {
            let s = BitString::from_u64(a).s2() as f64;
            assert_eq!(m(a).cdf(s).to_rational(), q(1, 1));
            assert_eq!(m(a).cdf(f64::INFINITY).to_rational(), q(1, 1));
        }
    }

    #[test]
    fn profile_agrees_with_evaluate() {
        for a in 0..300u64 {
            let rep = m(a);
            let p = rep.profile();
            for d in (p.tail_end - 5)..=(p.support_max() + 3) {
                assert_eq!(p.at(d), rep.evaluate(d), "a={a} d={d}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let rep = m(77);
        let v = rep.to_json();
        let back = MeasureRep::from_json(&v).unwrap();
        for d in -20..8 {
            assert_eq!(back.evaluate(d), rep.evaluate(d));
        }
        assert_eq!(m(1).to_json().to_string(), r#"{"delta":{},"mu1":{"0":"1"}}"#);
        let bad = serde_json::json!({"delta": {"0": "1/3"}, "mu1": {}});
        assert!(MeasureRep::from_json(&bad).is_err());
    }

    #[test]
    fn float_path_agrees() {
        for a in [1u64, 3, 12345, 987654321] {
            let exact = m(a);
            let float = build_measure_f64(&BigUint::from(a));
            for d in -30..=20 {
                let (x, y) = (exact.evaluate(d).to_f64(), float.evaluate(d));
                assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-300), "a={a} d={d}");
            }
            let (v, vf) = (exact.variance().to_f64(), float.variance());
            assert!((v - vf).abs() <= 1e-9 * v);
            let (l, lf) = (crate::exact::rational_to_f64(&exact.l2_norm_squared()), float.l2_norm_squared());
            assert!((l - lf).abs() <= 1e-9 * l);
        }
    }
}

//! Closed-form variance of `mu_a` from the sign sequence of `bin(a)`.
//!
//! With `n` the index of the leading bit and `b_j = +-1`:
//!
//! ```text
//! Var = (n+3)/2 - 1/2^(n+1) - 1/2 sum_{i=1}^{n} sum_{k=0}^{n-i} b_{k+i} b_k / 2^i
//!       + sum_{k=0}^{n} (b_k + b_{n-k}) / 2^(k+1)
//! ```
//!
//! The pattern-count variant replaces the correlation double sum by the
//! counts `sigma_i(a)` of differing bit pairs at distance `i`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::bitcore::{l_count, one_blocks, sigma, BitString};
use crate::error::{domain, Result};
use crate::exact::{format_rational, Rational};

/// Largest lag kept by the float path; later terms are below `2^-64`.
pub const FLOAT_LAG_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceBreakdown {
    /// `(n + 3) / 2`
    pub leading: Rational,
    /// `-1 / 2^(n+1)`
    pub tail: Rational,
    /// `-1/2 sum_i sum_k b_{k+i} b_k / 2^i`
    pub correlation_sum: Rational,
    /// `sum_k (b_k + b_{n-k}) / 2^(k+1)`
    pub boundary_sum: Rational,
    pub total: Rational,
}

impl VarianceBreakdown {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "leading": format_rational(&self.leading),
            "tail": format_rational(&self.tail),
            "correlation_sum": format_rational(&self.correlation_sum),
            "boundary_sum": format_rational(&self.boundary_sum),
            "total": format_rational(&self.total),
        })
    }
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

fn top_index(a: &BitString) -> Result<usize> {
    a.top_index().ok_or_else(|| domain("variance formula needs a >= 1 (Var(mu_0) = 0)"))
}

/// `sum_k (b_k + b_{n-k}) / 2^(k+1)`.
fn boundary_sum(b: &[i8]) -> Rational {
    let n = b.len() - 1;
    let num: BigInt = (0..=n).map(|k| BigInt::from(b[k] + b[n - k]) * pow2(n - k)).sum();
    Rational::new(num, pow2(n + 1))
}

pub fn variance_closed_form(a: &BitString) -> Result<VarianceBreakdown> {
    let n = top_index(a)?;
    let signs = a.signs();
    let b = signs.as_slice();

    let leading = Rational::new(BigInt::from(n + 3), BigInt::from(2));
    let tail = -Rational::new(BigInt::one(), pow2(n + 1));
    // sum_i S_i / 2^i with S_i the lag-i autocorrelation, over 2^(n+1) to fold in the 1/2.
    let corr_num: BigInt = (1..=n)
        .map(|i| {
            let s: i64 = (0..=n - i).map(|k| (b[k + i] * b[k]) as i64).sum();
            BigInt::from(s) * pow2(n - i)
        })
        .sum();
    let correlation_sum = -Rational::new(corr_num, pow2(n + 1));
    let boundary_sum = boundary_sum(b);
    let total = &leading + &tail + &correlation_sum + &boundary_sum;
    Ok(VarianceBreakdown { leading, tail, correlation_sum, boundary_sum, total })
}

/// `1 + n/2^(n+1) + 1/2 sum_i i/2^i + sum_i sigma_i(a)/2^i + sum_k (b_k + b_{n-k})/2^(k+1)`.
pub fn variance_sigma_form(a: &BitString) -> Result<Rational> {
    let n = top_index(a)?;
    let mut num = pow2(n + 1) + BigInt::from(n);
    for i in 1..=n {
        num += BigInt::from(i) * pow2(n - i);
        num += BigInt::from(sigma(a, i)?) * pow2(n + 1 - i);
    }
    Ok(Rational::new(num, pow2(n + 1)) + boundary_sum(a.signs().as_slice()))
}

/// Double-precision closed form with lags capped at [`FLOAT_LAG_CAP`];
/// `O(64 n)` instead of `O(n^2)`.
pub fn variance_closed_form_f64(a: &BitString) -> Result<f64> {
    let n = top_index(a)?;
    let signs = a.signs();
    let b = signs.as_slice();
    let mut corr = 0.0;
    for i in 1..=n.min(FLOAT_LAG_CAP) {
        let s: i64 = b.iter().zip(&b[i..]).map(|(&x, &y)| (x * y) as i64).sum();
        corr += s as f64 * libm::exp2(-(i as f64));
    }
    let boundary: f64 = (0..=n.min(1100))
        .map(|k| (b[k] + b[n - k]) as f64 * libm::exp2(-(k as f64 + 1.0)))
        .sum();
    Ok((n as f64 + 3.0) / 2.0 - libm::exp2(-(n as f64 + 1.0)) - 0.5 * corr + boundary)
}

/// Which reading of `l(a)` the bounds use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LReading {
    /// `01` occurrences in `a_n ... a_0` as written.
    Literal,
    /// `01` occurrences in `0 a_n ... a_0`, i.e. the number of blocks of ones.
    OneBlocks,
}

impl LReading {
    pub fn count(self, a: &BitString) -> u64 {
        match self {
            LReading::Literal => l_count(a),
            LReading::OneBlocks => one_blocks(a),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceBounds {
    pub lower: i64,
    pub value: Rational,
    pub upper: i64,
    pub ok: bool,
}

/// Checks `l(a) - 1 <= Var(mu_a) <= 4 l(a) + 2` under the given reading of `l`.
pub fn variance_bounds_check_with(a: &BitString, reading: LReading) -> Result<VarianceBounds> {
    let value = variance_closed_form(a)?.total;
    let l = reading.count(a) as i64;
    let (lower, upper) = (l - 1, 4 * l + 2);
    let ok = Rational::from_integer(lower.into()) <= value && value <= Rational::from_integer(upper.into());
    Ok(VarianceBounds { lower, value, upper, ok })
}

/// Float-path bound check used for large sweeps.
pub fn variance_bounds_check_f64(a: &BitString, reading: LReading) -> Result<(i64, f64, i64, bool)> {
    let value = variance_closed_form_f64(a)?;
    let l = reading.count(a) as i64;
    let (lower, upper) = (l - 1, 4 * l + 2);
    Ok((lower, value, upper, lower as f64 <= value && value <= upper as f64))
}

/// Bound check under the block-count reading of `l(a)`; see [`LReading`].
pub fn variance_bounds_check(a: &BitString) -> Result<VarianceBounds> {
    variance_bounds_check_with(a, LReading::OneBlocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_measure_u64;

    fn bs(a: u64) -> BitString {
        BitString::from_u64(a)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn closed_form_examples() {
        let v1 = variance_closed_form(&bs(1)).unwrap();
        assert_eq!(v1.leading, q(3, 2));
        assert_eq!(v1.tail, q(-1, 2));
        assert_eq!(v1.correlation_sum, q(0, 1));
        assert_eq!(v1.boundary_sum, q(1, 1));
        assert_eq!(v1.total, q(2, 1));

        let v3 = variance_closed_form(&bs(3)).unwrap();
        assert_eq!(v3.leading, q(2, 1));
        assert_eq!(v3.tail, q(-1, 4));
        assert_eq!(v3.correlation_sum, q(-1, 4));
        assert_eq!(v3.boundary_sum, q(3, 2));
        assert_eq!(v3.total, q(3, 1));

        assert_eq!(variance_closed_form(&bs(2)).unwrap().total, q(2, 1));
        assert!(variance_closed_form(&bs(0)).is_err());
    }

    #[test]
    fn sigma_form_examples() {
        assert_eq!(variance_sigma_form(&bs(1)).unwrap(), q(2, 1));
        assert_eq!(variance_sigma_form(&bs(3)).unwrap(), q(3, 1));
        assert_eq!(variance_sigma_form(&bs(5)).unwrap(), variance_closed_form(&bs(5)).unwrap().total);
        assert!(variance_sigma_form(&bs(0)).is_err());
    }

    #[test]
    fn breakdown_sums_to_total() {
        for a in 1..500u64 {
            let v = variance_closed_form(&bs(a)).unwrap();
            assert_eq!(&v.leading + &v.tail + &v.correlation_sum + &v.boundary_sum, v.total);
        }
    }

    #[test]
    fn agrees_with_measure_path() {
        for a in 1..1024u64 {
            let exact = variance_closed_form(&bs(a)).unwrap().total;
            assert_eq!(exact, build_measure_u64(a).moment_q(2), "a={a}");
            assert_eq!(exact, variance_sigma_form(&bs(a)).unwrap(), "a={a}");
        }
    }

    #[test]
    fn doubling_invariance() {
        for a in 1..2048u64 {
            assert_eq!(variance_closed_form(&bs(a)).unwrap().total, variance_closed_form(&bs(2 * a)).unwrap().total);
        }
    }

    #[test]
    fn float_path_tracks_exact() {
        for a in [1u64, 2, 3, 5, 1000, 123456789, u64::MAX - 12345] {
            let exact = crate::exact::rational_to_f64(&variance_closed_form(&bs(a)).unwrap().total);
            let float = variance_closed_form_f64(&bs(a)).unwrap();
            assert!((exact - float).abs() <= 1e-9 * exact, "a={a}: {exact} vs {float}");
        }
    }

    #[test]
    fn bounds_examples() {
        let b1 = variance_bounds_check_with(&bs(1), LReading::Literal).unwrap();
        assert_eq!((b1.lower, b1.value.clone(), b1.upper, b1.ok), (-1, q(2, 1), 2, true));
        let b5 = variance_bounds_check_with(&bs(5), LReading::Literal).unwrap();
        assert_eq!((b5.lower, b5.upper, b5.ok), (0, 6, true));
        assert_eq!(b5.value, build_measure_u64(5).moment_q(2));
        // a = 3 has no `01` in its literal word but Var = 3 > 2.
        assert!(!variance_bounds_check_with(&bs(3), LReading::Literal).unwrap().ok);
        assert!(variance_bounds_check(&bs(3)).unwrap().ok);
    }
}


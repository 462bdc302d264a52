//! Characteristic function of `mu_a` as a chain of 2x2 matrices.
//!
//! ```text
//! mu_a^(theta) = (1 0) A_{a_0}(theta) ... A_{a_n}(theta) (1, e^{i theta} / (2 - e^{-i theta}))^T
//! A_0 = [[1, 0], [e^{i theta}/2, e^{-i theta}/2]]
//! A_1 = [[e^{i theta}/2, e^{-i theta}/2], [0, 1]]
//! ```
//!
//! The chain is always evaluated as a vector pushed through the matrices from
//! the most significant bit down, never as a full matrix product. The jet
//! path runs the same chain over truncated power series in `theta` with exact
//! complex-rational coefficients, and reads the moments off the Taylor
//! coefficients: `coeff_k = i^k m_k / k!`.

use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::bitcore::BitString;
use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};
use crate::measure::{Coefficient, Rep};

/// Default jet order.
pub const DEFAULT_ORDER: usize = 12;

/// `re + i im` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ComplexRational { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        ComplexRational { re: Rational::zero(), im: Rational::one() }
    }

    /// `i^k`.
    pub fn i_pow(k: usize) -> Self {
        let one = Rational::one();
        match k % 4 {
            0 => Self::real(one),
            1 => Self::new(Rational::zero(), one),
            2 => Self::real(-one),
            _ => Self::new(Rational::zero(), -one),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        ComplexRational { re: &self.re * s, im: &self.im * s }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(ComplexRational { re: &self.re / &norm, im: -&self.im / &norm })
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(crate::exact::rational_to_f64(&self.re), crate::exact::rational_to_f64(&self.im))
    }
}

impl Zero for ComplexRational {
    fn zero() -> Self {
        Self::real(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        ComplexRational::is_zero(self)
    }
}

impl Add for ComplexRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ComplexRational { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> Add<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Mul<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return ComplexRational::real(&self.re * &rhs.re);
        }
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational { re: -&self.re, im: -&self.im }
    }
}

/// Power series in `theta` truncated after `theta^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    coeffs: Vec<ComplexRational>,
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet { coeffs: vec![ComplexRational::zero(); order + 1] }
    }

    pub fn constant(order: usize, c: ComplexRational) -> Self {
        let mut j = Jet::zero(order);
        j.coeffs[0] = c;
        j
    }

    pub fn one(order: usize) -> Self {
        Jet::constant(order, ComplexRational::real(Rational::one()))
    }

    pub fn from_coeffs(coeffs: Vec<ComplexRational>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least the constant term");
        Jet { coeffs }
    }

    /// `e^{sign * i * theta}` with `sign = +-1`.
    pub fn exp_i(order: usize, sign: i64) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                let s = if sign < 0 && k % 2 == 1 { -Rational::one() } else { Rational::one() };
                ComplexRational::i_pow(k).scale(&(s / Rational::from_integer(factorial(k as u32))))
            })
            .collect();
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ComplexRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &ComplexRational {
        &self.coeffs[k]
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        debug_assert_eq!(self.order(), other.order());
        Jet { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        Jet { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + &(-b)).collect() }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order();
        debug_assert_eq!(order, other.order());
        let mut out = Jet::zero(order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
            }
        }
        out
    }

    /// Truncated quotient; the divisor needs a non-zero constant term.
    pub fn div(&self, other: &Jet) -> Result<Jet> {
        let inv0 = other.coeffs[0]
            .inv()
            .ok_or_else(|| Error::Domain("jet division by a series with zero constant term".into()))?;
        let order = self.order();
        let mut out: Vec<ComplexRational> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc = &acc + &(-&(&other.coeffs[j] * &out[k - j]));
            }
            out.push(&acc * &inv0);
        }
        Ok(Jet { coeffs: out })
    }
}

/// 2x2 matrix of jets, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetMatrix {
    pub entries: [[Jet; 2]; 2],
}

impl JetMatrix {
    pub fn apply(&self, v: &[Jet; 2]) -> [Jet; 2] {
        let row = |r: &[Jet; 2]| r[0].mul(&v[0]).add(&r[1].mul(&v[1]));
        [row(&self.entries[0]), row(&self.entries[1])]
    }

    /// Coefficient matrix of `theta^k`.
    pub fn coeff_matrix(&self, k: usize) -> [[ComplexRational; 2]; 2] {
        let e = &self.entries;
        [
            [e[0][0].coeff(k).clone(), e[0][1].coeff(k).clone()],
            [e[1][0].coeff(k).clone(), e[1][1].coeff(k).clone()],
        ]
    }
}

/// Jet of `A_bit(theta)` to the given order.
pub fn jet_matrix(bit: u8, order: usize) -> JetMatrix {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let plus = Jet::exp_i(order, 1).scale(&half);
    let minus = Jet::exp_i(order, -1).scale(&half);
    let (one, zero) = (Jet::one(order), Jet::zero(order));
    let entries = if bit == 0 { [[one, zero], [plus, minus]] } else { [[plus, minus], [zero, one]] };
    JetMatrix { entries }
}

/// Jets of the boundary vector `(1, e^{i theta} / (2 - e^{-i theta}))`.
pub fn boundary_jet(order: usize) -> (Jet, Jet) {
    let two = Jet::constant(order, ComplexRational::real(Rational::from_integer(2.into())));
    let den = two.sub(&Jet::exp_i(order, -1));
    let second = Jet::exp_i(order, 1).div(&den).expect("2 - 1 != 0");
    (Jet::one(order), second)
}

/// Taylor jet of `mu_a^` at 0.
pub fn charfn_jet(a: &BitString, order: usize) -> Jet {
    let mats = [jet_matrix(0, order), jet_matrix(1, order)];
    let (first, second) = boundary_jet(order);
    let mut v = [first, second];
    for bit in a.msb_first() {
        v = mats[bit as usize].apply(&v);
    }
    let [top, _] = v;
    top
}

/// Exact moments `m_0..=m_order` of `mu_a` read off the characteristic-function jet.
pub fn moments_via_jets(a: &BitString, order: usize) -> Result<Vec<Rational>> {
    let jet = charfn_jet(a, order);
    jet.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            // m_k = k! c_k / i^k
            let (real, residue) = match k % 4 {
                0 => (c.re.clone(), &c.im),
                1 => (c.im.clone(), &c.re),
                2 => (-c.re.clone(), &c.im),
                _ => (-c.im.clone(), &c.re),
            };
            if !residue.is_zero() {
                return Err(Error::Consistency(format!("moment {k} of a={a} has a non-zero imaginary residue")));
            }
            Ok(real * Rational::from_integer(factorial(k as u32)))
        })
        .collect()
}

fn a_matrix(bit: u8, theta: f64) -> [[Complex64; 2]; 2] {
    let plus = Complex64::from_polar(0.5, theta);
    let minus = Complex64::from_polar(0.5, -theta);
    let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    if bit == 0 {
        [[one, zero], [plus, minus]]
    } else {
        [[plus, minus], [zero, one]]
    }
}

/// `mu_1^(theta) = e^{i theta} / (2 - e^{-i theta})`.
pub fn mu1_charfn(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta) / (2.0 - Complex64::from_polar(1.0, -theta))
}

/// `mu_a^(theta)` through the matrix chain.
pub fn eval_charfn(a: &BitString, theta: f64) -> Complex64 {
    let mats = [a_matrix(0, theta), a_matrix(1, theta)];
    let mut v = [Complex64::new(1.0, 0.0), mu1_charfn(theta)];
    for bit in a.msb_first() {
        let m = &mats[bit as usize];
        v = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    }
    v[0]
}

/// `sum_d e^{i d theta} mu(d)`: finite window plus the geometric tail
/// `c (2e^{i theta})^L / (1 - (2e^{i theta})^-1)` for `d <= L`.
pub fn eval_charfn_from_measure<C: Coefficient>(rep: &Rep<C>, theta: f64) -> Complex64 {
    let p = rep.profile();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, v) in p.values.iter().enumerate() {
        let d = p.tail_end + 1 + i as i64;
        acc += Complex64::from_polar(v.to_f64(), d as f64 * theta);
    }
    // c 2^L e^{i L theta}, with c 2^L formed before rounding.
    let scaled = p.tail_coeff.scale_pow2(p.tail_end).to_f64();
    if scaled != 0.0 {
        let z = Complex64::from_polar(2.0, theta);
        acc += Complex64::from_polar(scaled, p.tail_end as f64 * theta) / (1.0 - z.inv());
    }
    acc
}

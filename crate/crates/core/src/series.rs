//! Truncated formal power series with exact rational coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("reciprocal needs a nonzero constant term")]
    NotInvertible,
    #[error("inner series of a composition must have zero constant term")]
    NonZeroConstant,
}

/// `sum c_k x^k` known exactly for `k < order`; higher terms are unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![BigRational::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    pub fn from_integers(values: &[i64], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (c, &v) in s.coeffs.iter_mut().zip(values) {
            *c = BigRational::from_integer(BigInt::from(v));
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&BigRational> {
        self.coeffs.get(k)
    }

    /// Drops terms at and beyond `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order);
        self
    }

    /// Multiplies by `x`, keeping the order.
    pub fn shift(&self) -> Self {
        let mut s = Self::zero(self.order());
        for k in 1..self.order() {
            s.coeffs[k] = self.coeffs[k - 1].clone();
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..order)
            .map(|k| &self.coeffs[k] + &other.coeffs[k])
            .collect();
        PowerSeries { coeffs }
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let order = self.order();
        let Some(c0) = self.coeffs.first().filter(|c| !c.is_zero()) else {
            return Err(SeriesError::NotInvertible);
        };
        let inv0 = c0.recip();
        let mut out = Self::zero(order);
        out.coeffs[0] = inv0.clone();
        for k in 1..order {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out.coeffs[k - j];
            }
            out.coeffs[k] = -acc * &inv0;
        }
        Ok(out)
    }

    /// `self(inner(x))`, by Horner's rule.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if inner.coeffs.first().is_some_and(|c| !c.is_zero()) {
            return Err(SeriesError::NonZeroConstant);
        }
        let order = self.order().min(inner.order());
        let inner = inner.clone().truncate(order);
        let mut out = Self::zero(order);
        for c in self.coeffs.iter().take(order).rev() {
            out = out.mul(&inner);
            if order > 0 {
                out.coeffs[0] += c;
            }
        }
        Ok(out)
    }

    /// Coefficients as integers, if they all are.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Coefficients as nonnegative integers, if they all are.
    pub fn count_coeffs(&self) -> Option<Vec<BigUint>> {
        self.integer_coeffs()?
            .into_iter()
            .map(|c| {
                if c.is_negative() {
                    None
                } else {
                    c.to_biguint()
                }
            })
            .collect()
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: Self) -> PowerSeries {
        PowerSeries::add(self, rhs)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: Self) -> PowerSeries {
        PowerSeries::add(self, &rhs.neg())
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: Self) -> PowerSeries {
        PowerSeries::mul(self, rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries::neg(self)
    }
}

/// Catalan generating function, found by iterating `C = 1 + x C^2`. Each
/// round fixes at least one more coefficient.
pub fn catalan_series(order: usize) -> PowerSeries {
    let one = PowerSeries::one(order);
    let mut c = one.clone();
    for _ in 0..order {
        c = &one + &(&c * &c).shift();
    }
    c
}

/// First `terms` coefficients of `1 / (1 - x C(x) C(x C(x)))`.
pub fn gf_231_alpha_t2(terms: usize) -> PowerSeries {
    let c = catalan_series(terms);
    let xc = c.shift();
    let c_of_xc = c.compose(&xc).expect("x C(x) has zero constant term");
    let denom = &PowerSeries::one(terms) - &(&xc * &c_of_xc);
    denom.reciprocal().expect("constant term is one")
}

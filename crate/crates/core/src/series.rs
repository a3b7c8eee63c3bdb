//! Truncated power series over any field-like scalar (exact rationals,
//! Gaussian rationals or `Complex64`).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// The arithmetic a truncated series needs from its coefficients.
pub trait Field:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// `Σ_{k ≤ order} c_k u^k`, truncated at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Field> PowerSeries<T> {
    /// Zero-pads or truncates `coeffs` to `order + 1` entries.
    pub fn new(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        PowerSeries { coeffs }
    }

    pub fn constant(c: T, order: usize) -> Self {
        PowerSeries::new(vec![c], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        PowerSeries { coeffs: (0..=n).map(|k| self.coeffs[k].clone() + o.coeffs[k].clone()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        PowerSeries { coeffs: (0..=n).map(|k| self.coeffs[k].clone() - o.coeffs[k].clone()).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        PowerSeries { coeffs: out }
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return Err(Error::Domain("series with zero constant term is not invertible".into()));
        }
        let n = self.order();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(T::one() / c0.clone());
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc / c0.clone()));
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// `self^k` for `k ≥ 0`, truncated.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = PowerSeries::constant(T::one(), self.order());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Horner evaluation.
    pub fn eval(&self, u: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * u.clone() + c.clone())
    }
}

//! Exact moment sequences of a few reference laws.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::partition::catalan;
use crate::exact::{int, Rational};

/// Standard semicircle: `m_{2k} = C_k`, odd moments zero. Returns `m_0..m_d`.
pub fn semicircle_moments(d: usize) -> Vec<Rational> {
    (0..=d)
        .map(|k| if k % 2 == 1 { Rational::zero() } else { int(catalan(k / 2) as i64) })
        .collect()
}

/// `(δ₋₁ + δ₁)/2`.
pub fn symmetric_bernoulli_moments(d: usize) -> Vec<Rational> {
    (0..=d).map(|k| if k % 2 == 1 { Rational::zero() } else { Rational::one() }).collect()
}

/// `Σ w_i δ_{x_i}`.
pub fn atomic_moments(atoms: &[(Rational, Rational)], d: usize) -> Vec<Rational> {
    (0..=d)
        .map(|k| {
            atoms
                .iter()
                .fold(Rational::zero(), |acc, (x, w)| acc + w * num_traits::pow(x.clone(), k))
        })
        .collect()
}

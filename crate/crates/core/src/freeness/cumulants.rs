use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

/// Coefficient table `c[s][j]` of `z^j` in `M(z)^s`, where `M(z) = Σ m_i z^i`
/// (with `m_0 = 1`). Used by both directions of the moment-cumulant relation.
fn moment_powers<T>(moments: &[T], n: usize) -> Vec<Vec<T>>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    let mut table = vec![vec![T::zero(); n + 1]; n + 1];
    table[0][0] = T::one();
    for s in 1..=n {
        for j in 0..=n {
            let mut acc = T::zero();
            for i in 0..=j {
                if let Some(m) = moments.get(i) {
                    acc = acc + m.clone() * table[s - 1][j - i].clone();
                }
            }
            table[s][j] = acc;
        }
    }
    table
}

/// Free cumulants `κ_1..κ_n` from moments `m_0 = 1, m_1..m_n`.
///
/// Uses `m_n = Σ_{s=1}^{n} κ_s [z^{n−s}] M(z)^s`, the block-of-the-first-point
/// decomposition of the non-crossing moment formula.
pub fn moments_to_cumulants<T>(moments: &[T]) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let n = moments.len().saturating_sub(1);
    let powers = moment_powers(moments, n);
    let mut kappa: Vec<T> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = moments[k].clone();
        for s in 1..k {
            acc = acc - kappa[s - 1].clone() * powers[s][k - s].clone();
        }
        kappa.push(acc);
    }
    kappa
}

/// Moments `m_0 = 1, m_1..m_n` from free cumulants `κ_1..κ_n`.
pub fn cumulants_to_moments<T>(kappa: &[T]) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let n = kappa.len();
    let mut moments = vec![T::one()];
    for k in 1..=n {
        // `[z^{k−s}] M(z)^s` only involves moments of order < k.
        let powers = moment_powers(&moments, k);
        let mut acc = T::zero();
        for s in 1..=k {
            acc = acc + kappa[s - 1].clone() * powers[s][k - s].clone();
        }
        moments.push(acc);
    }
    moments
}

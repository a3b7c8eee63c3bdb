//! Stieltjes inversion: `−(1/π) Im G(x + iε)` extrapolated to `ε → 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_EPS0: f64 = 0.05;
pub const DEFAULT_LEVELS: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub x: f64,
    /// Extrapolated density of the continuous part at `x`.
    pub density: f64,
    /// Mass of a point mass detected at `x`, if any.
    pub atom_mass: Option<f64>,
    /// `(ε, −Im G(x + iε)/π)` along the ladder.
    pub ladder: Vec<(f64, f64)>,
}

/// Polynomial extrapolation of `(h_k, v_k)` to `h = 0` (Neville's scheme).
pub fn extrapolate_to_zero(h: &[f64], v: &[f64]) -> f64 {
    let mut p = v.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

/// Density at `x` with the default ladder `ε_k = 0.05·2^{−k}`, `k < 7`.
pub fn stieltjes_density(g: impl FnMut(Complex64) -> Result<Complex64>, x: f64) -> Result<DensityEstimate> {
    stieltjes_density_with(g, x, DEFAULT_EPS0, DEFAULT_LEVELS)
}

pub fn stieltjes_density_with(
    mut g: impl FnMut(Complex64) -> Result<Complex64>,
    x: f64,
    eps0: f64,
    levels: usize,
) -> Result<DensityEstimate> {
    if !(eps0 > 0.0) || levels < 2 {
        return Err(Error::Domain("ladder needs ε₀ > 0 and at least two levels".into()));
    }
    let mut eps = Vec::with_capacity(levels);
    let mut vals = Vec::with_capacity(levels);
    let mut e = eps0;
    for _ in 0..levels {
        let v = -g(Complex64::new(x, e))?.im / PI;
        eps.push(e);
        vals.push(v);
        e *= 0.5;
    }
    let ladder: Vec<(f64, f64)> = eps.iter().copied().zip(vals.iter().copied()).collect();
    // A point mass w contributes w/(πε); πε·v then tends to w instead of 0.
    let scaled: Vec<f64> = eps.iter().zip(&vals).map(|(e, v)| PI * e * v).collect();
    let (last, prev) = (scaled[levels - 1], scaled[levels - 2]);
    if last > 1e-6 && (last - prev).abs() <= 0.1 * last {
        let mass = extrapolate_to_zero(&eps, &scaled);
        let regular: Vec<f64> = eps.iter().zip(&vals).map(|(e, v)| v - mass / (PI * e)).collect();
        return Ok(DensityEstimate { x, density: extrapolate_to_zero(&eps, &regular).max(0.0), atom_mass: Some(mass), ladder });
    }
    let d = extrapolate_to_zero(&eps, &vals);
    if !d.is_finite() {
        return Err(Error::NonConvergence { iterations: levels, residual: d });
    }
    Ok(DensityEstimate { x, density: d.max(0.0), atom_mass: None, ladder })
}

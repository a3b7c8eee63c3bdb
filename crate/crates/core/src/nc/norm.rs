use alloc::vec::Vec;

use super::{Derivation, Gen, GenKind, NCPoly, TensorPoly};
use crate::error::{Error, Result};

/// Upper bound for `|P|_R` read off the stored expansion:
/// `Σ_w |c_w| R^{n_X(w)}`, where `n_X(w)` counts the marked variable.
///
/// A word with `n` occurrences of `X` has `n + 1` coefficient slots, so the
/// representation weight is `R^{(n+1)−1}`. Projection letters are coefficients
/// of norm one. Any other variable, or a formal scalar, is rejected.
pub fn norm_r_upper(poly: &NCPoly, marked: Gen, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain("R must be positive".into()));
    }
    let mut total = 0.0;
    for (w, c) in poly.terms() {
        if !w.scalars().is_one() {
            return Err(Error::Structural("norm bound needs numeric coefficients".into()));
        }
        let mut n = 0i32;
        for &g in w.letters() {
            if g == marked {
                n += 1;
            } else if g.kind() != GenKind::Projection {
                return Err(Error::Structural("norm bound: unexpected variable in word".into()));
            }
        }
        total += c.abs_f64() * libm::pow(r, n as f64);
    }
    Ok(total)
}

/// Upper bound for the projective tensor norm of `t` from its stored
/// representation: `Σ |c| Π_legs leg_norm(leg)`.
pub fn projective_norm_upper(t: &TensorPoly, mut leg_norm: impl FnMut(&[Gen]) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for (k, c) in t.terms() {
        if !k.scalars.is_one() {
            return Err(Error::Structural("projective norm bound needs numeric coefficients".into()));
        }
        total += c.abs_f64() * k.legs.iter().map(|l| leg_norm(l)).product::<f64>();
    }
    Ok(total)
}

/// Both sides of `|f|_R ≤ Σ_p ‖∂^{(p)}P‖_{(p+1)} (‖X‖ + R)^p`.
#[derive(Clone, Debug)]
pub struct LemmaChain {
    pub lhs: f64,
    /// One summand per order `p = 0..=deg P`.
    pub terms: Vec<f64>,
    pub rhs: f64,
}

impl LemmaChain {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// Evaluates the chain with leg norms bounded by `‖X‖^{n_X}` (projections have norm one).
pub fn lemma_chain(poly: &NCPoly, der: &Derivation, r: f64, x_norm: f64) -> Result<LemmaChain> {
    let marked = der.marked();
    let lhs = norm_r_upper(poly, marked, r)?;
    let mut terms = Vec::new();
    for p in 0..=poly.degree() {
        let t = der.iterate(poly, p)?;
        let leg = projective_norm_upper(&t, |l| libm::pow(x_norm, l.iter().filter(|&&g| g == marked).count() as f64))?;
        terms.push(leg * libm::pow(x_norm + r, p as f64));
    }
    let rhs = terms.iter().sum();
    Ok(LemmaChain { lhs, terms, rhs })
}

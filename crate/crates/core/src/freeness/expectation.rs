use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::model::FreenessModel;
use crate::error::{Error, Result};
use crate::exact::{solve_exact, GaussRat, Rational};
use crate::nc::{Gen, NCPoly};

/// The von Neumann subalgebra generated by one element `Z`, possibly inside a
/// corner `pMp` (then the unit is `p` and the state is `α⁻¹τ`).
#[derive(Clone, Debug)]
pub struct Subalgebra {
    element: NCPoly,
    unit: NCPoly,
    trace_scale: Rational,
    family: Vec<Gen>,
}

impl Subalgebra {
    /// `C⟨Z⟩` inside `M`. `family` lists the generators whose occurrences bound
    /// the degree of a conditional expectation onto it.
    pub fn new(element: NCPoly, family: Vec<Gen>) -> Self {
        Subalgebra { element, unit: NCPoly::one(), trace_scale: Rational::one(), family }
    }

    /// `Cp⟨Z⟩` inside `(pMp, τ_p)` with `τ_p = α⁻¹τ|_{pMp}`.
    pub fn corner(element: NCPoly, projection: Gen, alpha: &Rational, family: Vec<Gen>) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::Domain("corner of a zero-trace projection".into()));
        }
        Ok(Subalgebra { element, unit: NCPoly::gen(projection), trace_scale: alpha.recip(), family })
    }

    pub fn element(&self) -> &NCPoly {
        &self.element
    }

    pub fn unit(&self) -> &NCPoly {
        &self.unit
    }

    /// The ambient state restricted to the subalgebra's corner.
    pub fn state(&self, model: &FreenessModel, x: &NCPoly) -> Result<GaussRat> {
        Ok(&model.trace(x)? * &self.trace_scale)
    }

    /// `Z^k`, with `Z^0` the unit.
    pub fn power(&self, k: usize) -> NCPoly {
        let mut out = self.unit.clone();
        for _ in 0..k {
            out = &out * &self.element;
        }
        out
    }

    fn degree_bound(&self, x: &NCPoly) -> usize {
        x.terms()
            .map(|(w, _)| w.letters().iter().filter(|g| self.family.contains(g)).count())
            .max()
            .unwrap_or(0)
    }
}

/// A polynomial `Σ q_k Z^k` in the generator of a [`Subalgebra`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPoly {
    pub coeffs: Vec<GaussRat>,
}

impl ZPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Expands `Σ q_k Z^k` back into the ambient algebra.
    pub fn expand(&self, sub: &Subalgebra) -> NCPoly {
        let mut out = NCPoly::zero();
        let mut pow = sub.unit.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                pow = &pow * &sub.element;
            }
            out = &out + &pow.scale(c);
        }
        out
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        self
    }
}

/// The state-preserving conditional expectation of `x` onto `sub`.
///
/// For polynomial `x` in free generators, `E(x)` is a polynomial in `Z` whose
/// degree is at most the number of `Z`-family letters in `x`; it is the unique
/// such `q` with `φ(Z^j x) = φ(Z^j q(Z))` for `j ≤ deg`, found by an exact Hankel
/// solve. A singular Hankel matrix is reported, never least-squared.
pub fn conditional_expectation(model: &FreenessModel, x: &NCPoly, sub: &Subalgebra) -> Result<ZPoly> {
    let d = sub.degree_bound(x);
    let powers: Vec<NCPoly> = (0..=2 * d).map(|k| sub.power(k)).collect();
    let mut hankel_row = Vec::with_capacity(2 * d + 1);
    for p in &powers {
        hankel_row.push(sub.state(model, p)?);
    }
    let h: Vec<Vec<GaussRat>> = (0..=d).map(|j| (0..=d).map(|k| hankel_row[j + k].clone()).collect()).collect();
    let mut b = Vec::with_capacity(d + 1);
    for p in powers.iter().take(d + 1) {
        b.push(sub.state(model, &(p * x))?);
    }
    let q = solve_exact(h, b).ok_or(Error::Degenerate { size: d + 1 })?;
    Ok(ZPoly { coeffs: q }.trimmed())
}

/// Convenience: `E(x)` already expanded in the ambient algebra.
pub fn expect_onto(model: &FreenessModel, x: &NCPoly, sub: &Subalgebra) -> Result<NCPoly> {
    Ok(conditional_expectation(model, x, sub)?.expand(sub))
}

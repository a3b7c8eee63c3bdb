use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{Derivation, Gen, GenKind, NCPoly, TensorPoly, Word};
use crate::error::{Error, Result};
use crate::exact::{GaussRat, Rational};

/// Compression by a projection `p` of trace `α`.
///
/// The compressed algebra `Cp⟨X_p⟩` is modelled as polynomials in the symbol
/// `X_p` whose unit is `p`; the projection letter itself may appear and is
/// absorbed into the unit. `ψ` sends `X_p ↦ α⁻¹pXp` and multiplies by `α⁻¹`.
#[derive(Clone, Debug)]
pub struct CompressionParams {
    alpha: Rational,
    compressed: Gen,
    variable: Gen,
    projection: Gen,
}

impl CompressionParams {
    pub fn new(alpha: Rational, compressed: Gen, variable: Gen, projection: Gen) -> Result<Self> {
        if alpha <= Rational::zero() || alpha > Rational::one() {
            return Err(Error::Domain(alloc::format!("α = {alpha} is outside (0, 1]")));
        }
        if compressed.kind() != GenKind::Variable || variable.kind() != GenKind::Variable {
            return Err(Error::Structural("X and X_p must be variables".into()));
        }
        if projection.kind() != GenKind::Projection {
            return Err(Error::Structural("p must be a projection".into()));
        }
        if compressed == variable {
            return Err(Error::Structural("X_p and X must be distinct generators".into()));
        }
        Ok(CompressionParams { alpha, compressed, variable, projection })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn alpha_inv(&self) -> Rational {
        self.alpha.recip()
    }

    pub fn compressed(&self) -> Gen {
        self.compressed
    }

    pub fn variable(&self) -> Gen {
        self.variable
    }

    pub fn projection(&self) -> Gen {
        self.projection
    }

    /// Rewrites a compressed element so its words contain only `X_p`
    /// (projection letters are the unit and disappear).
    pub fn normalize(&self, poly: &NCPoly) -> Result<NCPoly> {
        let mut out = NCPoly::zero();
        for (w, c) in poly.terms() {
            let mut letters = Vec::with_capacity(w.degree());
            for &g in w.letters() {
                if g == self.compressed {
                    letters.push(g);
                } else if g != self.projection {
                    return Err(Error::Structural("element is not in the compressed algebra Cp⟨X_p⟩".into()));
                }
            }
            out.add_term(Word::with_scalars(w.scalars().clone(), &letters), c.clone());
        }
        Ok(out)
    }

    /// `ψ` on a normalized word `X_p^k`: `α^{−k−1}·p(Xp)^k`.
    fn psi_word(&self, w: &Word) -> NCPoly {
        let k = w.degree();
        let mut letters = Vec::with_capacity(2 * k + 1);
        letters.push(self.projection);
        for _ in 0..k {
            letters.push(self.variable);
            letters.push(self.projection);
        }
        let mut coeff = Rational::one();
        let inv = self.alpha_inv();
        for _ in 0..=k {
            coeff *= &inv;
        }
        NCPoly::term(Word::with_scalars(w.scalars().clone(), &letters), GaussRat::real(coeff))
    }

    /// `ψ(poly)` as an element of `C⟨p, X⟩`.
    pub fn psi_expand(&self, poly: &NCPoly) -> Result<NCPoly> {
        let normalized = self.normalize(poly)?;
        let mut out = NCPoly::zero();
        for (w, c) in normalized.terms() {
            out = &out + &self.psi_word(w).scale(c);
        }
        Ok(out)
    }

    /// `∂_{X_p : Bp}` on the compressed algebra, `∂X_p = p ⊗ p`.
    pub fn compressed_derivation(&self) -> Derivation {
        Derivation::new(self.compressed, [self.projection]).expect("validated generator kinds")
    }

    /// `∂_{X : B[p]}` on the ambient algebra.
    pub fn ambient_derivation(&self) -> Derivation {
        Derivation::new(self.variable, [self.projection]).expect("validated generator kinds")
    }

    /// `(ψ ⊗ ψ)∂_{X_p}(poly) − ∂_X ψ(poly)`, exactly zero for a coalgebra morphism.
    pub fn check_coalgebra_morphism(&self, poly: &NCPoly) -> Result<TensorPoly> {
        self.check_coalgebra_morphism_with(poly, &self.ambient_derivation())
    }

    /// As [`Self::check_coalgebra_morphism`] with a caller-supplied ambient derivation.
    pub fn check_coalgebra_morphism_with(&self, poly: &NCPoly, ambient: &Derivation) -> Result<TensorPoly> {
        let normalized = self.normalize(poly)?;
        let lhs = self
            .compressed_derivation()
            .apply(&normalized)?
            .map_legs(|w| Ok(self.psi_word(w)))?;
        let rhs = ambient.apply(&self.psi_expand(&normalized)?)?;
        Ok(&lhs - &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::nc::Alphabet;

    fn setup(alpha: Rational) -> (Gen, Gen, Gen, CompressionParams) {
        let mut a = Alphabet::new();
        let x = a.variable("X").unwrap();
        let p = a.projection("p").unwrap();
        let xp = a.variable("X_p").unwrap();
        (x, p, xp, CompressionParams::new(alpha, xp, x, p).unwrap())
    }

    #[test]
    fn psi_on_unit_and_generator() {
        let (x, p, xp, c) = setup(rat(1, 2));
        assert_eq!(c.psi_expand(&NCPoly::gen(p)).unwrap(), NCPoly::gen(p).scale(&GaussRat::from_int(2)));
        assert_eq!(c.psi_expand(&NCPoly::one()).unwrap(), NCPoly::gen(p).scale(&GaussRat::from_int(2)));
        assert_eq!(c.psi_expand(&NCPoly::gen(xp)).unwrap(), NCPoly::word([p, x, p]).scale(&GaussRat::from_int(4)));
        assert_eq!(
            c.psi_expand(&NCPoly::word([xp, xp])).unwrap(),
            NCPoly::word([p, x, p, x, p]).scale(&GaussRat::from_int(8))
        );
    }

    #[test]
    fn morphism_on_generator_has_matching_sides() {
        let (_, p, xp, c) = setup(rat(1, 3));
        let lhs = c.compressed_derivation().apply(&NCPoly::gen(xp)).unwrap().map_legs(|w| Ok(c.psi_word(w))).unwrap();
        assert_eq!(lhs.coeff(&[&[p], &[p]]), GaussRat::from_int(9));
        assert!(c.check_coalgebra_morphism(&NCPoly::gen(xp)).unwrap().is_zero());
        assert!(c.check_coalgebra_morphism(&NCPoly::gen(p)).unwrap().is_zero());
        assert!(c.check_coalgebra_morphism(&NCPoly::word([xp, xp, xp])).unwrap().is_zero());
    }

    #[test]
    fn corrupted_ambient_rule_is_detected() {
        let (_, _, xp, c) = setup(rat(1, 2));
        let bad = c.ambient_derivation().with_scale(GaussRat::from_int(2));
        assert!(!c.check_coalgebra_morphism_with(&NCPoly::gen(xp), &bad).unwrap().is_zero());
    }

    #[test]
    fn rejects_foreign_letters_and_bad_alpha() {
        let (x, p, xp, c) = setup(rat(1, 2));
        assert!(matches!(c.psi_expand(&NCPoly::gen(x)), Err(Error::Structural(_))));
        assert!(matches!(CompressionParams::new(rat(3, 2), xp, x, p), Err(Error::Domain(_))));
        assert!(matches!(CompressionParams::new(rat(0, 1), xp, x, p), Err(Error::Domain(_))));
    }
}

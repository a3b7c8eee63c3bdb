use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::expectation::{conditional_expectation, expect_onto, Subalgebra, ZPoly};
use super::model::FreenessModel;
use crate::error::{Error, Result};
use crate::exact::{GaussRat, Rational};
use crate::nc::{CompressionParams, Derivation, Gen, NCPoly, TensorPoly, Word};

/// The compressed element realised in the ambient algebra:
/// `X_p ↦ α⁻¹pXp`, unit `↦ p`.
fn embed(params: &CompressionParams, poly: &NCPoly) -> Result<NCPoly> {
    Ok(params.psi_expand(poly)?.scale(&GaussRat::real(params.alpha().clone())))
}

fn ambient_x(params: &CompressionParams) -> Subalgebra {
    Subalgebra::new(NCPoly::gen(params.variable()), vec![params.variable()])
}

fn tau_p(model: &FreenessModel, params: &CompressionParams, poly: &NCPoly) -> Result<GaussRat> {
    Ok(&model.trace(&embed(params, poly)?)? * &params.alpha_inv())
}

/// `τ_p(X_p^j)` for `j = 0..=k`, computed from words in `X` and `p`.
pub fn compressed_moments(model: &FreenessModel, params: &CompressionParams, k: usize) -> Result<Vec<Rational>> {
    let (x, p) = (params.variable(), params.projection());
    let inv = params.alpha_inv();
    let mut out = Vec::with_capacity(k + 1);
    let mut letters = vec![p];
    let mut scale = inv.clone();
    for _ in 0..=k {
        out.push(&model.mixed_moment(&letters)? * &scale);
        letters.push(x);
        letters.push(p);
        scale *= &inv;
    }
    Ok(out)
}

/// `Ψ = E_{C⟨X⟩} ∘ ψ` applied to a compressed element.
pub fn psi(model: &FreenessModel, params: &CompressionParams, poly: &NCPoly) -> Result<NCPoly> {
    expect_onto(model, &params.psi_expand(poly)?, &ambient_x(params))
}

/// Exact residuals of the probabilistic properties of `Ψ`.
#[derive(Clone, Debug)]
pub struct PsiReport {
    /// `Ψ(p) − 1`.
    pub unital: NCPoly,
    /// Per word: `τ(Ψ(w)) − τ_p(w)`.
    pub trace: Vec<GaussRat>,
    /// Per word: `E_C(Ψ(w)) − Ψ(E_{Cp}(w))`.
    pub expectation: Vec<GaussRat>,
}

impl PsiReport {
    pub fn is_exact(&self) -> bool {
        self.unital.is_zero() && self.trace.iter().all(Zero::is_zero) && self.expectation.iter().all(Zero::is_zero)
    }
}

/// Checks that `Ψ` is unital, trace preserving, and intertwines the
/// expectations onto the scalars. With scalar `B` the last identity is the
/// trace identity again; it is still evaluated separately.
pub fn check_psi_probabilistic(
    model: &FreenessModel,
    params: &CompressionParams,
    words: &[NCPoly],
) -> Result<PsiReport> {
    let psi_unit = psi(model, params, &NCPoly::gen(params.projection()))?;
    let unital = &psi_unit - &NCPoly::one();
    let mut trace = Vec::with_capacity(words.len());
    let mut expectation = Vec::with_capacity(words.len());
    for w in words {
        let image = psi(model, params, w)?;
        let tau_image = model.trace(&image)?;
        let tp = tau_p(model, params, w)?;
        trace.push(&tau_image - &tp);
        let rhs = psi_unit.scale(&tp);
        let rhs = rhs.as_constant().ok_or_else(|| Error::InvariantViolation("Ψ(p) is not a scalar".into()))?;
        expectation.push(&tau_image - &rhs);
    }
    Ok(PsiReport { unital, trace, expectation })
}

/// `(Ψ ⊗ Ψ)∂_{X_p}(poly) − ∂_X Ψ(poly)`.
pub fn check_expmorph(model: &FreenessModel, params: &CompressionParams, poly: &NCPoly) -> Result<TensorPoly> {
    let ambient = Derivation::new(params.variable(), [])?;
    check_expmorph_with(model, params, poly, &ambient)
}

pub fn check_expmorph_with(
    model: &FreenessModel,
    params: &CompressionParams,
    poly: &NCPoly,
    ambient: &Derivation,
) -> Result<TensorPoly> {
    let normalized = params.normalize(poly)?;
    let lhs = params
        .compressed_derivation()
        .apply(&normalized)?
        .map_legs(|w| psi(model, params, &NCPoly::term(w.clone(), GaussRat::one())))?;
    let rhs = ambient.apply(&psi(model, params, &normalized)?)?;
    Ok(&lhs - &rhs)
}

/// Both sides of `τ_p(J_p · w) = (τ_p ⊗ τ_p)(∂_{X_p} w)` for each word.
#[derive(Clone, Debug)]
pub struct PairingReport {
    /// `J_p = E_{Cp⟨X_p⟩}(pJp)` as a polynomial in `X_p`.
    pub conjugate: ZPoly,
    pub pairs: Vec<(GaussRat, GaussRat)>,
}

impl PairingReport {
    pub fn is_exact(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }
}

/// Computes the candidate conjugate variable of `X_p` from `J = J(X : C)` and
/// checks its pairing identity against the compressed free difference quotient.
pub fn conjugate_variable_check(
    model: &FreenessModel,
    params: &CompressionParams,
    conjugate: &NCPoly,
    words: &[NCPoly],
) -> Result<PairingReport> {
    conjugate_variable_check_with(model, params, conjugate, words, &params.compressed_derivation())
}

pub fn conjugate_variable_check_with(
    model: &FreenessModel,
    params: &CompressionParams,
    conjugate: &NCPoly,
    words: &[NCPoly],
    der: &Derivation,
) -> Result<PairingReport> {
    let (x, p) = (params.variable(), params.projection());
    let xp = embed(params, &NCPoly::gen(params.compressed()))?;
    let corner = Subalgebra::corner(xp, p, params.alpha(), vec![x])?;
    let pjp = &(&NCPoly::gen(p) * conjugate) * &NCPoly::gen(p);
    let jp = conditional_expectation(model, &pjp, &corner)?;
    let jp_ambient = jp.expand(&corner);
    let mut pairs = Vec::with_capacity(words.len());
    for w in words {
        let normalized = params.normalize(w)?;
        let lhs = corner.state(model, &(&jp_ambient * &embed(params, &normalized)?))?;
        let mut rhs = GaussRat::zero();
        for (key, c) in der.apply(&normalized)?.terms() {
            let mut prod = c.clone();
            for leg in &key.legs {
                let leg_poly = NCPoly::term(Word::from_letters(leg.iter().copied()), GaussRat::one());
                prod *= &tau_p(model, params, &leg_poly)?;
            }
            rhs += &prod;
        }
        pairs.push((lhs, rhs));
    }
    Ok(PairingReport { conjugate: jp, pairs })
}

/// Both sides of the free Markov composition identity for one word.
#[derive(Clone, Debug)]
pub struct MarkovReport {
    /// `E_{C⟨X⟩} E_{C⟨X+Y⟩} E_{Cp⟨p(X+Y)p⟩}(w)`.
    pub lhs: NCPoly,
    /// `E_{C⟨X⟩} E_{Cp⟨p(X+Y)p⟩}(w)`.
    pub rhs: NCPoly,
}

impl MarkovReport {
    pub fn is_exact(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Checks `E_X E_{X+Y} E_W = E_X E_W` on words in the compressed symbol `w`,
/// realised as `W = p(X+Y)p` with unit `p`.
pub fn markov_check(
    model: &FreenessModel,
    (x, y, p): (Gen, Gen, Gen),
    alpha: &Rational,
    w: Gen,
    words: &[NCPoly],
) -> Result<Vec<MarkovReport>> {
    let sum = &NCPoly::gen(x) + &NCPoly::gen(y);
    let pp = NCPoly::gen(p);
    let realised_w = &(&pp * &sum) * &pp;
    let inner = Subalgebra::corner(realised_w.clone(), p, alpha, vec![x, y])?;
    let middle = Subalgebra::new(sum, vec![x, y]);
    let outer = Subalgebra::new(NCPoly::gen(x), vec![x]);
    let mut out = Vec::with_capacity(words.len());
    for word in words {
        let realised = word.substitute(|g| {
            if g == w {
                Ok(realised_w.clone())
            } else if g == p {
                Ok(pp.clone())
            } else {
                Err(Error::Structural("word is not in the compressed algebra Cp⟨W⟩".into()))
            }
        })?;
        // Constants of the compressed algebra are multiples of its unit p.
        let realised = &realised * &pp;
        let e1 = expect_onto(model, &realised, &inner)?;
        let lhs = expect_onto(model, &expect_onto(model, &e1, &middle)?, &outer)?;
        let rhs = expect_onto(model, &e1, &outer)?;
        out.push(MarkovReport { lhs, rhs });
    }
    Ok(out)
}

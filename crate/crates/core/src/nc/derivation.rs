use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use super::{Gen, GenKind, NCPoly, TensorKey, TensorPoly, Word};
use crate::error::{Error, Result};
use crate::exact::GaussRat;

/// The free difference quotient `∂` with respect to one marked variable.
///
/// `∂X = 1 ⊗ 1` for the marked variable and `∂b = 0` for the killed
/// generators (the coefficient algebra). Central scalars are constants.
/// Letters that are neither marked nor killed are rejected, since the
/// derivation is only defined on the algebra generated by both.
#[derive(Clone, Debug)]
pub struct Derivation {
    marked: Gen,
    killed: BTreeSet<Gen>,
    unit_coeff: GaussRat,
}

impl Derivation {
    pub fn new(marked: Gen, killed: impl IntoIterator<Item = Gen>) -> Result<Self> {
        if marked.kind() != GenKind::Variable {
            return Err(Error::Structural("the marked generator must be a variable".into()));
        }
        let killed: BTreeSet<Gen> = killed.into_iter().collect();
        if killed.contains(&marked) {
            return Err(Error::Structural("the marked generator cannot also be killed".into()));
        }
        Ok(Derivation { marked, killed, unit_coeff: GaussRat::one() })
    }

    /// Replaces `∂X = 1⊗1` by `∂X = c·(1⊗1)`. Only used to build deliberately
    /// broken maps that the identity checks must reject.
    pub fn with_scale(mut self, c: GaussRat) -> Self {
        self.unit_coeff = c;
        self
    }

    pub fn marked(&self) -> Gen {
        self.marked
    }

    pub fn killed(&self) -> impl Iterator<Item = Gen> + '_ {
        self.killed.iter().copied()
    }

    fn check_letter(&self, g: Gen) -> Result<()> {
        if g == self.marked || self.killed.contains(&g) {
            Ok(())
        } else {
            Err(Error::Structural(alloc::format!("generator #{} is outside the domain of the derivation", g.id())))
        }
    }

    /// `∂w` for a single word: one term per occurrence of the marked letter.
    pub fn apply_word(&self, w: &Word) -> Result<TensorPoly> {
        let mut out = TensorPoly::zero(2);
        for (i, &g) in w.letters().iter().enumerate() {
            self.check_letter(g)?;
            if g == self.marked {
                let legs = vec![w.letters()[..i].to_vec(), w.letters()[i + 1..].to_vec()];
                out.add_term(TensorKey { scalars: w.scalars().clone(), legs }, self.unit_coeff.clone());
            }
        }
        Ok(out)
    }

    pub fn apply(&self, p: &NCPoly) -> Result<TensorPoly> {
        let mut out = TensorPoly::zero(2);
        for (w, c) in p.terms() {
            out = &out + &self.apply_word(w)?.scale(c);
        }
        Ok(out)
    }

    /// `(id ⊗ … ⊗ ∂ ⊗ … ⊗ id)(t)` with `∂` acting on leg `leg`.
    pub fn apply_on_leg(&self, t: &TensorPoly, leg: usize) -> Result<TensorPoly> {
        if t.is_zero() {
            return Ok(TensorPoly::zero(t.arity() + 1));
        }
        t.map_leg(leg, |w| self.apply_word(w))
    }

    /// `∂^{(k)}`: `k` applications of `∂`, each on the leftmost leg.
    pub fn iterate(&self, p: &NCPoly, k: usize) -> Result<TensorPoly> {
        let mut t = TensorPoly::from_poly(p);
        for _ in 0..k {
            t = self.apply_on_leg(&t, 0)?;
        }
        Ok(t)
    }

    /// `(∂ ⊗ id)∂P − (id ⊗ ∂)∂P`; zero exactly when coassociativity holds on `P`.
    pub fn coassociativity_residual(&self, p: &NCPoly) -> Result<TensorPoly> {
        let d = self.apply(p)?;
        Ok(&self.apply_on_leg(&d, 0)? - &self.apply_on_leg(&d, 1)?)
    }

    /// `∂(ab) − (∂a·b + a·∂b)`.
    pub fn leibniz_residual(&self, a: &NCPoly, b: &NCPoly) -> Result<TensorPoly> {
        let lhs = self.apply(&(a * b))?;
        let rhs = &self.apply(a)?.right_mul(b) + &self.apply(b)?.left_mul(a);
        Ok(&lhs - &rhs)
    }

    /// `∂(a*) − σ₁₂((∂a)*)`, where `σ₁₂` swaps the two legs.
    pub fn star_residual(&self, a: &NCPoly) -> Result<TensorPoly> {
        Ok(&self.apply(&a.star())? - &self.apply(a)?.star().flip(0, 1))
    }
}

/// One-shot `∂_{X:B}(P)`.
pub fn fdq(p: &NCPoly, marked: Gen, killed: &[Gen]) -> Result<TensorPoly> {
    Derivation::new(marked, killed.iter().copied())?.apply(p)
}

/// All words of length `≤ max_len` over `letters`, used by exhaustive checks.
pub fn all_words(letters: &[Gen], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::one()];
    let mut frontier = vec![Vec::<Gen>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &g in letters {
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|v| Word::from_letters(v.iter().copied())));
        frontier = next;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::nc::Alphabet;

    fn setup() -> (Alphabet, Gen, Gen, Derivation) {
        let mut a = Alphabet::new();
        let x = a.variable("X").unwrap();
        let b = a.variable("B").unwrap();
        let d = Derivation::new(x, [b]).unwrap();
        (a, x, b, d)
    }

    #[test]
    fn cube_has_three_terms() {
        let (alpha, x, _, d) = setup();
        let t = d.apply(&NCPoly::word([x, x, x])).unwrap();
        assert_eq!(t.len(), 3);
        for legs in [[&[][..], &[x, x][..]], [&[x][..], &[x][..]], [&[x, x][..], &[][..]]] {
            assert_eq!(t.coeff(&legs), GaussRat::one());
        }
        assert_eq!(alloc::format!("{}", t.display(&alpha)), "1 ⊗ X·X + X ⊗ X + X·X ⊗ 1");
    }

    #[test]
    fn mixed_word_and_kernel() {
        let (_, x, b, d) = setup();
        let t = d.apply(&NCPoly::word([x, b, x])).unwrap();
        assert_eq!(t.coeff(&[&[], &[b, x]]), GaussRat::one());
        assert_eq!(t.coeff(&[&[x, b], &[]]), GaussRat::one());
        assert_eq!(t.len(), 2);
        assert!(d.apply(&NCPoly::word([b, b])).unwrap().is_zero());
        assert!(d.apply(&NCPoly::constant(GaussRat::new(rat(1, 2), rat(1, 1)))).unwrap().is_zero());
    }

    #[test]
    fn second_order_matches_expansion() {
        let (_, x, _, d) = setup();
        let t = d.iterate(&NCPoly::word([x, x, x]), 2).unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.len(), 3);
        assert_eq!(t.coeff(&[&[], &[], &[x]]), GaussRat::one());
        assert_eq!(t.coeff(&[&[], &[x], &[]]), GaussRat::one());
        assert_eq!(t.coeff(&[&[x], &[], &[]]), GaussRat::one());
    }

    #[test]
    fn unknown_letters_are_rejected() {
        let (mut a, x, _, d) = setup();
        let y = a.variable("Y").unwrap();
        assert!(matches!(d.apply(&NCPoly::word([x, y])), Err(Error::Structural(_))));
    }

    #[test]
    fn word_enumeration_counts() {
        let (_, x, b, _) = setup();
        assert_eq!(all_words(&[x, b], 3).len(), 1 + 2 + 4 + 8);
    }
}

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_traits::One;

use super::{add_term, concat_letters, write_word, Alphabet, Gen, NCPoly, ScalarMono, Word};
use crate::error::{Error, Result};
use crate::exact::GaussRat;

/// A basis element of a tensor power: central scalars times `w₁ ⊗ … ⊗ w_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorKey {
    pub scalars: ScalarMono,
    pub legs: Vec<Vec<Gen>>,
}

impl TensorKey {
    pub fn count(&self, g: Gen) -> usize {
        self.legs.iter().flatten().filter(|&&h| h == g).count()
    }
}

/// An element of the `k`-fold algebraic tensor power of an `NCPoly` algebra.
/// Central scalar symbols are pulled out of the legs, so `z·a ⊗ b = a ⊗ z·b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorPoly {
    arity: usize,
    terms: BTreeMap<TensorKey, GaussRat>,
}

impl TensorPoly {
    pub fn zero(arity: usize) -> Self {
        TensorPoly { arity, terms: BTreeMap::new() }
    }

    /// The 1-leg tensor holding `p` itself.
    pub fn from_poly(p: &NCPoly) -> Self {
        let mut t = TensorPoly::zero(1);
        for (w, c) in p.terms() {
            t.add_term(TensorKey { scalars: w.scalars().clone(), legs: vec![w.letters().to_vec()] }, c.clone());
        }
        t
    }

    /// The simple tensor `p₁ ⊗ … ⊗ p_k`, expanded multilinearly.
    pub fn simple(polys: &[&NCPoly]) -> Self {
        let mut t = TensorPoly::zero(polys.len());
        t.add_term(TensorKey { scalars: ScalarMono::one(), legs: vec![Vec::new(); polys.len()] }, GaussRat::one());
        for (leg, p) in polys.iter().enumerate() {
            let mut next = TensorPoly::zero(polys.len());
            for (k, c) in &t.terms {
                for (w, d) in p.terms() {
                    let mut key = k.clone();
                    key.scalars = key.scalars.mul(w.scalars());
                    key.legs[leg] = w.letters().to_vec();
                    next.add_term(key, c * d);
                }
            }
            t = next;
        }
        t
    }

    pub fn add_term(&mut self, key: TensorKey, c: GaussRat) {
        debug_assert_eq!(key.legs.len(), self.arity);
        add_term(&mut self.terms, key, c);
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorKey, &GaussRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the simple tensor of the given words (with trivial scalars).
    pub fn coeff(&self, legs: &[&[Gen]]) -> GaussRat {
        let key = TensorKey { scalars: ScalarMono::one(), legs: legs.iter().map(|l| l.to_vec()).collect() };
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// Largest coefficient modulus; `0` for the zero tensor.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(GaussRat::abs_f64).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: &GaussRat) -> TensorPoly {
        let mut out = TensorPoly::zero(self.arity);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a * c);
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&TensorKey) -> bool) -> TensorPoly {
        TensorPoly {
            arity: self.arity,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// `a · t`, multiplying the first leg on the left.
    pub fn left_mul(&self, a: &NCPoly) -> TensorPoly {
        self.mul_leg(a, 0, true)
    }

    /// `t · b`, multiplying the last leg on the right.
    pub fn right_mul(&self, b: &NCPoly) -> TensorPoly {
        self.mul_leg(b, self.arity.saturating_sub(1), false)
    }

    fn mul_leg(&self, a: &NCPoly, leg: usize, left: bool) -> TensorPoly {
        let mut out = TensorPoly::zero(self.arity);
        if self.arity == 0 {
            return out;
        }
        for (k, c) in &self.terms {
            for (w, d) in a.terms() {
                let mut key = k.clone();
                key.scalars = key.scalars.mul(w.scalars());
                key.legs[leg] = if left {
                    concat_letters(w.letters(), &k.legs[leg])
                } else {
                    concat_letters(&k.legs[leg], w.letters())
                };
                out.add_term(key, c * d);
            }
        }
        out
    }

    /// Swaps legs `i` and `j`.
    pub fn flip(&self, i: usize, j: usize) -> TensorPoly {
        let mut out = TensorPoly::zero(self.arity);
        for (k, c) in &self.terms {
            let mut key = k.clone();
            key.legs.swap(i, j);
            out.add_term(key, c.clone());
        }
        out
    }

    /// Legwise adjoint: `(a ⊗ b)* = a* ⊗ b*`.
    pub fn star(&self) -> TensorPoly {
        let mut out = TensorPoly::zero(self.arity);
        for (k, c) in &self.terms {
            let key = TensorKey {
                scalars: k.scalars.star(),
                legs: k.legs.iter().map(|l| l.iter().rev().map(|g| g.adjoint()).collect()).collect(),
            };
            out.add_term(key, c.conj());
        }
        out
    }

    /// Replaces leg `leg` by a tensor of arity `m` computed from it, giving arity `k − 1 + m`.
    pub fn map_leg(&self, leg: usize, mut f: impl FnMut(&Word) -> Result<TensorPoly>) -> Result<TensorPoly> {
        if leg >= self.arity {
            return Err(Error::Structural(alloc::format!("leg {leg} out of range for arity {}", self.arity)));
        }
        let mut out: Option<TensorPoly> = None;
        for (k, c) in &self.terms {
            let image = f(&Word::from_letters(k.legs[leg].iter().copied()))?;
            let acc = out.get_or_insert_with(|| TensorPoly::zero(self.arity - 1 + image.arity));
            if image.arity + self.arity - 1 != acc.arity {
                return Err(Error::Structural("leg map returned inconsistent arities".into()));
            }
            for (ik, ic) in &image.terms {
                let mut legs = Vec::with_capacity(acc.arity);
                legs.extend_from_slice(&k.legs[..leg]);
                legs.extend(ik.legs.iter().cloned());
                legs.extend_from_slice(&k.legs[leg + 1..]);
                acc.add_term(TensorKey { scalars: k.scalars.mul(&ik.scalars), legs }, c * ic);
            }
        }
        Ok(out.unwrap_or_else(|| TensorPoly::zero(self.arity)))
    }

    /// Applies a linear map legwise, `f₁ ⊗ … ⊗ f_k`, with the same map on every leg.
    pub fn map_legs(&self, mut f: impl FnMut(&Word) -> Result<NCPoly>) -> Result<TensorPoly> {
        let mut out = TensorPoly::zero(self.arity);
        for (k, c) in &self.terms {
            let images = k
                .legs
                .iter()
                .map(|l| f(&Word::from_letters(l.iter().copied())))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&NCPoly> = images.iter().collect();
            let expanded = TensorPoly::simple(&refs);
            for (ek, ec) in expanded.terms {
                out.add_term(TensorKey { scalars: k.scalars.mul(&ek.scalars), legs: ek.legs }, c * &ec);
            }
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        DisplayTensor { t: self, alphabet }
    }
}

struct DisplayTensor<'a> {
    t: &'a TensorPoly,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayTensor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.t.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if !c.is_one() {
                write!(f, "{c}·")?;
            }
            if !k.scalars.is_one() {
                write_word(f, self.alphabet, &k.scalars, &[])?;
                f.write_str("·")?;
            }
            for (j, leg) in k.legs.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ⊗ ")?;
                }
                write_word(f, self.alphabet, &ScalarMono::one(), leg)?;
            }
        }
        Ok(())
    }
}

impl Add for &TensorPoly {
    type Output = TensorPoly;
    fn add(self, o: &TensorPoly) -> TensorPoly {
        assert_eq!(self.arity, o.arity, "tensor arity mismatch");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TensorPoly {
    type Output = TensorPoly;
    fn sub(self, o: &TensorPoly) -> TensorPoly {
        assert_eq!(self.arity, o.arity, "tensor arity mismatch");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Neg for &TensorPoly {
    type Output = TensorPoly;
    fn neg(self) -> TensorPoly {
        self.scale(&-GaussRat::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nc::Alphabet;

    #[test]
    fn simple_tensor_is_multilinear_and_flips() {
        let mut a = Alphabet::new();
        let x = a.variable("X").unwrap();
        let y = a.variable("Y").unwrap();
        let u = &NCPoly::gen(x) + &NCPoly::one();
        let v = NCPoly::gen(y);
        let t = TensorPoly::simple(&[&u, &v]);
        assert_eq!(t.len(), 2);
        assert_eq!(t.coeff(&[&[x], &[y]]), GaussRat::one());
        assert_eq!(t.coeff(&[&[], &[y]]), GaussRat::one());
        let f = t.flip(0, 1);
        assert_eq!(f, TensorPoly::simple(&[&v, &u]));
        assert_eq!(alloc::format!("{}", t.display(&a)), "1 ⊗ Y + X ⊗ Y");
    }

    #[test]
    fn scalars_move_freely_across_legs() {
        let mut a = Alphabet::new();
        let x = a.variable("X").unwrap();
        let z = a.scalar("z").unwrap();
        let zx = NCPoly::word([z, x]);
        let left = TensorPoly::simple(&[&zx, &NCPoly::one()]);
        let right = TensorPoly::simple(&[&NCPoly::gen(x), &NCPoly::gen(z)]);
        assert_eq!(left, right);
    }

    #[test]
    fn map_leg_changes_arity() {
        let mut a = Alphabet::new();
        let x = a.variable("X").unwrap();
        let t = TensorPoly::simple(&[&NCPoly::word([x, x]), &NCPoly::gen(x)]);
        let doubled = t
            .map_leg(1, |w| Ok(TensorPoly::simple(&[&NCPoly::term(w.clone(), GaussRat::one()), &NCPoly::one()])))
            .unwrap();
        assert_eq!(doubled.arity(), 3);
        assert_eq!(doubled.coeff(&[&[x, x], &[x], &[]]), GaussRat::one());
    }
}

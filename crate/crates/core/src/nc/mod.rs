//! Exact noncommutative polynomials over named generators.
//!
//! Three kinds of generator are supported:
//!
//! * variables, which satisfy no relations;
//! * projections, reduced on construction by the rewrite `p·p → p`;
//! * formal scalars, central symbols (such as a spectral parameter `z`)
//!   that commute with everything and may carry negative exponents.
//!
//! Coefficients are Gaussian rationals, so ring identities hold exactly.

mod compression;
mod corep;
mod derivation;
mod norm;
mod tensor;

pub use compression::CompressionParams;
pub use corep::{check_corepresentation, matrix_mul, truncated_resolvent, CorepResidual};
pub use derivation::{all_words, fdq, Derivation};
pub use norm::{lemma_chain, norm_r_upper, projective_norm_upper, LemmaChain};
pub use tensor::{TensorKey, TensorPoly};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::GaussRat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    Variable,
    Projection,
    /// A central formal scalar.
    Scalar,
}

/// A generator handle. Cheap to copy; names live in the [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    id: u16,
    adjoint: u16,
    kind: GenKind,
}

impl Gen {
    pub fn id(self) -> u16 {
        self.id
    }

    pub fn kind(self) -> GenKind {
        self.kind
    }

    pub fn is_self_adjoint(self) -> bool {
        self.id == self.adjoint
    }

    pub fn adjoint(self) -> Gen {
        Gen { id: self.adjoint, adjoint: self.id, kind: self.kind }
    }

    pub fn is_projection(self) -> bool {
        self.kind == GenKind::Projection
    }

    pub fn is_scalar(self) -> bool {
        self.kind == GenKind::Scalar
    }
}

/// The set of named generators an algebra is built on.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    entries: Vec<(String, Gen)>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, name: &str, kind: GenKind, adjoint_offset: Option<u16>) -> Result<Gen> {
        if self.get(name).is_some() {
            return Err(Error::Structural(alloc::format!("duplicate generator name `{name}`")));
        }
        let id = u16::try_from(self.entries.len())
            .map_err(|_| Error::Resource { what: "generators", requested: self.entries.len() + 1, cap: u16::MAX as usize })?;
        let adjoint = adjoint_offset.map_or(id, |off| id + off);
        let g = Gen { id, adjoint, kind };
        self.entries.push((name.to_string(), g));
        Ok(g)
    }

    pub fn variable(&mut self, name: &str) -> Result<Gen> {
        self.push(name, GenKind::Variable, None)
    }

    pub fn projection(&mut self, name: &str) -> Result<Gen> {
        self.push(name, GenKind::Projection, None)
    }

    /// A real (self-adjoint) central scalar symbol.
    pub fn scalar(&mut self, name: &str) -> Result<Gen> {
        self.push(name, GenKind::Scalar, None)
    }

    /// A non-self-adjoint variable `name` together with its adjoint `name*`.
    pub fn variable_pair(&mut self, name: &str) -> Result<(Gen, Gen)> {
        let starred = alloc::format!("{name}*");
        if self.get(&starred).is_some() {
            return Err(Error::Structural(alloc::format!("duplicate generator name `{starred}`")));
        }
        let a = self.push(name, GenKind::Variable, Some(1))?;
        let id = a.id;
        let b = Gen { id: id + 1, adjoint: id, kind: GenKind::Variable };
        self.entries.push((starred, b));
        Ok((a, b))
    }

    pub fn get(&self, name: &str) -> Option<Gen> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, g)| *g)
    }

    pub fn name(&self, g: Gen) -> &str {
        self.entries.get(g.id as usize).map_or("?", |(n, _)| n.as_str())
    }

    pub fn generators(&self) -> impl Iterator<Item = Gen> + '_ {
        self.entries.iter().map(|(_, g)| *g)
    }
}

/// A commutative monomial in central scalar symbols, e.g. `z⁻²·w`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarMono(Vec<(Gen, i32)>);

impl ScalarMono {
    pub fn one() -> Self {
        ScalarMono(Vec::new())
    }

    pub fn power(g: Gen, exp: i32) -> Self {
        let mut m = ScalarMono::one();
        m.push(g, exp);
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Gen, i32)] {
        &self.0
    }

    fn push(&mut self, g: Gen, exp: i32) {
        match self.0.binary_search_by(|(h, _)| h.cmp(&g)) {
            Ok(pos) => {
                self.0[pos].1 += exp;
                if self.0[pos].1 == 0 {
                    self.0.remove(pos);
                }
            }
            Err(pos) if exp != 0 => self.0.insert(pos, (g, exp)),
            Err(_) => {}
        }
    }

    pub fn mul(&self, other: &ScalarMono) -> ScalarMono {
        let mut out = self.clone();
        for &(g, e) in &other.0 {
            out.push(g, e);
        }
        out
    }

    pub fn star(&self) -> ScalarMono {
        let mut out = ScalarMono::one();
        for &(g, e) in &self.0 {
            out.push(g.adjoint(), e);
        }
        out
    }
}

/// Concatenates two reduced letter sequences, applying `p·p → p` at the seam.
pub(crate) fn concat_letters(left: &[Gen], right: &[Gen]) -> Vec<Gen> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    out.extend_from_slice(left);
    let skip = match (left.last(), right.first()) {
        (Some(a), Some(b)) if a == b && a.is_projection() => 1,
        _ => 0,
    };
    out.extend_from_slice(&right[skip..]);
    out
}

/// A reduced monomial: central scalar part times a word in the noncentral letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    scalars: ScalarMono,
    letters: Vec<Gen>,
}

impl Word {
    pub fn one() -> Self {
        Word::default()
    }

    pub fn letter(g: Gen) -> Self {
        Word::from_letters([g])
    }

    /// Builds a word, moving scalar symbols to the central part and reducing projections.
    pub fn from_letters(letters: impl IntoIterator<Item = Gen>) -> Self {
        let mut w = Word::one();
        for g in letters {
            if g.is_scalar() {
                w.scalars.push(g, 1);
            } else if !(g.is_projection() && w.letters.last() == Some(&g)) {
                w.letters.push(g);
            }
        }
        w
    }

    pub fn with_scalars(scalars: ScalarMono, letters: &[Gen]) -> Self {
        let mut w = Word::from_letters(letters.iter().copied());
        w.scalars = w.scalars.mul(&scalars);
        w
    }

    pub fn scalars(&self) -> &ScalarMono {
        &self.scalars
    }

    pub fn letters(&self) -> &[Gen] {
        &self.letters
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    pub fn count(&self, g: Gen) -> usize {
        self.letters.iter().filter(|&&h| h == g).count()
    }

    pub fn is_one(&self) -> bool {
        self.letters.is_empty() && self.scalars.is_one()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word {
            scalars: self.scalars.mul(&other.scalars),
            letters: concat_letters(&self.letters, &other.letters),
        }
    }

    pub fn star(&self) -> Word {
        Word {
            scalars: self.scalars.star(),
            letters: self.letters.iter().rev().map(|g| g.adjoint()).collect(),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        DisplayWord { word: self, alphabet }
    }
}

struct DisplayWord<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, self.alphabet, &self.word.scalars, &self.word.letters)
    }
}

pub(crate) fn write_word(f: &mut fmt::Formatter<'_>, alphabet: &Alphabet, scalars: &ScalarMono, letters: &[Gen]) -> fmt::Result {
    let mut first = true;
    for &(g, e) in scalars.factors() {
        if !first {
            f.write_str("·")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{}", alphabet.name(g))?;
        } else {
            write!(f, "{}^{}", alphabet.name(g), e)?;
        }
    }
    for &g in letters {
        if !first {
            f.write_str("·")?;
        }
        first = false;
        f.write_str(alphabet.name(g))?;
    }
    if first {
        f.write_str("1")?;
    }
    Ok(())
}

pub(crate) fn add_term<K: Ord>(terms: &mut BTreeMap<K, GaussRat>, key: K, c: GaussRat) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        alloc::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        alloc::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// A noncommutative polynomial with exact coefficients. No zero coefficients are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NCPoly {
    terms: BTreeMap<Word, GaussRat>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        NCPoly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        NCPoly::term(Word::one(), c)
    }

    pub fn gen(g: Gen) -> Self {
        NCPoly::term(Word::letter(g), GaussRat::one())
    }

    pub fn word(letters: impl IntoIterator<Item = Gen>) -> Self {
        NCPoly::term(Word::from_letters(letters), GaussRat::one())
    }

    pub fn term(w: Word, c: GaussRat) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn add_term(&mut self, w: Word, c: GaussRat) {
        add_term(&mut self.terms, w, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &GaussRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> GaussRat {
        self.terms.get(w).cloned().unwrap_or_default()
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

    /// The constant value if the polynomial is a plain number.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&Word::one()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussRat) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> NCPoly {
        let mut out = NCPoly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// The adjoint: words reversed, letters starred, coefficients conjugated.
    pub fn star(&self) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.star(), c.conj());
        }
        out
    }

    /// Substitutes each noncentral letter by a polynomial; scalar parts are kept.
    pub fn substitute(&self, mut f: impl FnMut(Gen) -> Result<NCPoly>) -> Result<NCPoly> {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            let mut acc = NCPoly::term(Word { scalars: w.scalars.clone(), letters: Vec::new() }, c.clone());
            for &g in &w.letters {
                acc = &acc * &f(g)?;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        DisplayPoly { poly: self, alphabet }
    }
}

struct DisplayPoly<'a> {
    poly: &'a NCPoly,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.poly.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if w.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", w.display(self.alphabet))?;
            } else {
                write!(f, "{c}·{}", w.display(self.alphabet))?;
            }
        }
        Ok(())
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, o: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&-GaussRat::one())
    }
}

macro_rules! forward_poly_ops {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for NCPoly {
            type Output = NCPoly;
            fn $m(self, o: NCPoly) -> NCPoly { (&self).$m(&o) }
        }
    )*};
}
forward_poly_ops!(Add::add, Sub::sub, Mul::mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn setup() -> (Alphabet, Gen, Gen, Gen) {
        let mut a = Alphabet::new();
        let x = a.variable("X").unwrap();
        let p = a.projection("p").unwrap();
        let z = a.scalar("z").unwrap();
        (a, x, p, z)
    }

    #[test]
    fn projections_reduce_on_construction() {
        let (_, x, p, _) = setup();
        let pp = NCPoly::gen(p) * NCPoly::gen(p);
        assert_eq!(pp, NCPoly::gen(p));
        let pxp = NCPoly::word([p, x, p]);
        let sq = &pxp * &pxp;
        assert_eq!(sq, NCPoly::word([p, x, p, x, p]));
        assert_eq!(Word::from_letters([p, p, x, p, p]).letters(), &[p, x, p]);
    }

    #[test]
    fn scalar_symbols_are_central() {
        let (_, x, _, z) = setup();
        let a = NCPoly::gen(x) * NCPoly::gen(z);
        let b = NCPoly::gen(z) * NCPoly::gen(x);
        assert_eq!(a, b);
        let zinv = NCPoly::term(Word::with_scalars(ScalarMono::power(z, -1), &[]), GaussRat::one());
        assert_eq!(&zinv * &NCPoly::gen(z), NCPoly::one());
    }

    #[test]
    fn star_reverses_and_conjugates() {
        let (_, x, p, _) = setup();
        let c = GaussRat::new(rat(1, 2), rat(1, 3));
        let w = NCPoly::term(Word::from_letters([x, p]), c.clone());
        let s = w.star();
        assert_eq!(s, NCPoly::term(Word::from_letters([p, x]), c.conj()));
        assert_eq!(s.star(), w);
    }

    #[test]
    fn non_self_adjoint_pairs_swap_under_star() {
        let mut a = Alphabet::new();
        let (y, ys) = a.variable_pair("Y").unwrap();
        assert!(!y.is_self_adjoint());
        assert_eq!(y.adjoint(), ys);
        assert_eq!(NCPoly::word([y, y]).star(), NCPoly::word([ys, ys]));
        assert_eq!(a.name(ys), "Y*");
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let (mut a, ..) = setup();
        assert!(matches!(a.variable("X"), Err(Error::Structural(_))));
    }

    #[test]
    fn display_is_readable() {
        let (a, x, p, _) = setup();
        let poly = &NCPoly::word([p, x, p]).scale(&GaussRat::real(rat(3, 2))) + &NCPoly::one();
        assert_eq!(alloc::format!("{}", poly.display(&a)), "1 + 3/2·p·X·p");
    }
}

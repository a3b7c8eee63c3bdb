use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::cumulants::moments_to_cumulants;
use crate::error::{Error, Result};
use crate::exact::{is_psd_exact, GaussRat, Rational};
use crate::nc::{Gen, GenKind, NCPoly};

/// Working degree used when none is given; compressed words of degree 4 need
/// traces of words of length 13, and the Markov check needs a little more.
pub const DEFAULT_DEGREE: usize = 24;

#[derive(Clone, Debug)]
struct Marginal {
    moments: Vec<Rational>,
    cumulants: Vec<Rational>,
}

/// Mutually free self-adjoint generators, each with a given moment sequence,
/// under a tracial state `τ`. The scalar algebra plays the role of `B`.
#[derive(Clone, Debug)]
pub struct FreenessModel {
    degree: usize,
    marginals: BTreeMap<Gen, Marginal>,
}

impl Default for FreenessModel {
    fn default() -> Self {
        FreenessModel::new(DEFAULT_DEGREE)
    }
}

impl FreenessModel {
    pub fn new(degree: usize) -> Self {
        FreenessModel { degree, marginals: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Adds a free generator with moments `m_0 = 1, m_1, …`. Moments beyond the
    /// working degree are ignored; a shorter sequence limits the words that can
    /// be evaluated. The Hankel matrix must be positive semidefinite.
    pub fn add_variable(&mut self, g: Gen, moments: &[Rational]) -> Result<()> {
        if g.kind() != GenKind::Variable || !g.is_self_adjoint() {
            return Err(Error::InvalidModel("free generators must be self-adjoint variables".into()));
        }
        self.insert(g, moments)
    }

    /// Adds a projection of trace `α`, free from everything else.
    pub fn add_projection(&mut self, p: Gen, alpha: &Rational) -> Result<()> {
        if p.kind() != GenKind::Projection {
            return Err(Error::InvalidModel("expected a projection generator".into()));
        }
        if *alpha < Rational::zero() || *alpha > Rational::one() {
            return Err(Error::InvalidModel("projection trace must lie in [0, 1]".into()));
        }
        let mut m = vec![Rational::one()];
        m.extend(core::iter::repeat_n(alpha.clone(), self.degree));
        self.insert(p, &m)
    }

    fn insert(&mut self, g: Gen, moments: &[Rational]) -> Result<()> {
        if self.marginals.contains_key(&g) {
            return Err(Error::InvalidModel("generator already present".into()));
        }
        if moments.first() != Some(&Rational::one()) {
            return Err(Error::InvalidModel("moment sequence must start with m_0 = 1".into()));
        }
        let moments: Vec<Rational> = moments.iter().take(self.degree + 1).cloned().collect();
        let half = (moments.len() - 1) / 2;
        let hankel: Vec<Vec<Rational>> =
            (0..=half).map(|i| (0..=half).map(|j| moments[i + j].clone()).collect()).collect();
        if !is_psd_exact(hankel) {
            return Err(Error::InvalidModel("moment Hankel matrix is not positive semidefinite".into()));
        }
        let cumulants = moments_to_cumulants(&moments);
        self.marginals.insert(g, Marginal { moments, cumulants });
        Ok(())
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.marginals.contains_key(&g)
    }

    pub fn moments(&self, g: Gen) -> Option<&[Rational]> {
        self.marginals.get(&g).map(|m| m.moments.as_slice())
    }

    pub fn cumulants(&self, g: Gen) -> Option<&[Rational]> {
        self.marginals.get(&g).map(|m| m.cumulants.as_slice())
    }

    /// `τ(g₁ g₂ ⋯ g_n)` by summing over non-crossing partitions whose blocks
    /// are monochromatic, each block weighted by the free cumulant of its
    /// generator. The sum is organised as a dynamic programme over intervals
    /// (`O(n⁴)`), never enumerating partitions.
    pub fn mixed_moment(&self, letters: &[Gen]) -> Result<Rational> {
        let n = letters.len();
        if n > self.degree {
            return Err(Error::Resource { what: "word length", requested: n, cap: self.degree });
        }
        let mut kappas: Vec<&[Rational]> = Vec::with_capacity(n);
        for g in letters {
            let m = self
                .marginals
                .get(g)
                .ok_or_else(|| Error::Structural(alloc::format!("generator #{} is not in the model", g.id())))?;
            if m.cumulants.len() < n {
                return Err(Error::Resource { what: "moment sequence length", requested: n, cap: m.cumulants.len() });
            }
            kappas.push(&m.cumulants);
        }
        if n == 0 {
            return Ok(Rational::one());
        }
        // f[i][j]: sum over coloured NC partitions of positions i..j (exclusive).
        let mut f = vec![vec![Rational::zero(); n + 1]; n + 1];
        for (i, row) in f.iter_mut().enumerate() {
            row[i] = Rational::one();
        }
        // h[last][k]: partial weight of the block through `last` with `k` elements so far.
        let mut h = vec![vec![Rational::zero(); n + 2]; n];
        for j in 1..=n {
            for last in (0..j).rev() {
                let colour = letters[last];
                for k in (1..=n).rev() {
                    let mut acc = if k <= kappas[last].len() {
                        &kappas[last][k - 1] * &f[last + 1][j]
                    } else {
                        Rational::zero()
                    };
                    if k < n {
                        for next in last + 1..j {
                            if letters[next] == colour && !f[last + 1][next].is_zero() && !h[next][k + 1].is_zero() {
                                acc += &f[last + 1][next] * &h[next][k + 1];
                            }
                        }
                    }
                    h[last][k] = acc;
                }
                f[last][j] = h[last][1].clone();
            }
        }
        Ok(f[0][n].clone())
    }

    /// `τ` extended linearly to polynomials with numeric coefficients.
    pub fn trace(&self, poly: &NCPoly) -> Result<GaussRat> {
        let mut acc = GaussRat::zero();
        for (w, c) in poly.terms() {
            if !w.scalars().is_one() {
                return Err(Error::Structural("trace needs numeric coefficients".into()));
            }
            let m = self.mixed_moment(w.letters())?;
            acc += &(c * &m);
        }
        Ok(acc)
    }
}

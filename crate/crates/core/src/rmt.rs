//! Random-matrix models of a projection free from a fixed self-adjoint matrix,
//! and the experiments built on them.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, Rational};
use crate::freeness::FreenessModel;
use crate::matrix::CMat;
use crate::measure::MeasureSpec;
use crate::nc::Alphabet;
use crate::subordination::{semigroup_cauchy, semigroup_moments};

/// Stream tags for [`stream_rng`].
pub mod purpose {
    pub const PROJECTION: u32 = 1;
    pub const GUE_X: u32 = 2;
    pub const REGULARIZER: u32 = 3;
}

/// A generator for stream `(purpose, index)` of `seed`; streams never overlap.
pub fn stream_rng(seed: u64, purpose: u32, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 32) | index as u64);
    rng
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// The first `r` columns of a Haar unitary: QR of a complex Gaussian `n×r`
/// matrix with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_isometry(n: usize, r: usize, rng: &mut ChaCha8Rng) -> CMat {
    let z = DMatrix::from_fn(n, r, |_, _| complex_normal(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..r.min(n) {
        let d = rm[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A GUE matrix normalised so its spectrum approaches the semicircle of the given variance.
pub fn gue(n: usize, variance: f64, rng: &mut ChaCha8Rng) -> CMat {
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    (&g + g.adjoint()) * Complex64::new(libm::sqrt(variance / (2.0 * n as f64)), 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub enum XBuilder {
    /// `diag(q((i + ½)/N))` with `q` the quantile function of `μ`.
    Quantile(MeasureSpec),
    /// Eigenvalues of one GUE draw.
    Gue { variance: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RmtModel {
    pub n: usize,
    pub x: XBuilder,
    pub alpha: Rational,
    pub seed: u64,
}

impl RmtModel {
    pub fn new(n: usize, x: XBuilder, alpha: Rational, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("matrix size must be at least 2".into()));
        }
        if alpha <= Rational::from_integer(0.into()) || alpha > Rational::from_integer(1.into()) {
            return Err(Error::Domain(alloc::format!("α = {alpha} must lie in (0, 1]")));
        }
        let m = RmtModel { n, x, alpha, seed };
        if m.rank() == 0 {
            return Err(Error::Domain("projection rank ⌊αN⌋ is zero".into()));
        }
        Ok(m)
    }

    /// `⌊αN⌋`.
    pub fn rank(&self) -> usize {
        (&self.alpha * Rational::from_integer((self.n as i64).into())).floor().to_integer().to_usize().unwrap_or(0)
    }

    /// True when `αN` is not an integer and the rank was rounded down.
    pub fn rank_rounded(&self) -> bool {
        !(&self.alpha * Rational::from_integer((self.n as i64).into())).is_integer()
    }

    pub fn alpha_f64(&self) -> f64 {
        rational_to_f64(&self.alpha)
    }

    /// The law `X` approximates.
    pub fn measure(&self) -> Result<MeasureSpec> {
        match &self.x {
            XBuilder::Quantile(mu) => Ok(mu.clone()),
            XBuilder::Gue { variance } => MeasureSpec::semicircle(Rational::from_integer(0.into()), variance.clone()),
        }
    }

    /// Sorted diagonal of `X` in its eigenbasis.
    pub fn x_diagonal(&self) -> Vec<f64> {
        match &self.x {
            XBuilder::Quantile(mu) => (0..self.n).map(|i| mu.quantile((i as f64 + 0.5) / self.n as f64)).collect(),
            XBuilder::Gue { variance } => {
                let mut rng = stream_rng(self.seed, purpose::GUE_X, 0);
                let h = gue(self.n, rational_to_f64(variance), &mut rng);
                let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
                ev.sort_by(f64::total_cmp);
                ev
            }
        }
    }

    /// The `N×⌊αN⌋` isometry `V` of draw `index` (`P = VV*`); the identity when `α = 1`.
    pub fn isometry(&self, index: u32) -> CMat {
        let r = self.rank();
        if r == self.n {
            return CMat::identity(self.n, self.n);
        }
        haar_isometry(self.n, r, &mut stream_rng(self.seed, purpose::PROJECTION, index))
    }

    /// `(X, P)` for draw `index`.
    pub fn sample(&self, index: u32) -> (CMat, CMat) {
        let x = CMat::from_diagonal(&DVector::from_iterator(self.n, self.x_diagonal().into_iter().map(|v| Complex64::new(v, 0.0))));
        let v = self.isometry(index);
        (x, &v * v.adjoint())
    }

    /// `α⁻¹V*XV`, the compressed corner in `P`'s eigenbasis.
    pub fn corner(&self, x_diag: &[f64], v: &CMat) -> CMat {
        let scale = 1.0 / self.alpha_f64();
        let xv = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * x_diag[i]);
        (v.adjoint() * xv) * Complex64::new(scale, 0.0)
    }
}

/// Maps `f` over sample indices (in parallel with `std`) keeping index order.
pub(crate) fn map_samples<T: Send>(samples: usize, f: impl Fn(u32) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        (0..samples as u32).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "std"))]
    {
        (0..samples as u32).map(f).collect()
    }
}

/// Deterministic pairwise sum.
pub(crate) fn tree_sum<T: Clone>(mut items: Vec<T>, add: impl Fn(&T, &T) -> T) -> Option<T> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        for pair in items.chunks(2) {
            next.push(if pair.len() == 2 { add(&pair[0], &pair[1]) } else { pair[0].clone() });
        }
        items = next;
    }
    items.pop()
}

/// A word in `X` and `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    X,
    P,
}

/// Parses words such as `"XPXP"`.
pub fn parse_word(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'X' | 'x' => Ok(Letter::X),
            'P' | 'p' => Ok(Letter::P),
            other => Err(Error::Structural(alloc::format!("unknown letter {other:?} in word {s:?}"))),
        })
        .collect()
}

fn word_string(w: &[Letter]) -> String {
    w.iter().map(|l| if *l == Letter::X { 'X' } else { 'P' }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub word: String,
    pub empirical: f64,
    pub predicted: f64,
    pub deviation: f64,
    pub envelope: f64,
}

impl DiagnosticRow {
    pub fn within_envelope(&self) -> bool {
        self.deviation <= self.envelope
    }
}

/// Normalised trace of a word, computed on the `r×r` side: cyclically rotate
/// to start at a `P`, then multiply the blocks `V*X^aV`.
fn word_trace(x_diag: &[f64], v: &CMat, word: &[Letter]) -> f64 {
    let n = x_diag.len() as f64;
    let Some(start) = word.iter().position(|l| *l == Letter::P) else {
        let k = word.len() as i32;
        return x_diag.iter().map(|x| libm::pow(*x, k as f64)).sum::<f64>() / n;
    };
    let rotated: Vec<Letter> = word[start..].iter().chain(&word[..start]).copied().collect();
    // Split into runs "P X^a" (repeated P's collapse).
    let mut runs = Vec::new();
    let mut a = 0;
    for (i, l) in rotated.iter().enumerate() {
        match l {
            Letter::P if i > 0 => {
                runs.push(a);
                a = 0;
            }
            Letter::P => {}
            Letter::X => a += 1,
        }
    }
    runs.push(a);
    let r = v.ncols();
    let mut prod = CMat::identity(r, r);
    for a in runs {
        let xa = DMatrix::from_fn(v.nrows(), r, |i, j| v[(i, j)] * libm::pow(x_diag[i], a as f64));
        prod = prod * (v.adjoint() * xa);
    }
    prod.trace().re / n
}

/// Empirical normalised-trace moments of words in `(X, P)` against the
/// free-probability prediction.
pub fn freeness_diagnostic(model: &RmtModel, words: &[Vec<Letter>], samples: usize, envelope: &Envelope) -> Result<Vec<DiagnosticRow>> {
    if let Some(w) = words.iter().find(|w| w.len() > 8) {
        return Err(Error::Resource { what: "diagnostic word degree", requested: w.len(), cap: 8 });
    }
    let mu = model.measure()?;
    let mut ab = Alphabet::new();
    let gx = ab.variable("X")?;
    let gp = ab.projection("p")?;
    let mut fm = FreenessModel::new(8);
    fm.add_variable(gx, &mu.exact_moments(8).ok_or_else(|| Error::Domain("predictions need exact moments".into()))?)?;
    fm.add_projection(gp, &model.alpha)?;
    let x_diag = model.x_diagonal();
    let per_sample = map_samples(samples, |s| {
        let v = model.isometry(s);
        words.iter().map(|w| word_trace(&x_diag, &v, w)).collect::<Vec<f64>>()
    });
    let total = tree_sum(per_sample, |a, b| a.iter().zip(b).map(|(x, y)| x + y).collect()).unwrap_or_default();
    let mut rows = Vec::with_capacity(words.len());
    for (k, w) in words.iter().enumerate() {
        let letters: Vec<_> = w.iter().map(|l| if *l == Letter::X { gx } else { gp }).collect();
        let predicted = rational_to_f64(&fm.mixed_moment(&letters)?);
        let empirical = total.get(k).copied().unwrap_or(0.0) / samples.max(1) as f64;
        rows.push(DiagnosticRow {
            word: word_string(w),
            empirical,
            predicted,
            deviation: (empirical - predicted).abs(),
            envelope: envelope.bound(samples, model.n),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow {
    pub k: usize,
    pub empirical: f64,
    pub predicted: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressionReport {
    pub moments: Vec<MomentRow>,
    /// Kolmogorov–Smirnov distance of the pooled corner spectrum from `μ_t`.
    pub ks: f64,
    /// Pooled corner eigenvalues, sorted.
    pub spectrum: Vec<f64>,
}

/// Cumulative distribution of `μ_t` on a grid.
///
/// `F(x) = −π⁻¹ Im ∫_{−∞}^x G(s + i0) ds`, with the path pushed up to height
/// `H` where `G` is smooth: up from `L + i0`, across to `x + iH`, down to `x + i0`.
pub fn semigroup_cdf_table(mu: &MeasureSpec, t: f64, points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const HEIGHT: f64 = 1.0;
    const FLOOR: f64 = 1e-10;
    const TOL: f64 = 1e-10;
    let (lo, hi) = mu.support();
    let (lo, hi) = (t * lo.min(0.0) - 1.0, t * hi.max(0.0) + 1.0);
    let h = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| lo + h * i as f64).collect();
    let mut failure: Option<Error> = None;
    let mut g = |z: Complex64| match semigroup_cauchy(mu, t, z) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    // ∫_0^H Re G(x + iy) dy
    let vertical = |x: f64, g: &mut dyn FnMut(Complex64) -> Complex64| {
        crate::quadrature::integrate(|y| Complex64::new(g(Complex64::new(x, y)).re, 0.0), FLOOR, HEIGHT, TOL, TOL)
            .map(|v| v.re)
    };
    let v_left = vertical(xs[0], &mut g)?;
    let mut cdf = vec![0.0; points];
    let mut across = 0.0;
    for i in 0..points {
        if i > 0 {
            across += crate::quadrature::integrate(|s| g(Complex64::new(s, HEIGHT)), xs[i - 1], xs[i], TOL, TOL)?.im;
        }
        let v = vertical(xs[i], &mut g)?;
        cdf[i] = (-(v_left + across - v) / core::f64::consts::PI).clamp(0.0, 1.0);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    for i in 1..points {
        cdf[i] = cdf[i].max(cdf[i - 1]);
    }
    Ok((xs, cdf))
}

fn interp_cdf(xs: &[f64], cdf: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return 0.0;
    }
    if x >= xs[xs.len() - 1] {
        return 1.0;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    cdf[i - 1] + w * (cdf[i] - cdf[i - 1])
}

/// Moments and spectrum of the corner of `t·PXP`, `t = 1/α`, against `μ_t`.
pub fn compression_experiment(model: &RmtModel, k_max: usize, samples: usize) -> Result<CompressionReport> {
    let mu = model.measure()?;
    let t = 1.0 / model.alpha_f64();
    let predicted = semigroup_moments(&mu, t, k_max)?;
    let x_diag = model.x_diagonal();
    let r = model.rank();
    let per_sample = map_samples(samples, |s| {
        let y = model.corner(&x_diag, &model.isometry(s));
        let mut ev: Vec<f64> = SymmetricEigen::new(y).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    });
    let mut spectrum: Vec<f64> = per_sample.concat();
    spectrum.sort_by(f64::total_cmp);
    let count = spectrum.len() as f64;
    let moments = (0..=k_max)
        .map(|k| {
            let empirical = spectrum.iter().map(|l| libm::pow(*l, k as f64)).sum::<f64>() / count;
            MomentRow { k, empirical, predicted: predicted[k], deviation: (empirical - predicted[k]).abs() }
        })
        .collect();
    let ks = if r == model.n {
        // No compression: compare with μ itself.
        ks_distance(&spectrum, |x| mu.cdf(x))
    } else {
        let (xs, cdf) = semigroup_cdf_table(&mu, t, 801)?;
        ks_distance(&spectrum, |x| interp_cdf(&xs, &cdf, x))
    };
    Ok(CompressionReport { moments, ks, spectrum })
}

/// `sup_x |F_emp(x) − F(x)|` for sorted samples.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn haar_isometry_is_orthonormal_and_reproducible() {
        let mut a = stream_rng(7, purpose::PROJECTION, 3);
        let mut b = stream_rng(7, purpose::PROJECTION, 3);
        let v = haar_isometry(30, 10, &mut a);
        assert_eq!(v, haar_isometry(30, 10, &mut b));
        assert!((v.adjoint() * &v - CMat::identity(10, 10)).norm() < 1e-12);
        let w = haar_isometry(30, 10, &mut stream_rng(7, purpose::PROJECTION, 4));
        assert!((v - w).norm() > 1.0);
    }

    #[test]
    fn projection_is_exact() {
        let m = RmtModel::new(40, XBuilder::Quantile(MeasureSpec::standard_semicircle()), rat(1, 2), 1).unwrap();
        let (x, p) = m.sample(0);
        assert!((&p * &p - &p).norm() < 1e-12 && (p.adjoint() - &p).norm() < 1e-12);
        assert!((p.trace().re - 20.0).abs() < 1e-12);
        assert!(x.diagonal().iter().zip(x.diagonal().iter().skip(1)).all(|(a, b)| a.re <= b.re));
        let full = RmtModel::new(40, XBuilder::Quantile(MeasureSpec::standard_semicircle()), int(1), 1).unwrap();
        assert_eq!(full.sample(0).1, CMat::identity(40, 40));
        let odd = RmtModel::new(41, XBuilder::Quantile(MeasureSpec::standard_semicircle()), rat(1, 2), 1).unwrap();
        assert_eq!(odd.rank(), 20);
        assert!(odd.rank_rounded());
    }

    #[test]
    fn word_traces_match_dense_products() {
        let m = RmtModel::new(24, XBuilder::Quantile(MeasureSpec::delta_mixture()), rat(1, 3), 5).unwrap();
        let (x, p) = m.sample(2);
        let v = m.isometry(2);
        let xd = m.x_diagonal();
        for w in ["XPXP", "PXXPX", "XXX", "P", "XPPX"] {
            let word = parse_word(w).unwrap();
            let dense = word.iter().fold(CMat::identity(24, 24), |acc, l| acc * if *l == Letter::X { &x } else { &p });
            assert!((dense.trace().re / 24.0 - word_trace(&xd, &v, &word)).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let mu = MeasureSpec::standard_semicircle();
        let xs: Vec<f64> = (0..200).map(|i| mu.quantile((i as f64 + 0.5) / 200.0)).collect();
        assert!(ks_distance(&xs, |x| mu.cdf(x)) <= 0.5 / 200.0 + 1e-12);
    }

    #[test]
    fn semigroup_cdf_of_bernoulli_is_arcsine() {
        let (xs, cdf) = semigroup_cdf_table(&MeasureSpec::bernoulli(), 2.0, 801).unwrap();
        let arcsine = MeasureSpec::arcsine(int(-2), int(2)).unwrap();
        for x in [-1.5, -0.3, 0.0, 0.8, 1.9] {
            assert!((interp_cdf(&xs, &cdf, x) - arcsine.cdf(x)).abs() < 2e-3, "x = {x}");
        }
    }
}

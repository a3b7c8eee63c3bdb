//! Compactly supported probability measures on the line: atoms plus
//! semicircle, arcsine and tabulated (piecewise-linear) densities.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, rat, rational_to_f64, Rational};
use crate::freeness::catalan;
use crate::quadrature::integrate;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub x: Rational,
    pub w: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SmoothKind {
    /// Semicircle of the given centre and variance, support `[m − 2σ, m + 2σ]`.
    Semicircle { center: Rational, variance: Rational },
    /// Arcsine law on `[a, b]`.
    Arcsine { a: Rational, b: Rational },
    /// Piecewise-linear density through `(xs[i], density[i])`, renormalised to mass one.
    Tabulated { xs: Vec<f64>, density: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothPart {
    pub weight: Rational,
    pub kind: SmoothKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    name: String,
    atoms: Vec<Atom>,
    smooth: Vec<SmoothPart>,
    moments: Option<Vec<Rational>>,
    /// Total integral of each tabulated density before renormalisation.
    tab_mass: Vec<f64>,
}

fn binom(n: usize, k: usize) -> Rational {
    let mut c = Rational::one();
    for i in 0..k {
        c = c * int((n - i) as i64) / int((i + 1) as i64);
    }
    c
}

fn sqrt_f(r: &Rational) -> f64 {
    libm::sqrt(rational_to_f64(r))
}

impl MeasureSpec {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>, smooth: Vec<SmoothPart>) -> Result<Self> {
        let mut total = Rational::zero();
        for a in &atoms {
            if a.w <= Rational::zero() {
                return Err(Error::InvalidModel("atom weights must be positive".into()));
            }
            total += &a.w;
        }
        let mut tab_mass = Vec::new();
        for s in &smooth {
            if s.weight <= Rational::zero() {
                return Err(Error::InvalidModel("component weights must be positive".into()));
            }
            total += &s.weight;
            match &s.kind {
                SmoothKind::Semicircle { variance, .. } if *variance <= Rational::zero() => {
                    return Err(Error::InvalidModel("semicircle variance must be positive".into()));
                }
                SmoothKind::Arcsine { a, b } if a >= b => {
                    return Err(Error::InvalidModel("arcsine needs a < b".into()));
                }
                SmoothKind::Tabulated { xs, density } => {
                    if xs.len() < 2 || xs.len() != density.len() {
                        return Err(Error::InvalidModel("tabulated density needs ≥ 2 matching points".into()));
                    }
                    if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidModel("tabulated abscissae must increase strictly".into()));
                    }
                    if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
                        return Err(Error::InvalidModel("tabulated density must be finite and non-negative".into()));
                    }
                    let mass: f64 = xs.windows(2).zip(density.windows(2)).map(|(x, d)| 0.5 * (d[0] + d[1]) * (x[1] - x[0])).sum();
                    if !(mass > 0.0) {
                        return Err(Error::InvalidModel("tabulated density has zero mass".into()));
                    }
                    tab_mass.push(mass);
                }
                _ => {}
            }
        }
        if (rational_to_f64(&total) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(alloc::format!("total mass is {total}, expected 1")));
        }
        if atoms.is_empty() && smooth.is_empty() {
            return Err(Error::InvalidModel("measure has no components".into()));
        }
        Ok(MeasureSpec { name: name.into(), atoms, smooth, moments: None, tab_mass })
    }

    pub fn semicircle(center: Rational, variance: Rational) -> Result<Self> {
        MeasureSpec::new(
            "semicircle",
            Vec::new(),
            alloc::vec![SmoothPart { weight: Rational::one(), kind: SmoothKind::Semicircle { center, variance } }],
        )
    }

    pub fn standard_semicircle() -> Self {
        MeasureSpec::semicircle(int(0), int(1)).expect("valid parameters")
    }

    pub fn arcsine(a: Rational, b: Rational) -> Result<Self> {
        MeasureSpec::new("arcsine", Vec::new(), alloc::vec![SmoothPart { weight: Rational::one(), kind: SmoothKind::Arcsine { a, b } }])
    }

    pub fn atomic(name: impl Into<String>, atoms: &[(Rational, Rational)]) -> Result<Self> {
        MeasureSpec::new(name, atoms.iter().map(|(x, w)| Atom { x: x.clone(), w: w.clone() }).collect(), Vec::new())
    }

    /// `(δ₋₁ + δ₁)/2`.
    pub fn bernoulli() -> Self {
        MeasureSpec::atomic("bernoulli", &[(int(-1), rat(1, 2)), (int(1), rat(1, 2))]).expect("valid parameters")
    }

    /// Equal atoms at −1, 0 and 2.
    pub fn delta_mixture() -> Self {
        MeasureSpec::atomic("delta-mixture", &[(int(-1), rat(1, 3)), (int(0), rat(1, 3)), (int(2), rat(1, 3))])
            .expect("valid parameters")
    }

    /// Replaces the derived moment sequence (`m_0 = 1` required).
    pub fn with_moments(mut self, moments: Vec<Rational>) -> Result<Self> {
        if moments.first() != Some(&Rational::one()) {
            return Err(Error::InvalidModel("moment override must start with m_0 = 1".into()));
        }
        self.moments = Some(moments);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn smooth(&self) -> &[SmoothPart] {
        &self.smooth
    }

    pub fn moment_override(&self) -> Option<&[Rational]> {
        self.moments.as_deref()
    }

    /// Closed-form semicircle parameters `(m, v)` when the measure is exactly one semicircle.
    pub fn as_semicircle(&self) -> Option<(f64, f64)> {
        match (self.atoms.as_slice(), self.smooth.as_slice()) {
            ([], [SmoothPart { kind: SmoothKind::Semicircle { center, variance }, .. }]) => {
                Some((rational_to_f64(center), rational_to_f64(variance)))
            }
            _ => None,
        }
    }

    /// True for `(δ_{−c} + δ_c)/2`; returns `c`.
    pub fn as_symmetric_bernoulli(&self) -> Option<f64> {
        match (self.atoms.as_slice(), self.smooth.as_slice()) {
            ([a, b], []) if a.w == b.w && a.x == -b.x.clone() && !a.x.is_zero() => Some(rational_to_f64(&b.x).abs()),
            _ => None,
        }
    }

    /// Smallest closed interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut cover = |a: f64, b: f64| {
            lo = lo.min(a);
            hi = hi.max(b);
        };
        for a in &self.atoms {
            let x = rational_to_f64(&a.x);
            cover(x, x);
        }
        for s in &self.smooth {
            match &s.kind {
                SmoothKind::Semicircle { center, variance } => {
                    let (m, r) = (rational_to_f64(center), 2.0 * sqrt_f(variance));
                    cover(m - r, m + r);
                }
                SmoothKind::Arcsine { a, b } => cover(rational_to_f64(a), rational_to_f64(b)),
                SmoothKind::Tabulated { xs, .. } => cover(xs[0], xs[xs.len() - 1]),
            }
        }
        (lo, hi)
    }

    /// `max |x|` over the support; an upper bound for the operator norm.
    pub fn support_radius(&self) -> f64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    /// Exact moments `m_0..m_d`, when no tabulated part is present.
    pub fn exact_moments(&self, d: usize) -> Option<Vec<Rational>> {
        if let Some(m) = &self.moments {
            return (m.len() > d).then(|| m[..=d].to_vec());
        }
        let mut out: Vec<Rational> = (0..=d).map(|_| Rational::zero()).collect();
        for a in &self.atoms {
            let mut p = Rational::one();
            for m in out.iter_mut() {
                *m += &a.w * &p;
                p *= &a.x;
            }
        }
        for s in &self.smooth {
            let comp: Vec<Rational> = match &s.kind {
                SmoothKind::Semicircle { center, variance } => (0..=d)
                    .map(|k| {
                        (0..=k / 2).fold(Rational::zero(), |acc, j| {
                            acc + binom(k, 2 * j)
                                * num_traits::pow(center.clone(), k - 2 * j)
                                * num_traits::pow(variance.clone(), j)
                                * int(catalan(j) as i64)
                        })
                    })
                    .collect(),
                SmoothKind::Arcsine { a, b } => {
                    let c = (a + b) / int(2);
                    let r = (b - a) / int(2);
                    (0..=d)
                        .map(|k| {
                            (0..=k / 2).fold(Rational::zero(), |acc, i| {
                                acc + binom(k, 2 * i)
                                    * num_traits::pow(c.clone(), k - 2 * i)
                                    * num_traits::pow(r.clone(), 2 * i)
                                    * binom(2 * i, i)
                                    / num_traits::pow(int(4), i)
                            })
                        })
                        .collect()
                }
                SmoothKind::Tabulated { .. } => return None,
            };
            for (m, c) in out.iter_mut().zip(comp) {
                *m += &s.weight * &c;
            }
        }
        Some(out)
    }

    /// Floating-point moments `m_0..m_d` (exact where possible).
    pub fn moments(&self, d: usize) -> Vec<f64> {
        if let Some(m) = self.exact_moments(d) {
            return m.iter().map(rational_to_f64).collect();
        }
        let mut out = alloc::vec![0.0; d + 1];
        for a in &self.atoms {
            let (x, w) = (rational_to_f64(&a.x), rational_to_f64(&a.w));
            for (k, m) in out.iter_mut().enumerate() {
                *m += w * libm::pow(x, k as f64);
            }
        }
        let mut tab = 0;
        for s in &self.smooth {
            let w = rational_to_f64(&s.weight);
            match &s.kind {
                SmoothKind::Tabulated { xs, density } => {
                    let mass = self.tab_mass[tab];
                    tab += 1;
                    for (seg, ds) in xs.windows(2).zip(density.windows(2)) {
                        let (a, b) = (seg[0], seg[1]);
                        let slope = (ds[1] - ds[0]) / (b - a);
                        let icpt = ds[0] - slope * a;
                        for (k, m) in out.iter_mut().enumerate() {
                            let k1 = k as f64 + 1.0;
                            let k2 = k as f64 + 2.0;
                            let v = icpt * (libm::pow(b, k1) - libm::pow(a, k1)) / k1
                                + slope * (libm::pow(b, k2) - libm::pow(a, k2)) / k2;
                            *m += w * v / mass;
                        }
                    }
                }
                _ => {
                    let single = MeasureSpec {
                        name: String::new(),
                        atoms: Vec::new(),
                        smooth: alloc::vec![SmoothPart { weight: Rational::one(), kind: s.kind.clone() }],
                        moments: None,
                        tab_mass: Vec::new(),
                    };
                    let m = single.exact_moments(d).expect("closed-form component");
                    for (o, v) in out.iter_mut().zip(m.iter()) {
                        *o += w * rational_to_f64(v);
                    }
                }
            }
        }
        out
    }

    fn check_upper(z: Complex64) -> Result<()> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(alloc::format!("Cauchy transform needs Im z > 0, got {z}")));
        }
        Ok(())
    }

    /// `G_μ(z) = ∫ (z − x)⁻¹ dμ(x)` for `Im z > 0` (maps ℍ₊ into ℍ₋).
    pub fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        Self::check_upper(z)?;
        Ok(self.cauchy_and_derivative(z).0)
    }

    /// `(G_μ(z), G_μ'(z))` from closed forms; no domain check.
    pub fn cauchy_and_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let w = rational_to_f64(&a.w);
            let r = (z - rational_to_f64(&a.x)).inv();
            g += r * w;
            dg -= r * r * w;
        }
        let mut tab = 0;
        for s in &self.smooth {
            let w = rational_to_f64(&s.weight);
            let (gc, dgc) = match &s.kind {
                SmoothKind::Semicircle { center, variance } => {
                    let m = rational_to_f64(center);
                    let v = rational_to_f64(variance);
                    let sig = libm::sqrt(v);
                    let u = z - m;
                    let root = (u - 2.0 * sig).sqrt() * (u + 2.0 * sig).sqrt();
                    let gc = (u - root) / (2.0 * v);
                    (gc, gc / (2.0 * v * gc - u))
                }
                SmoothKind::Arcsine { a, b } => {
                    let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                    let gc = ((z - a).sqrt() * (z - b).sqrt()).inv();
                    (gc, -gc * gc * gc * (z - 0.5 * (a + b)))
                }
                SmoothKind::Tabulated { xs, density } => {
                    let mass = self.tab_mass[tab];
                    tab += 1;
                    let mut gc = Complex64::new(0.0, 0.0);
                    let mut dgc = Complex64::new(0.0, 0.0);
                    for (seg, ds) in xs.windows(2).zip(density.windows(2)) {
                        let (a, b) = (seg[0], seg[1]);
                        let slope = (ds[1] - ds[0]) / (b - a);
                        let fz = ds[0] + (z - a) * slope;
                        let log_ratio = (z - a).ln() - (z - b).ln();
                        gc += fz * log_ratio - slope * (b - a);
                        dgc += log_ratio * slope + fz * ((z - a).inv() - (z - b).inv());
                    }
                    (gc / mass, dgc / mass)
                }
            };
            g += gc * w;
            dg += dgc * w;
        }
        (g, dg)
    }

    /// `G_μ(z)` by adaptive quadrature after a smoothing change of variables;
    /// a reference implementation for testing the closed forms.
    pub fn cauchy_quadrature(&self, z: Complex64) -> Result<Complex64> {
        Self::check_upper(z)?;
        let mut g = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            g += (z - rational_to_f64(&a.x)).inv() * rational_to_f64(&a.w);
        }
        let mut tab = 0;
        for s in &self.smooth {
            let w = rational_to_f64(&s.weight);
            let part = match &s.kind {
                SmoothKind::Semicircle { center, variance } => {
                    let (m, sig) = (rational_to_f64(center), sqrt_f(variance));
                    integrate(
                        |th| {
                            let sn = libm::sin(th);
                            (z - (m + 2.0 * sig * libm::cos(th))).inv() * (2.0 / PI * sn * sn)
                        },
                        0.0,
                        PI,
                        1e-13,
                        1e-16,
                    )?
                }
                SmoothKind::Arcsine { a, b } => {
                    let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
                    integrate(|th| (z - (c + r * libm::cos(th))).inv() / PI, 0.0, PI, 1e-13, 1e-16)?
                }
                SmoothKind::Tabulated { xs, density } => {
                    let mass = self.tab_mass[tab];
                    tab += 1;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (seg, ds) in xs.windows(2).zip(density.windows(2)) {
                        let (a, b) = (seg[0], seg[1]);
                        acc += integrate(
                            |x| (z - x).inv() * (ds[0] + (ds[1] - ds[0]) * (x - a) / (b - a)),
                            a,
                            b,
                            1e-13,
                            1e-16,
                        )?;
                    }
                    acc / mass
                }
            };
            g += part * w;
        }
        Ok(g)
    }

    /// Density of the absolutely continuous part at `x`.
    pub fn density(&self, x: f64) -> f64 {
        let mut d = 0.0;
        let mut tab = 0;
        for s in &self.smooth {
            let w = rational_to_f64(&s.weight);
            d += w * match &s.kind {
                SmoothKind::Semicircle { center, variance } => {
                    let v = rational_to_f64(variance);
                    let u = x - rational_to_f64(center);
                    let q = 4.0 * v - u * u;
                    if q > 0.0 { libm::sqrt(q) / (2.0 * PI * v) } else { 0.0 }
                }
                SmoothKind::Arcsine { a, b } => {
                    let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                    if x > a && x < b { 1.0 / (PI * libm::sqrt((x - a) * (b - x))) } else { 0.0 }
                }
                SmoothKind::Tabulated { xs, density } => {
                    let mass = self.tab_mass[tab];
                    tab += 1;
                    interp(xs, density, x) / mass
                }
            };
        }
        d
    }

    /// `μ((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut c = 0.0;
        for a in &self.atoms {
            if rational_to_f64(&a.x) <= x {
                c += rational_to_f64(&a.w);
            }
        }
        let mut tab = 0;
        for s in &self.smooth {
            let w = rational_to_f64(&s.weight);
            c += w * match &s.kind {
                SmoothKind::Semicircle { center, variance } => {
                    let s = ((x - rational_to_f64(center)) / (2.0 * sqrt_f(variance))).clamp(-1.0, 1.0);
                    0.5 + (s * libm::sqrt(1.0 - s * s) + libm::asin(s)) / PI
                }
                SmoothKind::Arcsine { a, b } => {
                    let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                    let s = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0);
                    0.5 + libm::asin(s) / PI
                }
                SmoothKind::Tabulated { xs, density } => {
                    let mass = self.tab_mass[tab];
                    tab += 1;
                    let mut acc = 0.0;
                    for (seg, ds) in xs.windows(2).zip(density.windows(2)) {
                        let (a, b) = (seg[0], seg[1]);
                        if x <= a {
                            break;
                        }
                        let hi = x.min(b);
                        let dh = interp(xs, density, hi);
                        acc += 0.5 * (ds[0] + dh) * (hi - a);
                    }
                    acc / mass
                }
            };
        }
        c.clamp(0.0, 1.0)
    }

    /// Smallest `x` with `cdf(x) ≥ u`, by bisection; lands exactly on an atom
    /// whenever `u` falls inside that atom's jump.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        let u = u.clamp(0.0, 1.0);
        if self.cdf(lo) >= u {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
                break;
            }
        }
        for a in &self.atoms {
            let x = rational_to_f64(&a.x);
            if (x - hi).abs() <= 1e-12 * (1.0 + x.abs()) {
                return x;
            }
        }
        hi
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (a, b) = (xs[i - 1], xs[i]);
    ys[i - 1] + (ys[i] - ys[i - 1]) * (x - a) / (b - a)
}

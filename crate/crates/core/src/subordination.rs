//! The compression semigroup `μ_t` and the scalar subordination function
//! `F` with `G_{μ_t} = G_μ ∘ F`, computed as a formal series, by a damped
//! fixed point, and in closed form where one exists.
//!
//! `F` solves `F = z/t + (1 − 1/t)/G_μ(F)`, i.e. `ω = z/t + (1 − 1/t) F_μ(ω)`
//! with `F_μ = 1/G_μ`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, Rational};
use crate::freeness::{cumulants_to_moments, moments_to_cumulants};
use crate::measure::{MeasureSpec, SmoothKind};
use crate::series::{Field, PowerSeries};

/// Largest number of damped fixed-point steps before giving up.
pub const FIXED_POINT_MAX_ITER: usize = 10_000;
/// Floor applied to `Im F` during the iteration.
pub const IM_FLOOR: f64 = 1e-12;

/// A point of the upper half-plane together with a lower bound on its imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlanePoint {
    z: Complex64,
    eps: f64,
}

impl HalfPlanePoint {
    pub fn new(z: Complex64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !(z.im >= eps) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(alloc::format!("{z} is not in the half-plane Im z ≥ {eps}")));
        }
        Ok(HalfPlanePoint { z, eps })
    }

    /// Uses `Im z` itself as the bound.
    pub fn of(z: Complex64) -> Result<Self> {
        HalfPlanePoint::new(z, z.im)
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::Domain(alloc::format!("semigroup parameter t = {t} must be ≥ 1")));
    }
    Ok(())
}

/// Moments `m_0..m_k` of `μ_t` by cumulant scaling `κ_n(μ_t) = t κ_n(μ)`, exactly.
pub fn semigroup_moments_exact(mu: &MeasureSpec, t: &Rational, k: usize) -> Result<Vec<Rational>> {
    if *t < Rational::one() {
        return Err(Error::Domain(alloc::format!("semigroup parameter t = {t} must be ≥ 1")));
    }
    let m = mu
        .exact_moments(k)
        .ok_or_else(|| Error::Domain("measure has no exact moments (tabulated part or short override)".into()))?;
    let kappa: Vec<Rational> = moments_to_cumulants(&m).into_iter().map(|c| c * t).collect();
    Ok(cumulants_to_moments(&kappa))
}

/// Floating-point moments of `μ_t` for real `t ≥ 1`.
pub fn semigroup_moments(mu: &MeasureSpec, t: f64, k: usize) -> Result<Vec<f64>> {
    check_t(t)?;
    let kappa: Vec<f64> = moments_to_cumulants(&mu.moments(k)).into_iter().map(|c| c * t).collect();
    Ok(cumulants_to_moments(&kappa))
}

/// `F(z) = z + Σ_{j≥1} d_j z^{1−j}`, i.e. `z + f₀ + Σ_{k≥1} f_k z^{−k}` with `f_k = d_{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubordinationSeries<T> {
    d: Vec<T>,
}

impl<T: Field> SubordinationSeries<T> {
    pub fn identity(order: usize) -> Self {
        SubordinationSeries { d: vec![T::zero(); order] }
    }

    pub fn order(&self) -> usize {
        self.d.len()
    }

    /// `[f₀, f₁, …]`.
    pub fn coeffs(&self) -> &[T] {
        &self.d
    }

    /// `δ(u)` with `F = z(1 + δ(1/z))`, truncated at `u^order`.
    fn delta(&self, order: usize) -> PowerSeries<T> {
        let mut c = vec![T::zero()];
        c.extend(self.d.iter().take(order).cloned());
        PowerSeries::new(c, order)
    }
}

fn to_f64_coeffs(d: &[Rational]) -> Vec<f64> {
    d.iter().map(rational_to_f64).collect()
}

impl SubordinationSeries<Rational> {
    /// Plain partial sum at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        partial_sum(&to_f64_coeffs(&self.d), z)
    }

    /// Sums the series through its J-fraction: `F(z) − z − f₀` is minus the
    /// Cauchy transform of a positive measure whose moments are `−f₁, −f₂, …`,
    /// and the continued fraction built exactly from them converges off that
    /// measure's support much faster than the partial sums.
    pub fn eval_resummed(&self, z: Complex64) -> Complex64 {
        let f0 = self.d.first().map(rational_to_f64).unwrap_or(0.0);
        let s: Vec<Rational> = self.d.iter().skip(1).map(|c| -c.clone()).collect();
        let (a, b) = jacobi_from_moments(&s);
        let ab: Vec<(f64, f64)> = a.iter().zip(&b).map(|(x, y)| (rational_to_f64(x), rational_to_f64(y))).collect();
        z + f0 - eval_jfraction(&ab, z)
    }
}

impl SubordinationSeries<f64> {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        partial_sum(&self.d, z)
    }
}

fn partial_sum(d: &[f64], z: Complex64) -> Complex64 {
    let u = z.inv();
    // z + Σ d_j u^{j−1}, Horner in u.
    let tail = d.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c);
    z + tail
}

/// Recurrence coefficients `(a_k, b_k)` of the measure with moments `s`, by the
/// Chebyshev algorithm in exact arithmetic; stops early when the measure is
/// finitely supported. `b_0 = s_0`.
pub fn jacobi_from_moments(s: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let n = s.len() / 2;
    let mut a = Vec::new();
    let mut b = Vec::new();
    if n == 0 || s[0].is_zero() {
        return (a, b);
    }
    let mut prev: Vec<Rational> = vec![Rational::zero(); s.len()];
    let mut cur: Vec<Rational> = s.to_vec();
    a.push(&s[1] / &s[0]);
    b.push(s[0].clone());
    for k in 1..n {
        let mut next = vec![Rational::zero(); s.len()];
        for l in k..(2 * n - k) {
            next[l] = &cur[l + 1] - &a[k - 1] * &cur[l] - &b[k - 1] * &prev[l];
        }
        if next[k].is_zero() {
            break;
        }
        a.push(&next[k + 1] / &next[k] - &cur[k] / &cur[k - 1]);
        b.push(&next[k] / &cur[k - 1]);
        prev = cur;
        cur = next;
    }
    (a, b)
}

/// `b_0/(z − a_0 − b_1/(z − a_1 − …))`.
pub fn eval_jfraction(ab: &[(f64, f64)], z: Complex64) -> Complex64 {
    let mut tail = Complex64::new(0.0, 0.0);
    for (k, &(a, b)) in ab.iter().enumerate().rev() {
        if k == 0 {
            return b * (z - a - tail).inv();
        }
        tail = b * (z - a - tail).inv();
    }
    Complex64::new(0.0, 0.0)
}

/// Moments of the Laurent series `G_μ(F(z))`: `[z^{−n−1}]` for `n = 0..=k`,
/// given moments `m_0..m_k` of `μ`.
pub fn compose_cauchy<T: Field>(moments: &[T], f: &SubordinationSeries<T>, k: usize) -> Result<Vec<T>> {
    if moments.len() <= k {
        return Err(Error::Domain("need moments m_0..m_k".into()));
    }
    let order = k + 1;
    let one_plus = PowerSeries::constant(T::one(), order).add(&f.delta(order));
    let w = PowerSeries::new(vec![T::zero(), T::one()], order).mul(&one_plus.inverse()?);
    // G(F) = w(m_0 + w(m_1 + w(…))) with w = u/(1 + δ).
    let mut acc = PowerSeries::constant(T::zero(), order);
    for m in moments[..=k].iter().rev() {
        acc = w.mul(&PowerSeries::constant(m.clone(), order).add(&acc));
    }
    Ok((1..=order).map(|j| acc.coeff(j)).collect())
}

/// The unique `F = z + f₀ + Σ f_k z^{−k}` with `G_μ ∘ F = G_{μ_t}` through `z^{−k−1}`,
/// from moments of `μ` and of `μ_t` (`m_0..m_k` each). Solved one coefficient at a time.
pub fn formal_subordination<T: Field>(moments: &[T], target: &[T], k: usize) -> Result<SubordinationSeries<T>> {
    if moments.len() <= k || target.len() <= k {
        return Err(Error::Domain("need moments m_0..m_k of both measures".into()));
    }
    let mut f = SubordinationSeries::identity(k);
    for n in 1..=k {
        let g = compose_cauchy(&moments[..=n], &SubordinationSeries { d: f.d[..n].to_vec() }, n)?;
        // Only the `−d_n` term of `m_0 u(1 + δ)^{-1}` involves d_n at this order.
        f.d[n - 1] = g[n].clone() - target[n].clone();
    }
    Ok(f)
}

/// [`formal_subordination`] for `μ` and `μ_t`, exactly.
pub fn formal_subordination_exact(mu: &MeasureSpec, t: &Rational, k: usize) -> Result<SubordinationSeries<Rational>> {
    let m = mu.exact_moments(k).ok_or_else(|| Error::Domain("measure has no exact moments".into()))?;
    let mt = semigroup_moments_exact(mu, t, k)?;
    formal_subordination(&m, &mt, k)
}

fn fixed_point_map(mu: &MeasureSpec, t: f64, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
    let (g, dg) = mu.cauchy_and_derivative(w);
    let c = 1.0 - 1.0 / t;
    // Φ(ω) = ω − z/t − c/G(ω); Φ' = 1 + c G'/G².
    (w - z / t - c / g, 1.0 + c * dg / (g * g))
}

/// `F(z)` by damped fixed-point iteration from `ω = z` (damping 1/2, `Im ω`
/// floored at [`IM_FLOOR`]), finished with Newton steps on the same equation.
pub fn analytic_subordination(mu: &MeasureSpec, t: f64, z: HalfPlanePoint) -> Result<Complex64> {
    check_t(t)?;
    let z = z.z();
    if t == 1.0 {
        return Ok(z);
    }
    let c = 1.0 - 1.0 / t;
    let mut w = z;
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < FIXED_POINT_MAX_ITER {
        iterations += 1;
        let target = z / t + c / mu.cauchy_and_derivative(w).0;
        let mut next = 0.5 * (w + target);
        if next.im < IM_FLOOR {
            next.im = IM_FLOOR;
        }
        step = (next - w).norm();
        w = next;
        if step <= 1e-13 * (1.0 + w.norm()) {
            break;
        }
    }
    for _ in 0..8 {
        let (phi, dphi) = fixed_point_map(mu, t, z, w);
        if phi.norm() <= 1e-15 * (1.0 + w.norm()) || dphi.norm() == 0.0 {
            break;
        }
        let cand = w - phi / dphi;
        if cand.im <= 0.0 || !cand.re.is_finite() || fixed_point_map(mu, t, z, cand).0.norm() >= phi.norm() {
            break;
        }
        w = cand;
    }
    let residual = fixed_point_map(mu, t, z, w).0.norm();
    if !(residual <= 1e-11 * (1.0 + w.norm())) {
        return Err(Error::NonConvergence { iterations, residual: residual.max(step) });
    }
    Ok(w)
}

/// Closed-form `F(z)` for a single semicircle or a symmetric two-point law.
pub fn closed_form_subordination(mu: &MeasureSpec, t: f64, z: Complex64) -> Option<Complex64> {
    if let Some((m, v)) = mu.as_semicircle() {
        // ω = z − (t − 1)(m + v G_{μ_t}(z)).
        let gt = semicircle_cauchy(t * m, t * v, z);
        return Some(z - (t - 1.0) * (m + v * gt));
    }
    if let Some(c) = mu.as_symmetric_bernoulli() {
        // ω² − zω + (t − 1)c² = 0, root with ω ~ z.
        let r = 2.0 * c * libm::sqrt(t - 1.0);
        return Some(0.5 * (z + (z - r).sqrt() * (z + r).sqrt()));
    }
    None
}

fn semicircle_cauchy(m: f64, v: f64, z: Complex64) -> Complex64 {
    let s = libm::sqrt(v);
    let u = z - m;
    (u - (u - 2.0 * s).sqrt() * (u + 2.0 * s).sqrt()) / (2.0 * v)
}

/// `G_{μ_t}(z)` computed without the fixed-point iteration: closed forms for
/// semicircles and symmetric two-point laws, polynomial roots for atomic
/// measures, a quadratic for the arcsine law, and Newton continuation from
/// large `Im z` otherwise.
pub fn semigroup_cauchy(mu: &MeasureSpec, t: f64, z: Complex64) -> Result<Complex64> {
    check_t(t)?;
    if !(z.im > 0.0) {
        return Err(Error::Domain(alloc::format!("Cauchy transform needs Im z > 0, got {z}")));
    }
    if let Some((m, v)) = mu.as_semicircle() {
        return Ok(semicircle_cauchy(t * m, t * v, z));
    }
    if t == 1.0 {
        return mu.cauchy(z);
    }
    if let Some(c) = mu.as_symmetric_bernoulli() {
        return Ok(bernoulli_semigroup_cauchy(t, z / c) / c);
    }
    if mu.smooth().is_empty() {
        return atomic_semigroup_cauchy(mu, t, z);
    }
    if let ([], [part]) = (mu.atoms(), mu.smooth()) {
        if let SmoothKind::Arcsine { a, b } = &part.kind {
            return arcsine_semigroup_cauchy(mu, rational_to_f64(a), rational_to_f64(b), t, z);
        }
    }
    continuation_semigroup_cauchy(mu, t, z)
}

/// `(δ₋₁ + δ₁)/2` pushed to time `t`: `(z² − t²)G² + z(t − 2)G + (1 − t) = 0`.
fn bernoulli_semigroup_cauchy(t: f64, z: Complex64) -> Complex64 {
    if (t - 2.0).abs() < 1e-15 {
        return ((z - 2.0).sqrt() * (z + 2.0).sqrt()).inv();
    }
    let a = z * z - t * t;
    let b = z * (t - 2.0);
    let c = Complex64::new(1.0 - t, 0.0);
    let disc = (b * b - 4.0 * a * c).sqrt();
    let roots = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
    let lower: Vec<Complex64> = roots.iter().copied().filter(|g| g.im < 0.0).collect();
    match lower.as_slice() {
        [g] => *g,
        _ => {
            let zi = z.inv();
            if (roots[0] - zi).norm() <= (roots[1] - zi).norm() {
                roots[0]
            } else {
                roots[1]
            }
        }
    }
}

/// `(tω − z)·P(ω) − (t − 1)·Q(ω) = 0` with `G_μ = P/Q`; the root in ℍ₊ is `F(z)`.
fn atomic_semigroup_cauchy(mu: &MeasureSpec, t: f64, z: Complex64) -> Result<Complex64> {
    let atoms: Vec<(f64, f64)> = mu.atoms().iter().map(|a| (rational_to_f64(&a.x), rational_to_f64(&a.w))).collect();
    let n = atoms.len();
    // Polynomials as coefficient vectors, lowest degree first.
    let mul_lin = |p: &[Complex64], r: f64| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            out[i + 1] += *c;
            out[i] -= *c * r;
        }
        out
    };
    let mut q = vec![Complex64::new(1.0, 0.0)];
    for &(x, _) in &atoms {
        q = mul_lin(&q, x);
    }
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    for (i, &(_, w)) in atoms.iter().enumerate() {
        let mut term = vec![Complex64::new(w, 0.0)];
        for (j, &(x, _)) in atoms.iter().enumerate() {
            if j != i {
                term = mul_lin(&term, x);
            }
        }
        for (k, c) in term.into_iter().enumerate() {
            p[k] += c;
        }
    }
    let mut poly = vec![Complex64::new(0.0, 0.0); n + 1];
    for (k, c) in p.iter().enumerate() {
        poly[k + 1] += *c * t;
        poly[k] -= *c * z;
    }
    for (k, c) in q.iter().enumerate() {
        poly[k] -= *c * (t - 1.0);
    }
    let roots = polynomial_roots(&poly)?;
    let w = roots
        .into_iter()
        .max_by(|a, b| a.im.total_cmp(&b.im))
        .ok_or_else(|| Error::InvalidModel("empty atom list".into()))?;
    if !(w.im > 0.0) {
        return Err(Error::NonConvergence { iterations: 0, residual: w.im.abs() });
    }
    mu.cauchy(w)
}

fn arcsine_semigroup_cauchy(mu: &MeasureSpec, a: f64, b: f64, t: f64, z: Complex64) -> Result<Complex64> {
    // (tω − z)² = (t − 1)²(ω − a)(ω − b), then keep the root of the unsquared equation.
    let s = (t - 1.0) * (t - 1.0);
    let qa = Complex64::new(2.0 * t - 1.0, 0.0);
    let qb = -2.0 * t * z + s * (a + b);
    let qc = z * z - s * a * b;
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let mut best: Option<(f64, Complex64)> = None;
    for w in [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)] {
        if !(w.im > 0.0) {
            continue;
        }
        let res = (t * w - z - (t - 1.0) * (w - a).sqrt() * (w - b).sqrt()).norm();
        if best.is_none_or(|(r, _)| res < r) {
            best = Some((res, w));
        }
    }
    let (_, w) = best.ok_or(Error::NonConvergence { iterations: 0, residual: f64::NAN })?;
    mu.cauchy(w)
}

fn continuation_semigroup_cauchy(mu: &MeasureSpec, t: f64, z: Complex64) -> Result<Complex64> {
    const STEPS: usize = 64;
    let top = (10.0 * t * (mu.support_radius() + 1.0)).max(z.im);
    let mean = mu.moments(1)[1];
    let z0 = Complex64::new(z.re, top);
    // Large Im z: F(z) ≈ z − (t − 1)·mean.
    let mut w = z0 - (t - 1.0) * mean;
    let ratio = libm::pow(z.im / top, 1.0 / STEPS as f64);
    let mut zi = z0;
    for step in 0..=STEPS {
        if step > 0 {
            zi = Complex64::new(z.re, if step == STEPS { z.im } else { zi.im * ratio });
        }
        let mut converged = false;
        for _ in 0..50 {
            let (phi, dphi) = fixed_point_map(mu, t, zi, w);
            let next = w - phi / dphi;
            if !(next.im > 0.0) || !next.re.is_finite() {
                return Err(Error::NonConvergence { iterations: step, residual: phi.norm() });
            }
            let moved = (next - w).norm();
            w = next;
            if moved <= 1e-15 * (1.0 + w.norm()) {
                converged = true;
                break;
            }
        }
        if !converged && fixed_point_map(mu, t, zi, w).0.norm() > 1e-12 {
            return Err(Error::NonConvergence { iterations: step, residual: fixed_point_map(mu, t, zi, w).0.norm() });
        }
    }
    mu.cauchy(w)
}

/// All complex roots of `Σ c_k x^k` (leading coefficient nonzero), by the
/// Durand–Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    let lead = *coeffs.last().ok_or_else(|| Error::Domain("empty polynomial".into()))?;
    if n == 0 || lead.norm() == 0.0 {
        return Err(Error::Domain("polynomial must have positive degree and nonzero lead".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
    let bound = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    const MAX_SWEEPS: usize = 2000;
    let mut moved = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        moved = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            let delta = eval(roots[i]) / den;
            roots[i] -= delta;
            moved = moved.max(delta.norm() / (1.0 + roots[i].norm()));
        }
        // Convergence is quadratic, so a step this small leaves roundoff-level error.
        if moved < 1e-14 {
            return Ok(roots);
        }
    }
    // Stalled at roundoff: the last steps are jitter, not progress.
    if moved < 1e-10 {
        return Ok(roots);
    }
    Err(Error::NonConvergence { iterations: MAX_SWEEPS, residual: moved })
}

/// `t` as a rational when it is a ratio of small integers; used to reach the
/// exact moment path from a floating-point parameter.
pub fn rational_t(t: f64) -> Option<Rational> {
    for den in 1..=1000i64 {
        let num = t * den as f64;
        if (num - libm::round(num)).abs() < 1e-12 {
            return Some(crate::exact::rat(libm::round(num) as i64, den));
        }
    }
    None
}

//! The resolvent-series construction of the subordination point `η`.
//!
//! With `Y = X_p` and `Γ = (iρ)⁻¹(iρ − z + Y)`, `(z − Y)⁻¹ = (iρ)⁻¹ Σ_m Γ^m`.
//! Applying `Ψ = E_{C⟨X⟩}∘ψ` term by term gives `(iρ)⁻¹(1 + h)` with
//! `h = Σ_{m≥1} Ψ(Γ^m)`, a power series in `X`, and `η = X + iρ(1 + h)⁻¹`
//! must be a constant: the coefficients of `X^j`, `j ≥ 1`, measure how far
//! the truncation is from that.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, GaussRat, Rational};
use crate::freeness::{conditional_expectation, FreenessModel, Subalgebra, DEFAULT_DEGREE};
use crate::measure::MeasureSpec;
use crate::nc::{Alphabet, CompressionParams, NCPoly};
use crate::series::PowerSeries;

/// Which finite part of `Σ_m Ψ(Γ^m)` is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EtaTruncation {
    /// `m ≤ M`, the series as written.
    #[default]
    Resolvent,
    /// All `m`, summed in closed form, keeping the terms of degree `≤ M` in `Y`.
    /// Agrees with [`EtaTruncation::Resolvent`] at `z = iρ`.
    Degree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaResult {
    pub eta_exact: GaussRat,
    pub eta: Complex64,
    /// `max_{1≤j≤M} |[X^j] g|`.
    pub nonconstancy: f64,
    pub rho: Rational,
    /// Coefficients of `g = X + iρ(1 + h)⁻¹` in powers of `X`.
    pub series: Vec<GaussRat>,
}

/// `ρ = 6(‖X‖ + ‖Y‖ + 1)` with `‖X‖` the support radius and `‖Y‖ = α⁻¹‖X‖`.
pub fn eta_rho(mu: &MeasureSpec, alpha: &Rational) -> Result<Rational> {
    let r = BigRational::from_float(mu.support_radius())
        .ok_or_else(|| Error::InvalidModel("support radius is not finite".into()))?;
    Ok(int(6) * (&r + &r / alpha + int(1)))
}

/// `Ψ(Y^k)` for `k ≤ M`, computed once and reused across `z` and truncations.
#[derive(Clone, Debug)]
pub struct EtaContext {
    rho: Rational,
    /// `Ψ(Y^k)` as coefficient lists in `X`.
    psi_powers: Vec<Vec<GaussRat>>,
}

impl EtaContext {
    pub fn new(mu: &MeasureSpec, alpha: &Rational, max_m: usize) -> Result<Self> {
        if *alpha <= Rational::zero() || *alpha > Rational::one() {
            return Err(Error::Domain(alloc::format!("α = {alpha} must lie in (0, 1]")));
        }
        // Hankel right-hand sides are words X^j p(Xp)^k with j ≤ k, of length ≤ 3k + 1.
        let degree = DEFAULT_DEGREE.max(3 * max_m + 1);
        let moments = mu
            .exact_moments(degree)
            .ok_or_else(|| Error::Domain("the η-series needs exact moments of μ".into()))?;
        let mut ab = Alphabet::new();
        let x = ab.variable("X")?;
        let p = ab.projection("p")?;
        let y = ab.variable("Y")?;
        let params = CompressionParams::new(alpha.clone(), y, x, p)?;
        let mut model = FreenessModel::new(degree);
        model.add_variable(x, &moments)?;
        model.add_projection(p, alpha)?;
        let sub = Subalgebra::new(NCPoly::gen(x), alloc::vec![x]);
        let mut psi_powers = Vec::with_capacity(max_m + 1);
        let mut pow = NCPoly::one();
        for k in 0..=max_m {
            if k > 0 {
                pow = &pow * &NCPoly::gen(y);
            }
            let q = conditional_expectation(&model, &params.psi_expand(&pow)?, &sub)?;
            psi_powers.push(q.coeffs);
        }
        Ok(EtaContext { rho: eta_rho(mu, alpha)?, psi_powers })
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn max_m(&self) -> usize {
        self.psi_powers.len() - 1
    }

    /// `Ψ(Y^k)` as coefficients in `X`.
    pub fn psi_power(&self, k: usize) -> &[GaussRat] {
        &self.psi_powers[k]
    }

    /// `η(z)` truncated at `M`; `z` must satisfy `|iρ − z| < 1`.
    pub fn eta(&self, z: &GaussRat, m: usize, truncation: EtaTruncation) -> Result<EtaResult> {
        if m == 0 || m > self.max_m() {
            return Err(Error::Resource { what: "η-series truncation", requested: m, cap: self.max_m() });
        }
        let i_rho = GaussRat::new(Rational::zero(), self.rho.clone());
        let c = &i_rho - z;
        if c.norm_sqr() >= Rational::one() {
            return Err(Error::Domain(alloc::format!("|iρ − z| must be < 1 (ρ = {})", self.rho)));
        }
        let q = |k: usize| PowerSeries::new(self.psi_powers[k].clone(), m);
        let one_plus_h = match truncation {
            EtaTruncation::Resolvent => {
                // P_m = (iρ)^{−m} Σ_k C(m,k) c^{m−k} Ψ(Y^k).
                let w = i_rho.inv().expect("ρ > 0");
                let mut total = PowerSeries::constant(GaussRat::zero(), m);
                let mut w_pow = GaussRat::one();
                for mm in 0..=m {
                    let mut pm = PowerSeries::constant(GaussRat::zero(), m);
                    let mut binom = Rational::one();
                    for k in 0..=mm {
                        let coef = &c.pow((mm - k) as u32) * &binom;
                        pm = pm.add(&q(k).scale(&coef));
                        binom = binom * int((mm - k) as i64) / int((k + 1) as i64);
                    }
                    total = total.add(&pm.scale(&w_pow));
                    w_pow = &w_pow * &w;
                }
                total
            }
            EtaTruncation::Degree => {
                // Σ_{m≥0} P_m = (iρ/z) Σ_k Ψ(Y^k) z^{−k}.
                let zinv = z.inv().ok_or_else(|| Error::Domain("z = 0".into()))?;
                let mut total = PowerSeries::constant(GaussRat::zero(), m);
                let mut zp = GaussRat::one();
                for k in 0..=m {
                    total = total.add(&q(k).scale(&zp));
                    zp = &zp * &zinv;
                }
                total.scale(&(&i_rho * &zinv))
            }
        };
        let mut g = one_plus_h.inverse()?.scale(&i_rho);
        if m >= 1 {
            let mut coeffs = g.coeffs().to_vec();
            coeffs[1] = &coeffs[1] + &GaussRat::one();
            g = PowerSeries::new(coeffs, m);
        }
        let series = g.coeffs().to_vec();
        let nonconstancy = series.iter().skip(1).map(GaussRat::abs_f64).fold(0.0, f64::max);
        Ok(EtaResult { eta: series[0].to_complex(), eta_exact: series[0].clone(), nonconstancy, rho: self.rho.clone(), series })
    }
}

/// One-shot `η(z)` with the resolvent truncation.
pub fn eta_series(mu: &MeasureSpec, alpha: &Rational, z: &GaussRat, m: usize) -> Result<EtaResult> {
    EtaContext::new(mu, alpha, m)?.eta(z, m, EtaTruncation::Resolvent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::subordination::{analytic_subordination, HalfPlanePoint};

    fn i_rho(ctx: &EtaContext) -> GaussRat {
        GaussRat::new(Rational::zero(), ctx.rho().clone())
    }

    #[test]
    fn rho_for_semicircle_at_half() {
        assert_eq!(eta_rho(&MeasureSpec::standard_semicircle(), &rat(1, 2)).unwrap(), int(42));
    }

    #[test]
    fn no_compression_gives_z_exactly() {
        let mu = MeasureSpec::standard_semicircle();
        let ctx = EtaContext::new(&mu, &int(1), 6).unwrap();
        let z0 = i_rho(&ctx);
        for m in 1..=6 {
            let r = ctx.eta(&z0, m, EtaTruncation::Resolvent).unwrap();
            assert_eq!(r.eta_exact, z0);
            assert_eq!(r.nonconstancy, 0.0);
        }
        let z = &z0 + &GaussRat::new(rat(1, 3), rat(-1, 4));
        for m in 1..=6 {
            let r = ctx.eta(&z, m, EtaTruncation::Degree).unwrap();
            assert_eq!(r.eta_exact, z);
            assert_eq!(r.nonconstancy, 0.0);
        }
    }

    #[test]
    fn psi_of_compressed_semicircle_power() {
        // Ψ(Y) = X for centred X.
        let ctx = EtaContext::new(&MeasureSpec::standard_semicircle(), &rat(1, 2), 2).unwrap();
        assert_eq!(ctx.psi_power(1), &[GaussRat::zero(), GaussRat::one()]);
    }

    #[test]
    fn converges_to_fixed_point() {
        let mu = MeasureSpec::standard_semicircle();
        let ctx = EtaContext::new(&mu, &rat(1, 2), 8).unwrap();
        let z = i_rho(&ctx);
        let r = ctx.eta(&z, 8, EtaTruncation::Resolvent).unwrap();
        let f = analytic_subordination(&mu, 2.0, HalfPlanePoint::of(z.to_complex()).unwrap()).unwrap();
        assert!((r.eta - f).norm() < 1e-6, "{} vs {f}", r.eta);
        let r6 = ctx.eta(&z, 6, EtaTruncation::Resolvent).unwrap();
        assert!(r.nonconstancy <= 0.5 * r6.nonconstancy);
    }

    #[test]
    fn outside_the_disk_is_rejected() {
        let ctx = EtaContext::new(&MeasureSpec::standard_semicircle(), &rat(1, 2), 2).unwrap();
        let z = &i_rho(&ctx) + &GaussRat::from_int(1);
        assert!(matches!(ctx.eta(&z, 2, EtaTruncation::Resolvent), Err(Error::Domain(_))));
    }
}

//! `compress`, `subordinate` and `density`: scalar transforms of one measure.

use anyhow::{ensure, Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use subord_core::density::stieltjes_density;
use subord_core::exact::{parse_rational, rational_to_f64};
use subord_core::measure::MeasureSpec;
use subord_core::subordination::{
    analytic_subordination, semigroup_cauchy, semigroup_moments, semigroup_moments_exact, HalfPlanePoint,
};
use subord_core::{Error, Rational};

use crate::literal::{Range1, MIN_GRID_IM};

/// Largest composition residual `subordinate` accepts.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_DENSITY_POINTS: usize = 201;

/// The compression parameter, exact and as a float.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeParam {
    pub exact: Rational,
    pub value: f64,
}

impl TimeParam {
    /// From `--t` or `--alpha` (`t = 1/α`); `t = 1` when neither is given.
    pub fn from_flags(t: Option<&str>, alpha: Option<&str>) -> Result<Self> {
        let exact = match (t, alpha) {
            (Some(t), None) => parse_rational(t).with_context(|| format!("--t {t:?} is not a number"))?,
            (None, Some(a)) => {
                let a = parse_rational(a).with_context(|| format!("--alpha {a:?} is not a number"))?;
                ensure!(a > Rational::from_integer(0.into()), "--alpha must be positive");
                a.recip()
            }
            (None, None) => Rational::from_integer(1.into()),
            (Some(_), Some(_)) => anyhow::bail!("give either --t or --alpha, not both"),
        };
        ensure!(exact >= Rational::from_integer(1.into()), "t = {exact} must be at least 1 (α ≤ 1)");
        Ok(TimeParam { value: rational_to_f64(&exact), exact })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentEntry {
    pub k: usize,
    /// `"num/den"` when exact, otherwise the shortest round-trip decimal.
    pub value: String,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub x: f64,
    pub density: f64,
    pub atom_mass: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressReport {
    pub measure: String,
    pub t: String,
    pub moments: Vec<MomentEntry>,
    pub density: Vec<DensityRow>,
}

/// Moments of `μ_t` (exact when possible), and its density on a grid.
pub fn compress(mu: &MeasureSpec, t: &TimeParam, k: usize, grid: Option<Range1>) -> Result<CompressReport> {
    let exact = match mu.exact_moments(k) {
        Some(_) => Some(semigroup_moments_exact(mu, &t.exact, k)?),
        None => None,
    };
    let moments = match exact {
        Some(m) => m.iter().enumerate().map(|(k, v)| MomentEntry { k, value: v.to_string(), exact: true }).collect(),
        None => semigroup_moments(mu, t.value, k)?
            .iter()
            .enumerate()
            .map(|(k, v)| MomentEntry { k, value: v.to_string(), exact: false })
            .collect(),
    };
    let grid = grid.unwrap_or_else(|| default_window(mu, t.value));
    Ok(CompressReport { measure: mu.name().into(), t: t_label(t), moments, density: density_rows(mu, t.value, grid)? })
}

fn t_label(t: &TimeParam) -> String {
    t.exact.to_string()
}

/// `t·[min(a, 0), max(b, 0)]` contains the support of `μ_t`, since `t·pXp`
/// has spectrum in `t` times the convex hull of `0` and `supp μ`.
pub fn default_window(mu: &MeasureSpec, t: f64) -> Range1 {
    let (a, b) = mu.support();
    let (lo, hi) = if t == 1.0 { (a, b) } else { (t * a.min(0.0), t * b.max(0.0)) };
    let pad = 0.05 * (hi - lo).max(1.0);
    Range1 { lo: lo - pad, hi: hi + pad, count: DEFAULT_DENSITY_POINTS }
}

/// Stieltjes inversion of `G_{μ_t}` at each grid point.
pub fn density_rows(mu: &MeasureSpec, t: f64, grid: Range1) -> Result<Vec<DensityRow>> {
    grid.points()
        .into_iter()
        .map(|x| {
            let d = stieltjes_density(|z| semigroup_cauchy(mu, t, z), x)?;
            Ok(DensityRow { x, density: d.density, atom_mass: d.atom_mass })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub measure: String,
    pub t: String,
    pub rows: Vec<DensityRow>,
}

pub fn density(mu: &MeasureSpec, t: &TimeParam, grid: Option<Range1>) -> Result<DensityReport> {
    let grid = grid.unwrap_or_else(|| default_window(mu, t.value));
    Ok(DensityReport { measure: mu.name().into(), t: t_label(t), rows: density_rows(mu, t.value, grid)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubordinationRow {
    pub z_re: f64,
    pub z_im: f64,
    pub f_re: f64,
    pub f_im: f64,
    /// `|G_μ(F(z)) − G_{μ_t}(z)|`, or the solver's last residual on failure.
    pub residual: f64,
    pub status: &'static str,
}

impl SubordinationRow {
    pub fn pass(&self) -> bool {
        self.status == "ok" && self.residual <= RESIDUAL_TOLERANCE
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubordinationReport {
    pub measure: String,
    pub t: String,
    pub rows: Vec<SubordinationRow>,
    pub max_residual: f64,
    pub min_im_gain: f64,
    pub pass: bool,
}

/// `F(z)` with its composition residual at each point; failures are kept
/// as rows with status `nonconvergence`.
pub fn subordinate(mu: &MeasureSpec, t: &TimeParam, points: &[Complex64]) -> Result<SubordinationReport> {
    let mut rows = Vec::with_capacity(points.len());
    for &z in points {
        let pt = HalfPlanePoint::new(z, MIN_GRID_IM)?;
        let row = match analytic_subordination(mu, t.value, pt) {
            Ok(f) => {
                let residual = (mu.cauchy(f)? - semigroup_cauchy(mu, t.value, z)?).norm();
                let status = if residual.is_finite() { "ok" } else { "nonfinite" };
                SubordinationRow { z_re: z.re, z_im: z.im, f_re: f.re, f_im: f.im, residual, status }
            }
            Err(Error::NonConvergence { residual, .. }) => SubordinationRow {
                z_re: z.re,
                z_im: z.im,
                f_re: f64::NAN,
                f_im: f64::NAN,
                residual,
                status: "nonconvergence",
            },
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let min_im_gain = rows.iter().filter(|r| r.status == "ok").map(|r| r.f_im - r.z_im).fold(f64::INFINITY, f64::min);
    let pass = rows.iter().all(SubordinationRow::pass);
    Ok(SubordinationReport { measure: mu.name().into(), t: t_label(t), rows, max_residual, min_im_gain, pass })
}

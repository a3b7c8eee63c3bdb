//! Monte Carlo extraction of the matricial subordination point `η` from a
//! random-matrix model.
//!
//! For `β ∈ H₊(Mₙ)` the estimator averages `α⁻¹ V(I⊗β − Y⊗I)⁻¹V*` over Haar
//! draws, with `Y = α⁻¹V*XV` the compressed corner. `X` is diagonal with
//! distinct entries, so the expectation onto its algebra keeps the `n×n`
//! diagonal blocks `A_i`; then `η̂_i = x_i + A_i⁻¹` and `η` is their average,
//! the nearest `1_N ⊗ η`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::matrix::{classify, hermitian_eigenvalues, imag_part, CMat};
use crate::rmt::{gue, map_samples, purpose, stream_rng, tree_sum, RmtModel};
use crate::subordination::{analytic_subordination, HalfPlanePoint};

#[derive(Clone, Debug, PartialEq)]
pub struct SubordinationResult {
    pub eta: CMat,
    /// RMS over `i` of `‖A_i − (η − x_i)⁻¹‖_F`.
    pub identity_residual: f64,
    /// RMS over `i` of `‖η̂_i − η‖_F`.
    pub block_constancy_residual: f64,
    /// Smallest eigenvalue of `Im η`.
    pub halfplane_margin: f64,
}

impl SubordinationResult {
    pub fn acceptable(&self) -> bool {
        self.halfplane_margin > 0.0 && self.identity_residual >= 0.0 && self.block_constancy_residual >= 0.0
    }
}

/// Eigenvalues `λ_k` of the corner and weights `|(VW)_{ik}|²`.
fn corner_spectrum(model: &RmtModel, x_diag: &[f64], index: u32) -> (Vec<f64>, DMatrix<f64>) {
    let v = model.isometry(index);
    let eig = SymmetricEigen::new(model.corner(x_diag, &v));
    let q = v * eig.eigenvectors;
    (eig.eigenvalues.iter().copied().collect(), q.map(|c| c.norm_sqr()))
}

/// `[(β − λ_k)⁻¹]` flattened into rows of an `r × n²` matrix (column-major blocks).
fn resolvent_rows(beta: &CMat, lambdas: &[f64]) -> Result<CMat> {
    let n = beta.nrows();
    let mut out = CMat::zeros(lambdas.len(), n * n);
    for (k, &l) in lambdas.iter().enumerate() {
        let shifted = beta - CMat::identity(n, n) * Complex64::new(l, 0.0);
        let inv = shifted.try_inverse().ok_or(Error::Degenerate { size: n })?;
        for (c, v) in inv.iter().enumerate() {
            out[(k, c)] = *v;
        }
    }
    Ok(out)
}

fn check_beta(beta: &CMat) -> Result<()> {
    if classify(beta)?.h_plus_eps().is_none() {
        return Err(Error::Domain("β must lie in the upper half-plane H₊(Mₙ)".into()));
    }
    Ok(())
}

/// Block averages `A_i(β)` for each `β`, as `N × n²` matrices.
pub fn block_averages(model: &RmtModel, x_diag: &[f64], betas: &[CMat], samples: usize) -> Result<Vec<CMat>> {
    for b in betas {
        check_beta(b)?;
    }
    let n_big = x_diag.len();
    if model.rank() == model.n {
        // P = I: the resolvent is already block diagonal.
        return betas
            .iter()
            .map(|b| {
                let rows = resolvent_rows(b, x_diag)?;
                Ok(rows)
            })
            .collect();
    }
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let per_sample: Vec<Result<Vec<CMat>>> = map_samples(samples, |s| {
        let (lambdas, w) = corner_spectrum(model, x_diag, s);
        let wc = w.map(|x| Complex64::new(x, 0.0));
        betas.iter().map(|b| Ok(&wc * resolvent_rows(b, &lambdas)?)).collect()
    });
    let per_sample: Vec<Vec<CMat>> = per_sample.into_iter().collect::<Result<_>>()?;
    let total = tree_sum(per_sample, |a, b| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .ok_or(Error::Domain("no samples".into()))?;
    let scale = Complex64::new(1.0 / (model.alpha_f64() * samples as f64), 0.0);
    debug_assert!(total.iter().all(|m| m.nrows() == n_big));
    Ok(total.into_iter().map(|m| m * scale).collect())
}

fn block(rows: &CMat, i: usize, n: usize) -> CMat {
    CMat::from_iterator(n, n, (0..n * n).map(|c| rows[(i, c)]))
}

/// Turns block averages into `η` and its residuals.
pub fn summarize(x_diag: &[f64], rows: &CMat, n: usize) -> Result<SubordinationResult> {
    let count = x_diag.len();
    let id = CMat::identity(n, n);
    let mut etas = Vec::with_capacity(count);
    for (i, &x) in x_diag.iter().enumerate() {
        let a = block(rows, i, n);
        let inv = a.try_inverse().ok_or(Error::Degenerate { size: n })?;
        etas.push(&id * Complex64::new(x, 0.0) + inv);
    }
    let eta = tree_sum(etas.clone(), |a, b| a + b).expect("nonempty") * Complex64::new(1.0 / count as f64, 0.0);
    let mut cons = 0.0;
    let mut ident = 0.0;
    for (i, &x) in x_diag.iter().enumerate() {
        cons += (&etas[i] - &eta).norm_squared();
        let pred = (&eta - &id * Complex64::new(x, 0.0)).try_inverse().ok_or(Error::Degenerate { size: n })?;
        ident += (block(rows, i, n) - pred).norm_squared();
    }
    let margin = hermitian_eigenvalues(&imag_part(&eta))[0];
    Ok(SubordinationResult {
        eta,
        identity_residual: libm::sqrt(ident / count as f64),
        block_constancy_residual: libm::sqrt(cons / count as f64),
        halfplane_margin: margin,
    })
}

/// `η̂` for several `β` from one set of draws.
pub fn matricial_estimates(model: &RmtModel, betas: &[CMat], samples: usize) -> Result<Vec<SubordinationResult>> {
    matricial_estimates_on(model, &model.x_diagonal(), betas, samples)
}

/// As [`matricial_estimates`] with an explicit diagonal for `X`.
pub fn matricial_estimates_on(model: &RmtModel, x_diag: &[f64], betas: &[CMat], samples: usize) -> Result<Vec<SubordinationResult>> {
    let rows = block_averages(model, x_diag, betas, samples)?;
    betas.iter().zip(&rows).map(|(b, r)| summarize(x_diag, r, b.nrows())).collect()
}

pub fn matricial_f(model: &RmtModel, beta: &CMat, samples: usize) -> Result<SubordinationResult> {
    Ok(matricial_estimates(model, core::slice::from_ref(beta), samples)?.remove(0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangularResult {
    pub result: SubordinationResult,
    /// Largest strictly-upper entry of `η̂`.
    pub upper_max: f64,
    /// `(η̂_ii, F(β_ii))` per diagonal slot.
    pub diagonal: Vec<(Complex64, Complex64)>,
}

impl TriangularResult {
    pub fn diagonal_deviation(&self) -> f64 {
        self.diagonal.iter().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn within(&self, envelope: &Envelope, samples: usize, n: usize) -> bool {
        let tol = envelope.bound(samples, n);
        self.result.acceptable() && self.upper_max <= tol && self.diagonal_deviation() <= tol
    }
}

/// Lower-triangular `β`: `η̂` must be lower triangular with diagonal `F(β_ii)`.
pub fn matricial_phi_triangular(model: &RmtModel, beta: &CMat, samples: usize) -> Result<TriangularResult> {
    if !classify(beta)?.in_delta_plus() {
        return Err(Error::Domain("β must lie in Δ₊(Mₙ)".into()));
    }
    let result = matricial_f(model, beta, samples)?;
    triangular_report(model, beta, result)
}

pub fn triangular_report(model: &RmtModel, beta: &CMat, result: SubordinationResult) -> Result<TriangularResult> {
    let n = beta.nrows();
    let mu = model.measure()?;
    let t = 1.0 / model.alpha_f64();
    let mut upper_max = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            upper_max = upper_max.max(result.eta[(i, j)].norm());
        }
    }
    let mut diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let f = analytic_subordination(&mu, t, HalfPlanePoint::of(beta[(i, i)])?)?;
        diagonal.push((result.eta[(i, i)], f));
    }
    Ok(TriangularResult { result, upper_max, diagonal })
}

/// Sorted spectrum of `diag(x) + εS` with `S` one GUE draw of unit variance.
pub fn regularized_diagonal(model: &RmtModel, x_diag: &[f64], eps: f64) -> Vec<f64> {
    if eps == 0.0 {
        return x_diag.to_vec();
    }
    let s = gue(x_diag.len(), 1.0, &mut stream_rng(model.seed, purpose::REGULARIZER, 0));
    let mut h = s * Complex64::new(eps, 0.0);
    for (i, x) in x_diag.iter().enumerate() {
        h[(i, i)] += *x;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    /// One entry per `β`.
    pub results: Vec<SubordinationResult>,
}

/// `η̂(ε)` for `X + εS`. The same projection draws are used at every `ε`.
pub fn regularization_sweep(model: &RmtModel, eps_list: &[f64], betas: &[CMat], samples: usize) -> Result<Vec<SweepRow>> {
    if let Some(e) = eps_list.iter().find(|e| !(**e >= 0.0 && **e <= 1.0)) {
        return Err(Error::Domain(alloc::format!("ε = {e} must lie in [0, 1]")));
    }
    let base = model.x_diagonal();
    eps_list
        .iter()
        .map(|&eps| {
            let xd = regularized_diagonal(model, &base, eps);
            Ok(SweepRow { eps, results: matricial_estimates_on(model, &xd, betas, samples)? })
        })
        .collect()
}

/// `‖η̂(ε_i) − η̂(ε_{i+1})‖_F` for consecutive rows, per `β`.
pub fn sweep_differences(rows: &[SweepRow]) -> Vec<Vec<f64>> {
    rows.windows(2)
        .map(|w| w[0].results.iter().zip(&w[1].results).map(|(a, b)| (&a.eta - &b.eta).norm()).collect())
        .collect()
}

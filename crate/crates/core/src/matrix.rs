//! Operator-valued half-planes `H±(Mₙ)` and triangular sets `Δ±Mₙ`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Slack used by the inverse checks.
pub const CHECK_SLACK: f64 = 1e-10;

/// `(M − M*)/(2i)`.
pub fn imag_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

/// `(M + M*)/2`.
pub fn real_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest singular value.
pub fn operator_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoint {
    entries: CMat,
    /// Smallest eigenvalue of `Im M`.
    im_min: f64,
    /// Largest eigenvalue of `Im M`.
    im_max: f64,
    lower_triangular: bool,
    upper_triangular: bool,
    diag_im_min: f64,
    diag_im_max: f64,
}

impl MatrixPoint {
    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// The best `ε` with `Im M ≥ ε` (may be ≤ 0).
    pub fn im_lower_bound(&self) -> f64 {
        self.im_min
    }

    pub fn in_h_plus(&self, eps: f64) -> bool {
        eps > 0.0 && self.im_min >= eps
    }

    pub fn in_h_minus(&self, eps: f64) -> bool {
        eps > 0.0 && self.im_max <= -eps
    }

    /// `Some(ε)` with `ε = min λ(Im M) > 0` when `M ∈ H₊`.
    pub fn h_plus_eps(&self) -> Option<f64> {
        (self.im_min > 0.0).then_some(self.im_min)
    }

    pub fn h_minus_eps(&self) -> Option<f64> {
        (self.im_max < 0.0).then_some(-self.im_max)
    }

    /// Lower triangular with `Im` of every diagonal entry `> 0`; returns the least one.
    pub fn delta_plus_eps(&self) -> Option<f64> {
        (self.lower_triangular && self.diag_im_min > 0.0).then_some(self.diag_im_min)
    }

    pub fn delta_minus_eps(&self) -> Option<f64> {
        (self.lower_triangular && self.diag_im_max < 0.0).then_some(-self.diag_im_max)
    }

    pub fn in_delta_plus(&self) -> bool {
        self.delta_plus_eps().is_some()
    }

    pub fn in_delta_minus(&self) -> bool {
        self.delta_minus_eps().is_some()
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.upper_triangular
    }
}

/// Classifies a square matrix; non-square input is a structural error.
pub fn classify(m: &CMat) -> Result<MatrixPoint> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Structural(alloc::format!("expected a square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    let ev = hermitian_eigenvalues(&imag_part(m));
    let n = m.nrows();
    let mut lower = true;
    let mut upper = true;
    for i in 0..n {
        for j in 0..n {
            if j > i && m[(i, j)] != Complex64::new(0.0, 0.0) {
                lower = false;
            }
            if j < i && m[(i, j)] != Complex64::new(0.0, 0.0) {
                upper = false;
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].im).collect();
    Ok(MatrixPoint {
        entries: m.clone(),
        im_min: ev[0],
        im_max: ev[n - 1],
        lower_triangular: lower,
        upper_triangular: upper,
        diag_im_min: diag.iter().copied().fold(f64::INFINITY, f64::min),
        diag_im_max: diag.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseReport {
    pub eps: f64,
    pub inverse: CMat,
    /// `‖M⁻¹‖`, to be at most `ε⁻¹`.
    pub inverse_norm: f64,
    /// Largest eigenvalue of `Im M⁻¹ + (ε + ε⁻¹‖M‖²)⁻¹`, to be at most 0.
    pub imag_gap: f64,
}

/// For `M ∈ H₊(ε)`: `‖M⁻¹‖ ≤ ε⁻¹` and `Im M⁻¹ ≤ −(ε + ε⁻¹‖M‖²)⁻¹`.
pub fn halfplane_inverse_check(m: &MatrixPoint) -> Result<InverseReport> {
    let eps = m.h_plus_eps().ok_or_else(|| Error::Domain("matrix is not in the upper half-plane".into()))?;
    let inverse = m.entries.clone().try_inverse().ok_or(Error::Degenerate { size: m.size() })?;
    let inverse_norm = operator_norm(&inverse);
    let norm = operator_norm(&m.entries);
    let bound = 1.0 / (eps + norm * norm / eps);
    let gap = hermitian_eigenvalues(&imag_part(&inverse)).last().copied().unwrap_or(0.0) + bound;
    let report = InverseReport { eps, inverse, inverse_norm, imag_gap: gap };
    if inverse_norm > 1.0 / eps + CHECK_SLACK || gap > CHECK_SLACK {
        return Err(Error::InvariantViolation(alloc::format!(
            "half-plane inverse bounds fail: ‖M⁻¹‖ = {inverse_norm}, ε⁻¹ = {}, gap = {gap}",
            1.0 / eps
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangularInverseReport {
    pub inverse: CMat,
    /// Largest strictly-upper entry of `κ⁻¹`.
    pub upper_max: f64,
    /// `max_i |(κ⁻¹)_ii − (κ_ii)⁻¹|`.
    pub diagonal_deviation: f64,
}

/// For `κ ∈ Δ₊`: `κ⁻¹ ∈ Δ₋` with `(κ⁻¹)_ii = (κ_ii)⁻¹`.
pub fn triangular_inverse_check(k: &MatrixPoint) -> Result<TriangularInverseReport> {
    if !k.in_delta_plus() {
        return Err(Error::Domain("matrix is not in Δ₊".into()));
    }
    let inverse = k.entries.clone().try_inverse().ok_or(Error::Degenerate { size: k.size() })?;
    let n = k.size();
    let mut upper_max = 0.0f64;
    let mut diagonal_deviation = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            upper_max = upper_max.max(inverse[(i, j)].norm());
        }
        diagonal_deviation = diagonal_deviation.max((inverse[(i, i)] - k.entries[(i, i)].inv()).norm());
    }
    let report = TriangularInverseReport { inverse, upper_max, diagonal_deviation };
    let scale = 1.0 + operator_norm(&report.inverse);
    let in_minus = (0..n).all(|i| report.inverse[(i, i)].im < 0.0);
    if upper_max > CHECK_SLACK * scale || diagonal_deviation > CHECK_SLACK * scale || !in_minus {
        return Err(Error::InvariantViolation(alloc::format!(
            "triangular inverse identity fails: upper {upper_max}, diagonal {diagonal_deviation}"
        )));
    }
    Ok(report)
}

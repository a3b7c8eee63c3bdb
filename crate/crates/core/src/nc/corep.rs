use alloc::vec::Vec;

use super::{Derivation, Gen, NCPoly, TensorPoly};
use crate::error::{Error, Result};

/// Entrywise residuals `∂a_ij − Σ_k a_ik ⊗ a_kj`, truncated by degree.
#[derive(Clone, Debug)]
pub struct CorepResidual {
    pub entries: Vec<Vec<TensorPoly>>,
}

impl CorepResidual {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(TensorPoly::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(TensorPoly::max_abs_coeff).fold(0.0, f64::max)
    }
}

fn check_square(m: &[Vec<NCPoly>]) -> Result<usize> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::Structural("matrix must be square and non-empty".into()));
    }
    Ok(n)
}

/// Product of two square matrices over `NCPoly`.
pub fn matrix_mul(a: &[Vec<NCPoly>], b: &[Vec<NCPoly>]) -> Result<Vec<Vec<NCPoly>>> {
    let n = check_square(a)?;
    if check_square(b)? != n {
        return Err(Error::Structural("matrix sizes differ".into()));
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(NCPoly::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect())
}

/// Checks `∂a_ij = Σ_k a_ik ⊗ a_kj` on all terms with at most `degree − 1`
/// occurrences of the marked variable (the range unaffected by truncating
/// the entries at degree `degree`).
pub fn check_corepresentation(entries: &[Vec<NCPoly>], der: &Derivation, degree: usize) -> Result<CorepResidual> {
    let n = check_square(entries)?;
    let marked = der.marked();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut r = der.apply(&entries[i][j])?;
            for k in 0..n {
                r = &r - &TensorPoly::simple(&[&entries[i][k], &entries[k][j]]);
            }
            row.push(r.filter(|key| key.count(marked) + 1 <= degree));
        }
        out.push(row);
    }
    Ok(CorepResidual { entries: out })
}

/// The degree-`degree` truncation `Σ_{k ≤ degree} K^{k+1} X^k` of the resolvent
/// `(β − X ⊗ 1ₙ)⁻¹`, given `K = β⁻¹` with entries in central scalars.
pub fn truncated_resolvent(kernel_inverse: &[Vec<NCPoly>], marked: Gen, degree: usize) -> Result<Vec<Vec<NCPoly>>> {
    let n = check_square(kernel_inverse)?;
    if kernel_inverse.iter().flatten().any(|e| e.terms().any(|(w, _)| w.degree() > 0)) {
        return Err(Error::Structural("resolvent parameter entries must be central scalars".into()));
    }
    let mut power = kernel_inverse.to_vec();
    let mut out = vec_of_zeros(n);
    for k in 0..=degree {
        let xk = NCPoly::word(core::iter::repeat_n(marked, k));
        for i in 0..n {
            for j in 0..n {
                out[i][j] = &out[i][j] + &(&power[i][j] * &xk);
            }
        }
        power = matrix_mul(&power, kernel_inverse)?;
    }
    Ok(out)
}

fn vec_of_zeros(n: usize) -> Vec<Vec<NCPoly>> {
    (0..n).map(|_| (0..n).map(|_| NCPoly::zero()).collect()).collect()
}

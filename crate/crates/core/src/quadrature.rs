//! Adaptive Gauss–Kronrod (7, 15) quadrature for complex-valued integrands.

use alloc::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Piece {
    lo: f64,
    hi: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> core::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// `∫_a^b f` by globally adaptive bisection: the piece with the largest error
/// estimate is split until the summed estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(mut f: impl FnMut(f64) -> Complex64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Complex64> {
    const MAX_PIECES: usize = 20_000;
    let (val, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { lo: a, hi: b, val, err });
    let mut total = val;
    let mut total_err = err;
    while total_err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= MAX_PIECES {
            return Err(Error::NonConvergence { iterations: heap.len(), residual: total_err });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // Cannot split further; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.lo, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.hi);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { lo: worst.lo, hi: mid, val: v1, err: e1 });
        heap.push(Piece { lo: mid, hi: worst.hi, val: v2, err: e2 });
        if heap.len() % 64 == 0 {
            // Resum to shed drift from the running updates.
            total = heap.iter().map(|p| p.val).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap.iter().map(|p| p.val).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory() {
        let v = integrate(|x| Complex64::new(x * x, 0.0), 0.0, 3.0, 1e-13, 1e-15).unwrap();
        assert!((v.re - 9.0).abs() < 1e-12);
        let v = integrate(|x| Complex64::new(0.0, libm::sin(x)), 0.0, core::f64::consts::PI, 1e-13, 1e-15).unwrap();
        assert!((v.im - 2.0).abs() < 1e-12);
    }
}

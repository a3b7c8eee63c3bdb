//! Monte Carlo tolerance envelope `c/√samples + c′/N`.

use alloc::vec::Vec;

/// Constants fitted once on the semicircle model and frozen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub c: f64,
    pub c_prime: f64,
}

impl Envelope {
    /// Fitted on the semicircle model with safety factor 3 (see `tests/calibration.rs`).
    pub const CALIBRATED: Envelope = Envelope { c: 0.027, c_prime: 1.4 };

    pub fn new(c: f64, c_prime: f64) -> Self {
        Envelope { c, c_prime }
    }

    pub fn bound(&self, samples: usize, n: usize) -> f64 {
        self.c / libm::sqrt(samples.max(1) as f64) + self.c_prime / n.max(1) as f64
    }

    pub fn contains(&self, deviation: f64, samples: usize, n: usize) -> bool {
        deviation.is_finite() && deviation <= self.bound(samples, n)
    }
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::CALIBRATED
    }
}

/// Least-squares fit of `err ≈ c/√samples + c′/N` over `(samples, N, err)`
/// observations with `c, c′ ≥ 0`, then inflated by `safety`.
pub fn calibrate(observations: &[(usize, usize, f64)], safety: f64) -> Envelope {
    let rows: Vec<(f64, f64, f64)> = observations
        .iter()
        .map(|&(s, n, e)| (1.0 / libm::sqrt(s as f64), 1.0 / n as f64, e))
        .collect();
    let fit_one = |col: usize| -> f64 {
        let (num, den) = rows.iter().fold((0.0, 0.0), |(a, b), r| {
            let x = if col == 0 { r.0 } else { r.1 };
            (a + x * r.2, b + x * x)
        });
        if den > 0.0 { (num / den).max(0.0) } else { 0.0 }
    };
    let (mut saa, mut sab, mut sbb, mut sae, mut sbe) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(a, b, e) in &rows {
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        sae += a * e;
        sbe += b * e;
    }
    let det = saa * sbb - sab * sab;
    let (c, cp) = if det.abs() > 1e-300 {
        ((sae * sbb - sbe * sab) / det, (saa * sbe - sab * sae) / det)
    } else {
        (-1.0, -1.0)
    };
    let (c, cp) = if c >= 0.0 && cp >= 0.0 {
        (c, cp)
    } else {
        // The unconstrained optimum left the quadrant: best single-term fit.
        let (c0, c1) = (fit_one(0), fit_one(1));
        let res = |c: f64, cp: f64| rows.iter().map(|r| {
            let d = r.2 - c * r.0 - cp * r.1;
            d * d
        })
        .sum::<f64>();
        if res(c0, 0.0) <= res(0.0, c1) { (c0, 0.0) } else { (0.0, c1) }
    };
    Envelope { c: c * safety, c_prime: cp * safety }
}

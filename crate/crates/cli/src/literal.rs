//! Small text literals: complex numbers, complex matrices and grids.

use anyhow::{anyhow, bail, ensure, Result};
use num_complex::Complex64;
use subord_core::matrix::CMat;

/// Parses `"1.5"`, `"2i"`, `"-i"`, `"0.5+0.5i"`, `"1e-3-2i"`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    ensure!(!s.is_empty(), "empty complex number");
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&s)?, 0.0));
    };
    // Split at the last sign that is not an exponent sign and not leading.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| anyhow!("{s:?} is not a number"))?;
    ensure!(v.is_finite(), "{s:?} is not finite");
    Ok(v)
}

/// Parses a square matrix literal `"[[2i, 0], [1, 3i]]"`; a bare complex
/// number is a `1×1` matrix.
pub fn parse_matrix(s: &str) -> Result<CMat> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(inner) = compact.strip_prefix("[[").and_then(|r| r.strip_suffix("]]")) else {
        if compact.contains('[') || compact.contains(']') {
            bail!("malformed matrix literal {s:?}");
        }
        return Ok(CMat::from_element(1, 1, parse_complex(&compact)?));
    };
    let rows: Vec<Vec<Complex64>> = inner
        .split("],[")
        .map(|row| row.split(',').map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()
        .map_err(|e| anyhow!("in matrix literal {s:?}: {e}"))?;
    let n = rows.len();
    ensure!(rows.iter().all(|r| r.len() == n), "matrix literal {s:?} is not square");
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

/// `lo:hi:count`, inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range1 {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Range1 {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [lo, hi, count] = parts.as_slice() else {
            bail!("range {s:?} must look like lo:hi:count");
        };
        let r = Range1 {
            lo: parse_real(lo)?,
            hi: parse_real(hi)?,
            count: count.parse().map_err(|_| anyhow!("{count:?} is not a point count"))?,
        };
        ensure!(r.count >= 1, "range {s:?} has no points");
        ensure!(r.lo <= r.hi, "range {s:?} has lo > hi");
        ensure!(r.count == 1 || r.lo < r.hi, "range {s:?} repeats one point");
        Ok(r)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.count - 1) as f64).collect()
    }
}

/// Smallest imaginary part accepted on a subordination grid.
pub const MIN_GRID_IM: f64 = 0.05;

/// A rectangular grid `"re_lo:re_hi:n,im_lo:im_hi:m"` in the upper half-plane,
/// or a `;`-separated list of points such as `"2i;0.5+1i"`.
pub fn parse_complex_grid(s: &str) -> Result<Vec<Complex64>> {
    let points = if s.contains(':') {
        let (re, im) = s.split_once(',').ok_or_else(|| anyhow!("grid {s:?} must look like re_lo:re_hi:n,im_lo:im_hi:m"))?;
        let (re, im) = (Range1::parse(re)?, Range1::parse(im)?);
        re.points().into_iter().flat_map(|x| im.points().into_iter().map(move |y| Complex64::new(x, y))).collect()
    } else {
        s.split(';').map(parse_complex).collect::<Result<Vec<_>>>()?
    };
    if let Some(z) = points.iter().find(|z| !(z.im >= MIN_GRID_IM)) {
        bail!("grid point {z} has Im z < {MIN_GRID_IM}");
    }
    Ok(points)
}

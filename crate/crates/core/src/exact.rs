//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! Every algebraic identity in the crate is checked in this arithmetic, so
//! a residual is either exactly zero or a genuine failure.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3"`, `"-7/4"`, `"0.125"` or `"1.5e-3"` into an exact rational.
/// Decimal strings are converted exactly, never through `f64`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut all = alloc::string::String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if negative { -value } else { value })
}

/// An exact complex number `re + im·i` with rational parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRat { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        GaussRat { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::real(int(n))
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = GaussRat::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl From<Rational> for GaussRat {
    fn from(r: Rational) -> Self {
        GaussRat::real(r)
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::from_int(n)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({} {} {}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::real(Rational::one())
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    /// Panics on division by zero, like the rational division it wraps.
    fn div(self, o: &GaussRat) -> GaussRat {
        let inv = o.inv().expect("GaussRat division by zero");
        self * &inv
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &GaussRat) -> GaussRat { (&self).$m(o) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, o: &GaussRat) {
        *self = &*self * o;
    }
}

impl Mul<&Rational> for &GaussRat {
    type Output = GaussRat;
    fn mul(self, r: &Rational) -> GaussRat {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }
}


/// Solves `A x = b` exactly by Gaussian elimination with row pivoting.
/// Returns `None` when `A` is singular.
pub fn solve_exact(mut a: alloc::vec::Vec<alloc::vec::Vec<GaussRat>>, mut b: alloc::vec::Vec<GaussRat>) -> Option<alloc::vec::Vec<GaussRat>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].inv()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let d = &f * &a[col][c];
                a[r][c] -= &d;
            }
            let d = &f * &b[col];
            b[r] -= &d;
        }
    }
    let mut x = alloc::vec![GaussRat::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= &(&a[r][c] * &x[c]);
        }
        x[r] = &acc / &a[r][r];
    }
    Some(x)
}

/// Exact positive-semidefiniteness test for a symmetric rational matrix
/// (symmetric elimination; a zero pivot must have a zero row).
pub fn is_psd_exact(mut a: alloc::vec::Vec<alloc::vec::Vec<Rational>>) -> bool {
    let n = a.len();
    for k in 0..n {
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
    }
    true
}
